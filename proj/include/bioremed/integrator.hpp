#pragma once

// Adaptive Dormand-Prince 5(4) integration with terminal zero-crossing events.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "bioremed/errors.hpp"

namespace bioremed::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

struct StepperOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_init = 0.0;  // 0 picks a step from the initial slope
  double h_max = 0.0;   // 0 means unbounded
  double event_tol = 1e-10;
  std::size_t max_steps = 5'000'000;
};

/// Terminal event: fires when g goes from > 0 to <= 0 across an accepted step.
template <std::size_t N>
struct Event {
  std::function<double(double, const Vec<N>&)> g;
};

template <std::size_t N>
struct Outcome {
  double t = 0.0;
  Vec<N> y{};
  int event = -1;  // index of the event that stopped integration, -1 at t_end
  std::size_t steps = 0;
};

namespace detail {

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
  Vec<N> out = y;
  for (const auto& [coef, k] : terms) {
    if (coef == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * coef * (*k)[i];
  }
  return out;
}

template <std::size_t N>
struct Trial {
  Vec<N> y;
  Vec<N> err;
  Vec<N> k_end;
};

// One Dormand-Prince step from (t, y) with step h; k1 = f(t, y).
template <std::size_t N, class Rhs>
Trial<N> dopri_step(Rhs& f, double t, const Vec<N>& y, double h, const Vec<N>& k1) {
  const Vec<N> k2 = f(t + h / 5.0, axpy<N>(y, h, {{1.0 / 5.0, &k1}}));
  const Vec<N> k3 = f(t + 3.0 * h / 10.0, axpy<N>(y, h, {{3.0 / 40.0, &k1}, {9.0 / 40.0, &k2}}));
  const Vec<N> k4 =
      f(t + 4.0 * h / 5.0, axpy<N>(y, h, {{44.0 / 45.0, &k1}, {-56.0 / 15.0, &k2}, {32.0 / 9.0, &k3}}));
  const Vec<N> k5 = f(t + 8.0 * h / 9.0, axpy<N>(y, h,
                                                 {{19372.0 / 6561.0, &k1},
                                                  {-25360.0 / 2187.0, &k2},
                                                  {64448.0 / 6561.0, &k3},
                                                  {-212.0 / 729.0, &k4}}));
  const Vec<N> k6 = f(t + h, axpy<N>(y, h,
                                     {{9017.0 / 3168.0, &k1},
                                      {-355.0 / 33.0, &k2},
                                      {46732.0 / 5247.0, &k3},
                                      {49.0 / 176.0, &k4},
                                      {-5103.0 / 18656.0, &k5}}));
  Trial<N> out;
  out.y = axpy<N>(y, h,
                  {{35.0 / 384.0, &k1},
                   {500.0 / 1113.0, &k3},
                   {125.0 / 192.0, &k4},
                   {-2187.0 / 6784.0, &k5},
                   {11.0 / 84.0, &k6}});
  out.k_end = f(t + h, out.y);
  for (std::size_t i = 0; i < N; ++i) {
    out.err[i] = h * (71.0 / 57600.0 * k1[i] - 71.0 / 16695.0 * k3[i] + 71.0 / 1920.0 * k4[i] -
                      17253.0 / 339200.0 * k5[i] + 22.0 / 525.0 * k6[i] - 1.0 / 40.0 * out.k_end[i]);
  }
  return out;
}

template <std::size_t N>
double error_norm(const Trial<N>& trial, const Vec<N>& y, const StepperOptions& opt) {
  double norm = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double scale = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(trial.y[i]));
    norm = std::max(norm, std::abs(trial.err[i]) / scale);
  }
  return std::isfinite(norm) ? norm : std::numeric_limits<double>::infinity();
}

template <std::size_t N>
double initial_step(const Vec<N>& y, const Vec<N>& k1, const StepperOptions& opt) {
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double scale = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
    d0 = std::max(d0, std::abs(y[i]) / scale);
    d1 = std::max(d1, std::abs(k1[i]) / scale);
  }
  if (d0 < 1e-5 || d1 < 1e-5) return 1e-6;
  return std::clamp(0.01 * d0 / d1, 1e-10, 1.0);
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 towards t_end (either direction).
///
/// `on_accept(t, y)` is called after every accepted step, including the final
/// event or end point. Events are located by bisection on the step length
/// until the bracket is below `event_tol`; the returned state lies on the
/// far side of the crossing (g <= 0).
template <std::size_t N, class Rhs, class OnAccept>
Outcome<N> integrate(Rhs&& f, double t0, Vec<N> y0, double t_end, std::span<const Event<N>> events,
                     const StepperOptions& opt, OnAccept&& on_accept) {
  Outcome<N> out{t0, y0, -1, 0};
  if (t_end == t0) return out;
  const double dir = t_end > t0 ? 1.0 : -1.0;

  double t = t0;
  Vec<N> y = y0;
  Vec<N> k1 = f(t, y);
  std::vector<double> g_prev(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) g_prev[i] = events[i].g(t, y);

  double h = opt.h_init > 0.0 ? opt.h_init : detail::initial_step<N>(y, k1, opt);
  std::size_t steps = 0;

  while (true) {
    if (++steps > opt.max_steps) {
      throw NumericalFailure("integrator: step budget exhausted", t);
    }
    const double remaining = std::abs(t_end - t);
    h = std::min(h, remaining);
    if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
    const double h_floor = 1e-14 * std::max(1.0, std::abs(t));
    if (h < h_floor) {
      throw NumericalFailure("integrator: step size underflow", t);
    }

    const auto trial = detail::dopri_step<N>(f, t, y, dir * h, k1);
    const double err = detail::error_norm<N>(trial, y, opt);
    if (!(err <= 1.0)) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    const bool last = h >= remaining;
    const double t_new = last ? t_end : t + dir * h;

    // Earliest crossing among all events inside this step.
    int hit = -1;
    double hit_len = h;
    Vec<N> hit_y = trial.y;
    std::vector<double> g_new(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      g_new[i] = events[i].g(t_new, trial.y);
      if (!(g_prev[i] > 0.0 && g_new[i] <= 0.0)) continue;
      double lo = 0.0, hi = h;
      Vec<N> y_hi = trial.y;
      while (hi - lo > opt.event_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const Vec<N> y_mid = detail::dopri_step<N>(f, t, y, dir * mid, k1).y;
        if (events[i].g(t + dir * mid, y_mid) <= 0.0) {
          hi = mid;
          y_hi = y_mid;
        } else {
          lo = mid;
        }
      }
      if (hit < 0 || hi < hit_len) {
        hit = static_cast<int>(i);
        hit_len = hi;
        hit_y = y_hi;
      }
    }
    if (hit >= 0) {
      const double t_hit = (hit_len == h) ? t_new : t + dir * hit_len;
      on_accept(t_hit, hit_y);
      return {t_hit, hit_y, hit, steps};
    }

    t = t_new;
    y = trial.y;
    k1 = trial.k_end;
    g_prev = std::move(g_new);
    on_accept(t, y);
    if (last) return {t, y, -1, steps};

    h *= err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
  }
}

}  // namespace bioremed::ode
