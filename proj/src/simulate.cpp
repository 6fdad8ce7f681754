#include "bioremed/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "bioremed/errors.hpp"
#include "bioremed/integrator.hpp"

namespace bioremed {

namespace {

constexpr double kAdmissibleSlack = 1e-9;

ode::StepperOptions stepper_options(const SimConfig& c) {
  ode::StepperOptions opt;
  opt.rel_tol = c.rel_tol;
  opt.abs_tol = c.abs_tol;
  opt.h_max = c.max_step;
  opt.event_tol = c.event_tol;
  return opt;
}

// Stage states of a trial step may stray outside U(s); clip there and let the
// accepted-step check decide admissibility.
Control clip_to_control_set(Control u, State s) {
  u.alpha = std::clamp(u.alpha, 0.0, 1.0);
  const double cap = std::max(0.0, inflow_concentration(s, u.alpha));
  u.sr_star = std::clamp(u.sr_star, 0.0, cap);
  return u;
}

double setpoint_or_zero(const GrowthModel& growth, double sigma) {
  return sigma > 0.0 ? optimal_setpoint(growth, sigma) : 0.0;
}

// Control law that was active on the interval ending at s.
Control continue_branch(const Control& prev, State s, const GrowthModel& growth) {
  if (prev.alpha == 1.0) return {1.0, setpoint_or_zero(growth, s.s1)};
  if (prev.alpha == 0.0) return {0.0, setpoint_or_zero(growth, s.s2)};
  return prev;
}

void require_admissible(Control u, State s, double t) {
  if (!admissible(u, s, kAdmissibleSlack)) {
    throw ContractViolation("strategy produced a control outside U(s) at t=" + std::to_string(t));
  }
}

double target_gap(State s, double s_bar) { return std::max(s.s1, s.s2) - s_bar; }

// Signed distance to the diagonal band from the side the segment started on,
// so a step that jumps across the whole band still registers.
double band_gap(State s, double side, double diag_tol) {
  return side * (s.s1 - s.s2) - diagonal_band(s, diag_tol);
}

}  // namespace

void SimConfig::validate() const {
  if (!(rel_tol > 0.0 && abs_tol > 0.0 && event_tol > 0.0)) {
    throw ContractViolation("sim config: tolerances must be positive");
  }
  if (t_max < 0.0 || diag_tol < 0.0 || max_step < 0.0) {
    throw ContractViolation("sim config: t_max, diag_tol and max_step must be non-negative");
  }
}

std::string_view to_string(Phase phase) { return phase == Phase::offdiag ? "offdiag" : "diagonal"; }

std::string_view to_string(Termination reason) {
  return reason == Termination::target ? "target" : "horizon";
}

std::size_t Trajectory::interval(double t) const {
  if (samples.size() < 2) return 0;
  const auto it = std::upper_bound(samples.begin(), samples.end(), t,
                                   [](double v, const Sample& s) { return v < s.t; });
  const auto k = static_cast<std::size_t>(std::distance(samples.begin(), it));
  return std::clamp<std::size_t>(k == 0 ? 0 : k - 1, 0, samples.size() - 2);
}

State Trajectory::state_at(double t) const {
  if (samples.empty()) throw ResolutionError("state_at: empty trajectory");
  if (samples.size() == 1 || t <= samples.front().t) return samples.front().s;
  if (t >= samples.back().t) return samples.back().s;
  const std::size_t k = interval(t);
  const Sample& a = samples[k];
  const Sample& b = samples[k + 1];
  const double h = b.t - a.t;
  const double u = (t - a.t) / h;
  const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
  const double h10 = u * (1.0 - u) * (1.0 - u);
  const double h01 = u * u * (3.0 - 2.0 * u);
  const double h11 = u * u * (u - 1.0);
  return {h00 * a.s.s1 + h10 * h * a.rate.ds1 + h01 * b.s.s1 + h11 * h * b.rate_in.ds1,
          h00 * a.s.s2 + h10 * h * a.rate.ds2 + h01 * b.s.s2 + h11 * h * b.rate_in.ds2};
}

double default_horizon(State x0, const ReducedParams& params, const GrowthModel& growth) {
  const TimeFunction time(growth, params.s_bar);
  return 10.0 * (time(std::max(x0.s1, x0.s2)) + 1.0);
}

Trajectory simulate(const Strategy& strategy, State x0, const ReducedParams& params,
                    const GrowthModel& growth, const SimConfig& config) {
  params.validate();
  config.validate();
  if (!(x0.s1 >= 0.0 && x0.s2 >= 0.0)) {
    throw ContractViolation("simulate: initial state must lie in the positive orthant");
  }

  Trajectory traj;
  const FeedbackContext ctx{params, growth, config.diag_tol};
  const double t_max = config.t_max > 0.0 ? config.t_max : default_horizon(x0, params, growth);
  const auto opt = stepper_options(config);
  const bool locks = locks_on_diagonal(strategy);
  const auto in_band = [&](State s) { return std::abs(s.s1 - s.s2) <= diagonal_band(s, config.diag_tol); };

  const auto push = [&](double t, State s, Control u, Phase phase) {
    require_admissible(u, s, t);
    Sample sample{t, s, u, phase, reduced_rhs(s, u, params, growth), {}, std::nullopt};
    sample.rate_in = sample.rate;
    if (!traj.samples.empty() && traj.samples.back().u.alpha != u.alpha) {
      sample.rate_in = reduced_rhs(s, continue_branch(traj.samples.back().u, s, growth), params, growth);
    }
    traj.samples.push_back(sample);
  };

  if (target_gap(x0, params.s_bar) <= 0.0) {
    push(0.0, x0, evaluate(strategy, x0, ctx), in_band(x0) ? Phase::diagonal : Phase::offdiag);
    traj.t_f = 0.0;
    traj.reason = Termination::target;
    if (in_band(x0)) traj.t_delta = 0.0;
    return traj;
  }

  double t = 0.0;
  State s = x0;
  bool captured = false;

  if (in_band(x0)) {
    traj.t_delta = 0.0;
    captured = locks;
    if (captured) {
      push(0.0, x0, evaluate(strategy, x0, ctx), Phase::diagonal);
    }
  }

  if (!captured) {
    push(0.0, x0, evaluate(strategy, x0, ctx), Phase::offdiag);
    // Until capture a locking feedback stays on its bang branch. Letting trial
    // stages inside the band switch to the singular split makes the state
    // discontinuous in the step length and the band crossing cannot be located.
    std::optional<Control> frozen;
    const auto rhs = [&](double, const ode::Vec<2>& y) {
      const State st{y[0], y[1]};
      const Control raw = frozen ? continue_branch(*frozen, st, growth) : evaluate(strategy, st, ctx);
      const Control u = clip_to_control_set(raw, st);
      const StateRate ds = reduced_rhs(st, u, params, growth);
      return ode::Vec<2>{ds.ds1, ds.ds2};
    };
    const auto on_accept = [&](double tt, const ode::Vec<2>& y) {
      const State st{y[0], y[1]};
      push(tt, st, evaluate(strategy, st, ctx), Phase::offdiag);
    };

    while (true) {
      std::vector<ode::Event<2>> events;
      events.push_back({[&](double, const ode::Vec<2>& y) { return target_gap({y[0], y[1]}, params.s_bar); }});
      if (locks && !traj.t_delta) frozen = evaluate(strategy, s, ctx);
      if (!traj.t_delta) {
        const double side = s.s1 > s.s2 ? 1.0 : -1.0;
        events.push_back({[&, side](double, const ode::Vec<2>& y) {
          return band_gap({y[0], y[1]}, side, config.diag_tol);
        }});
      }
      const auto out = ode::integrate<2>(rhs, t, {s.s1, s.s2}, t_max,
                                         std::span<const ode::Event<2>>(events), opt, on_accept);
      t = out.t;
      s = {out.y[0], out.y[1]};
      if (out.event == 0) {
        traj.t_f = t;
        traj.reason = Termination::target;
        return traj;
      }
      if (out.event == 1) {
        traj.t_delta = t;
        if (locks) {
          captured = true;
          Sample& cap = traj.samples.back();
          const double sigma = weighted_mass(s, params.r);
          cap.phase = Phase::diagonal;
          cap.u = {params.r, setpoint_or_zero(growth, sigma)};
          const double g = max_removal_rate(growth, sigma);
          cap.rate = {-g, -g};
          break;
        }
        continue;
      }
      traj.reason = Termination::horizon;
      return traj;
    }
  }

  // Scalar diagonal flow s' = -gamma(s), alpha = r.
  const double t_capture = t;
  const double sigma0 = weighted_mass(s, params.r);
  const TimeFunction time(growth, params.s_bar);
  const double t_f = t_capture + time(sigma0);
  // Captured right at the threshold: the diagonal projection is already in the target.
  if (sigma0 <= params.s_bar) {
    traj.t_f = t_capture;
    traj.reason = Termination::target;
    return traj;
  }

  const auto rhs1 = [&](double, const ode::Vec<1>& y) {
    return ode::Vec<1>{-max_removal_rate(growth, std::max(y[0], 1e-300))};
  };
  const auto on_accept1 = [&](double tt, const ode::Vec<1>& y) {
    const State st{y[0], y[0]};
    push(tt, st, optimal_feedback(st, params, growth, config.diag_tol), Phase::diagonal);
  };
  const ode::Event<1> hit{[&](double, const ode::Vec<1>& y) { return y[0] - params.s_bar; }};
  const auto out = ode::integrate<1>(rhs1, t_capture, {sigma0}, t_max,
                                     std::span<const ode::Event<1>>(&hit, 1), opt, on_accept1);
  if (out.event != 0) {
    traj.reason = Termination::horizon;
    return traj;
  }
  Sample& last = traj.samples.back();
  const double t_prev = traj.samples[traj.samples.size() - 2].t;
  if (t_f > t_prev) last.t = t_f;
  last.s = {params.s_bar, params.s_bar};
  last.u = optimal_feedback(last.s, params, growth, config.diag_tol);
  last.rate = last.rate_in = reduced_rhs(last.s, last.u, params, growth);
  traj.t_f = last.t;
  traj.reason = Termination::target;
  return traj;
}

Trajectory simulate_full(const Strategy& strategy, State x0, const FullParams& params,
                         const GrowthModel& growth, const SimConfig& config, const BioreactorStart& start) {
  params.validate();
  config.validate();
  const ReducedParams& rp = params.reduced;
  if (!(x0.s1 >= 0.0 && x0.s2 >= 0.0)) {
    throw ContractViolation("simulate_full: initial state must lie in the positive orthant");
  }
  const double x_r0 = start.x_r0.value_or(1.0);
  if (!(x_r0 > 0.0)) {
    throw ContractViolation("simulate_full: initial biomass x_r(0) must be positive");
  }

  const FeedbackContext ctx{rp, growth, config.diag_tol};
  const double t_max = config.t_max > 0.0 ? config.t_max : default_horizon(x0, rp, growth);
  const auto opt = stepper_options(config);
  const bool locks = locks_on_diagonal(strategy);
  const auto in_band = [&](State s) { return std::abs(s.s1 - s.s2) <= diagonal_band(s, config.diag_tol); };

  bool locked = locks && in_band(x0);
  const auto command = [&](State s) {
    if (locked) return Control{rp.r, setpoint_or_zero(growth, s.s1)};
    return evaluate(strategy, s, ctx);
  };

  const Control u0 = command(x0);
  const double s_r0 = start.s_r0.value_or(setpoint_or_zero(growth, inflow_concentration(x0, u0.alpha)));
  if (!(s_r0 >= 0.0)) throw ContractViolation("simulate_full: s_r(0) must be non-negative");

  Trajectory traj;
  traj.full_model = true;
  const auto push = [&](double t, const ode::Vec<4>& y) {
    const State s{y[2], y[3]};
    const Control u = command(s);
    require_admissible(u, s, t);
    const double q = growth.mu(u.sr_star);
    const FullStateRate rate = full_rhs({y[0], y[1], y[2], y[3]}, u.alpha, q, params, growth);
    Sample sample{t, s, u, locked ? Phase::diagonal : Phase::offdiag,
                  {rate.ds1 / params.epsilon, rate.ds2 / params.epsilon}, {}, BioreactorSample{y[0], y[1], q}};
    sample.rate_in = sample.rate;
    traj.samples.push_back(sample);
  };

  ode::Vec<4> y{s_r0, x_r0, x0.s1, x0.s2};
  if (in_band(x0)) traj.t_delta = 0.0;
  push(0.0, y);
  if (target_gap(x0, rp.s_bar) <= 0.0) {
    traj.t_f = 0.0;
    traj.reason = Termination::target;
    return traj;
  }

  const auto rhs = [&](double, const ode::Vec<4>& v) {
    const State s{v[2], v[3]};
    const Control u = clip_to_control_set(command(s), s);
    const FullStateRate r = full_rhs({v[0], v[1], v[2], v[3]}, u.alpha, growth.mu(u.sr_star), params, growth);
    const double inv = 1.0 / params.epsilon;
    return ode::Vec<4>{r.ds_r * inv, r.dx_r * inv, r.ds1 * inv, r.ds2 * inv};
  };

  double t = 0.0;
  while (true) {
    std::vector<ode::Event<4>> events;
    events.push_back({[&](double, const ode::Vec<4>& v) { return target_gap({v[2], v[3]}, rp.s_bar); }});
    if (!traj.t_delta) {
      const double side = y[2] > y[3] ? 1.0 : -1.0;
      events.push_back({[&, side](double, const ode::Vec<4>& v) {
        return band_gap({v[2], v[3]}, side, config.diag_tol);
      }});
    }
    const auto out = ode::integrate<4>(rhs, t, y, t_max, std::span<const ode::Event<4>>(events), opt, push);
    t = out.t;
    y = out.y;
    if (out.event == 0) {
      traj.t_f = t;
      traj.reason = Termination::target;
      return traj;
    }
    if (out.event == 1) {
      traj.t_delta = t;
      if (locks) {
        locked = true;
        Sample& cap = traj.samples.back();
        cap.phase = Phase::diagonal;
        cap.u = command(cap.s);
      }
      continue;
    }
    traj.reason = Termination::horizon;
    return traj;
  }
}

}  // namespace bioremed
