#include "bioremed/search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

#include "bioremed/errors.hpp"

namespace bioremed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
  double alpha = 0.0;
  double zeta = 0.0;
  double t_f = kInf;
};

bool better(const Candidate& a, const Candidate& b) {
  return std::tie(a.t_f, a.alpha, a.zeta) < std::tie(b.t_f, b.alpha, b.zeta);
}

template <bool Parallel>
void evaluate_all(std::vector<Candidate>& cands, State x0, const ReducedParams& params,
                  const GrowthModel& growth, const SimConfig& sim) {
  const auto n = static_cast<std::ptrdiff_t>(cands.size());
  if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      cands[k].t_f = constant_candidate_time(x0, cands[k].alpha, cands[k].zeta, params, growth, sim);
    }
  } else {
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      cands[k].t_f = constant_candidate_time(x0, cands[k].alpha, cands[k].zeta, params, growth, sim);
    }
  }
}

template <bool Parallel>
ConstantSearchResult search(State x0, const ReducedParams& params, const GrowthModel& growth,
                            const ConstantSearchConfig& config) {
  params.validate();
  config.sim.validate();
  if (config.grid < 2 || !(config.min_step > 0.0)) {
    throw ContractViolation("best_constant_search: need grid >= 2 and min_step > 0");
  }
  if (std::max(x0.s1, x0.s2) <= params.s_bar) {
    throw ContractViolation("best_constant_search: initial state already in the target");
  }

  const std::size_t n = config.grid;
  const double h0 = 1.0 / static_cast<double>(n - 1);
  std::vector<Candidate> cands;
  cands.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cands.push_back({i + 1 == n ? 1.0 : i * h0, j + 1 == n ? 1.0 : j * h0, kInf});
    }
  }
  evaluate_all<Parallel>(cands, x0, params, growth, config.sim);
  std::size_t evaluations = cands.size();

  Candidate best = cands.front();
  for (const auto& c : cands) {
    if (better(c, best)) best = c;
  }
  if (!std::isfinite(best.t_f)) {
    throw InfeasibleSearch("best_constant_search: no constant control reaches the target");
  }

  double step = h0;
  while (step >= config.min_step) {
    std::vector<Candidate> trial;
    const std::array<std::array<double, 2>, 4> moves{{{-step, 0.0}, {step, 0.0}, {0.0, -step}, {0.0, step}}};
    for (const auto& mv : moves) {
      const double a = std::clamp(best.alpha + mv[0], 0.0, 1.0);
      const double z = std::clamp(best.zeta + mv[1], 0.0, 1.0);
      if (a == best.alpha && z == best.zeta) continue;
      trial.push_back({a, z, kInf});
    }
    evaluate_all<Parallel>(trial, x0, params, growth, config.sim);
    evaluations += trial.size();
    bool moved = false;
    for (const auto& c : trial) {
      if (c.t_f < best.t_f) {
        best = c;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }

  return {best.alpha, best.zeta, constant_setpoint(x0, best.alpha, best.zeta, params.s_bar), best.t_f,
          evaluations};
}

}  // namespace

double constant_setpoint(State x0, double alpha, double zeta, double s_bar) {
  return zeta * std::min(s_bar, inflow_concentration(x0, alpha));
}

double constant_candidate_time(State x0, double alpha, double zeta, const ReducedParams& params,
                               const GrowthModel& growth, const SimConfig& sim) {
  const ConstantSetpoint control{alpha, constant_setpoint(x0, alpha, zeta, params.s_bar)};
  try {
    const Trajectory traj = simulate(control, x0, params, growth, sim);
    return traj.reached() ? *traj.t_f : kInf;
  } catch (const ContractViolation&) {
    return kInf;
  }
}

ConstantSearchResult best_constant_search(State x0, const ReducedParams& params, const GrowthModel& growth,
                                          const ConstantSearchConfig& config) {
  return search<true>(x0, params, growth, config);
}

ConstantSearchResult best_constant_search_serial(State x0, const ReducedParams& params,
                                                 const GrowthModel& growth, const ConstantSearchConfig& config) {
  return search<false>(x0, params, growth, config);
}

}  // namespace bioremed
