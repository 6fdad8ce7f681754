#include "bioremed/value.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <string>

#include "bioremed/errors.hpp"

namespace bioremed {

namespace {

double gamma_or_zero(const GrowthModel& growth, double sigma) {
  return sigma > 0.0 ? max_removal_rate(growth, sigma) : 0.0;
}

bool in_target(State x, double s_bar) { return std::max(x.s1, x.s2) <= s_bar; }

void require_orthant(State x, const char* who) {
  if (!(x.s1 >= 0.0 && x.s2 >= 0.0)) {
    throw ContractViolation(std::string(who) + ": state must lie in the positive orthant");
  }
}

std::string node_label(std::size_t i, std::size_t j, State x) {
  std::ostringstream out;
  out.precision(17);
  out << "node (" << i << ", " << j << ") at s = (" << x.s1 << ", " << x.s2 << ")";
  return out.str();
}

// Re-raises the original exception with the node position prefixed, keeping
// its category.
[[noreturn]] void rethrow_at(std::exception_ptr error, const std::string& where) {
  try {
    std::rethrow_exception(error);
  } catch (const NumericalFailure& e) {
    throw NumericalFailure(where + ": " + e.what(), e.where());
  } catch (const DomainError& e) {
    throw DomainError(where + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw ContractViolation(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(where + ": " + e.what());
  }
}

template <bool Parallel>
ValueGrid evaluate_grid(ValueKind which, const GridDomain& domain, const ReducedParams& params,
                        const GrowthModel& growth, const SimConfig& config) {
  domain.validate();
  params.validate();
  config.validate();
  const TimeFunction time(growth, params.s_bar);
  ValueGrid grid{which, domain, params, std::vector<double>(domain.n1 * domain.n2, 0.0)};
  std::vector<std::exception_ptr> errors(grid.values.size());
  const auto count = static_cast<std::ptrdiff_t>(grid.values.size());

  const auto node = [&](std::ptrdiff_t k) {
    const auto i = static_cast<std::size_t>(k) / domain.n2;
    const auto j = static_cast<std::size_t>(k) % domain.n2;
    try {
      grid.values[k] = value_at(which, {domain.s1(i), domain.s2(j)}, params, growth, time, config);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t k = 0; k < count; ++k) node(k);
  } else {
    for (std::ptrdiff_t k = 0; k < count; ++k) node(k);
  }

  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (!errors[k]) continue;
    const std::size_t i = k / domain.n2, j = k % domain.n2;
    rethrow_at(errors[k], node_label(i, j, {domain.s1(i), domain.s2(j)}));
  }
  return grid;
}

}  // namespace

double v0_closed(State x, const TimeFunction& time, double r) {
  require_orthant(x, "v0_closed");
  return r * time(x.s1) + (1.0 - r) * time(x.s2);
}

double vinf_closed(State x, const TimeFunction& time, double r) {
  require_orthant(x, "vinf_closed");
  return time(weighted_mass(x, r));
}

double vd_sim(State x, const ReducedParams& params, const GrowthModel& growth, const SimConfig& config) {
  require_orthant(x, "vd_sim");
  if (in_target(x, params.s_bar)) return 0.0;
  const Trajectory traj = simulate(OptimalTwoPump{}, x, params, growth, config);
  if (!traj.reached()) {
    throw NumericalFailure("vd_sim: optimal feedback did not reach the target before the horizon",
                           traj.samples.back().t);
  }
  return *traj.t_f;
}

DiagonalTimeBound t_delta_bound(State x, const ReducedParams& params, const GrowthModel& growth) {
  params.validate();
  if (params.d == 0.0) throw DomainError("t_delta_bound: undefined for d = 0");
  const double r = params.r;
  const double g1 = gamma_or_zero(growth, x.s1);
  const double g2 = gamma_or_zero(growth, x.s2);
  DiagonalTimeBound out;
  out.m_minus = std::min(g2 / r, g1 / (1.0 - r));
  out.m_plus = std::max(g1 / r, g2 / (1.0 - r));
  const double gap = std::abs(x.s1 - x.s2);
  const double rr = r * (1.0 - r);
  if (gap == 0.0) {
    out.bound = 0.0;
  } else if (out.m_minus <= 0.0) {
    out.bound = std::numeric_limits<double>::infinity();
  } else {
    out.bound = rr / params.d * std::log1p(params.d * gap / (out.m_minus * rr));
  }
  return out;
}

ConcentrationRange s_delta_sandwich(State x, double t_delta, const ReducedParams& params,
                                    const GrowthModel& growth) {
  params.validate();
  if (!(t_delta >= 0.0)) throw ContractViolation("s_delta_sandwich: t_delta must be non-negative");
  const double r = params.r;
  const double g1 = gamma_or_zero(growth, x.s1);
  const double g2 = gamma_or_zero(growth, x.s2);
  const double m_minus = std::min(g2 / r, g1 / (1.0 - r));
  const double m_plus = std::max(g1 / r, g2 / (1.0 - r));
  const double m = weighted_mass(x, r);
  return {m - std::max(r, 1.0 - r) * m_plus * t_delta, m - std::min(r, 1.0 - r) * m_minus * t_delta};
}

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::v0: return "v0";
    case ValueKind::vinf: return "vinf";
    case ValueKind::vd: return "vd";
  }
  return "?";
}

ValueKind parse_value_kind(std::string_view text) {
  if (text == "v0") return ValueKind::v0;
  if (text == "vinf") return ValueKind::vinf;
  if (text == "vd") return ValueKind::vd;
  throw ContractViolation("value kind must be one of v0, vinf, vd; got '" + std::string(text) + "'");
}

double GridDomain::s1(std::size_t i) const {
  return i + 1 == n1 ? hi1 : lo1 + (hi1 - lo1) * static_cast<double>(i) / static_cast<double>(n1 - 1);
}

double GridDomain::s2(std::size_t j) const {
  return j + 1 == n2 ? hi2 : lo2 + (hi2 - lo2) * static_cast<double>(j) / static_cast<double>(n2 - 1);
}

void GridDomain::validate() const {
  if (n1 < 2 || n2 < 2) throw ContractViolation("grid: resolution must be at least 2x2");
  if (!(lo1 >= 0.0 && lo2 >= 0.0 && hi1 > lo1 && hi2 > lo2)) {
    throw ContractViolation("grid: need 0 <= lo < hi on both axes");
  }
}

double value_at(ValueKind which, State x, const ReducedParams& params, const GrowthModel& growth,
                const TimeFunction& time, const SimConfig& config) {
  require_orthant(x, "value_at");
  if (in_target(x, params.s_bar)) return 0.0;
  switch (which) {
    case ValueKind::v0: return v0_closed(x, time, params.r);
    case ValueKind::vinf: return vinf_closed(x, time, params.r);
    case ValueKind::vd:
      if (x.s1 == x.s2) return time(x.s1);
      return vd_sim(x, params, growth, config);
  }
  return 0.0;
}

ValueGrid value_grid(ValueKind which, const GridDomain& domain, const ReducedParams& params,
                     const GrowthModel& growth, const SimConfig& config) {
  return evaluate_grid<true>(which, domain, params, growth, config);
}

ValueGrid value_grid_serial(ValueKind which, const GridDomain& domain, const ReducedParams& params,
                            const GrowthModel& growth, const SimConfig& config) {
  return evaluate_grid<false>(which, domain, params, growth, config);
}

}  // namespace bioremed
