#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "bioremed/dynamics.hpp"
#include "bioremed/growth.hpp"
#include "bioremed/simulate.hpp"

namespace bioremed {

/// Value without diffusion: r T(x1) + (1 - r) T(x2).
double v0_closed(State x, const TimeFunction& time, double r);

/// Value in the infinite-diffusion limit: T(r x1 + (1 - r) x2).
double vinf_closed(State x, const TimeFunction& time, double r);

/// Minimal time V_d(x), evaluated as the reach time of the optimal feedback.
/// Exactly 0 inside the target. Throws NumericalFailure if the horizon is hit.
double vd_sim(State x, const ReducedParams& params, const GrowthModel& growth, const SimConfig& config = {});

struct DiagonalTimeBound {
  double bound = 0.0;    // h
  double m_minus = 0.0;  // min(gamma(x2)/r, gamma(x1)/(1-r))
  double m_plus = 0.0;   // max(gamma(x1)/r, gamma(x2)/(1-r))
};

/// Upper bound on the diagonal arrival time of the optimal flow from x:
/// (r(1-r)/d) log(1 + d |x1 - x2| / (M- r(1-r))). Infinite when M- = 0.
/// Throws DomainError for d = 0.
DiagonalTimeBound t_delta_bound(State x, const ReducedParams& params, const GrowthModel& growth);

struct ConcentrationRange {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds on s1(t_delta) = s2(t_delta) given the arrival time t_delta.
ConcentrationRange s_delta_sandwich(State x, double t_delta, const ReducedParams& params,
                                    const GrowthModel& growth);

enum class ValueKind { v0, vinf, vd };

std::string_view to_string(ValueKind kind);
ValueKind parse_value_kind(std::string_view text);

struct GridDomain {
  double lo1 = 0.0, hi1 = 5.0;
  double lo2 = 0.0, hi2 = 5.0;
  std::size_t n1 = 51, n2 = 51;

  double s1(std::size_t i) const;
  double s2(std::size_t j) const;
  void validate() const;
};

/// Row-major samples: values[i * n2 + j] is the value at (s1(i), s2(j)).
struct ValueGrid {
  ValueKind which = ValueKind::v0;
  GridDomain domain;
  ReducedParams params;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * domain.n2 + j]; }
};

/// Evaluates `which` on every node, in parallel over nodes. Target nodes are
/// exactly 0 and diagonal nodes use T(x1) without simulating. A failing node
/// is rethrown with its coordinates; the lowest failing index wins.
ValueGrid value_grid(ValueKind which, const GridDomain& domain, const ReducedParams& params,
                     const GrowthModel& growth, const SimConfig& config = {});

/// Single-threaded reference for value_grid; results are bit-identical.
ValueGrid value_grid_serial(ValueKind which, const GridDomain& domain, const ReducedParams& params,
                            const GrowthModel& growth, const SimConfig& config = {});

/// Value of `which` at one point, with the same shortcuts as the grid.
double value_at(ValueKind which, State x, const ReducedParams& params, const GrowthModel& growth,
                const TimeFunction& time, const SimConfig& config = {});

}  // namespace bioremed
