#pragma once

#include <cstddef>

#include "bioremed/simulate.hpp"

namespace bioremed {

struct ConstantSearchConfig {
  std::size_t grid = 41;   // nodes per axis of the coarse (alpha, zeta) grid
  double min_step = 1e-3;  // pattern search stops below this step
  SimConfig sim;
};

struct ConstantSearchResult {
  double alpha = 0.0;
  double zeta = 0.0;
  double sr_star = 0.0;  // the constant setpoint, zeta * min(s_bar, alpha x1 + (1 - alpha) x2)
  double t_f = 0.0;
  std::size_t evaluations = 0;
};

/// Constant setpoint used for the candidate (alpha, zeta) from x0.
double constant_setpoint(State x0, double alpha, double zeta, double s_bar);

/// Reach time of the constant control (alpha, constant_setpoint(...)), or
/// +inf when it leaves U(s) or misses the horizon.
double constant_candidate_time(State x0, double alpha, double zeta, const ReducedParams& params,
                               const GrowthModel& growth, const SimConfig& sim);

/// Best constant control: coarse grid over (alpha, zeta) in [0,1]^2, then a
/// compass search around the best node until the step is below min_step.
/// Ties are broken by lowest alpha, then lowest zeta. Candidates run in
/// parallel; the result does not depend on the thread count.
/// Throws ContractViolation if x0 is in the target, InfeasibleSearch if no
/// candidate reaches it.
ConstantSearchResult best_constant_search(State x0, const ReducedParams& params, const GrowthModel& growth,
                                          const ConstantSearchConfig& config = {});

/// Single-threaded reference for best_constant_search.
ConstantSearchResult best_constant_search_serial(State x0, const ReducedParams& params,
                                                 const GrowthModel& growth,
                                                 const ConstantSearchConfig& config = {});

}  // namespace bioremed
