#pragma once

#include <cstddef>
#include <vector>

#include "bioremed/simulate.hpp"

namespace bioremed {

/// Costate of the reduced problem. Along extremals both components stay
/// negative before t_f.
struct AdjointState {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Costate at t_f. Exit with s1 below s_bar gives (0, -1), with s2 below s_bar
/// (-1, 0); a corner or diagonal arrival gives -(r, 1 - r).
/// Throws NoTarget if the trajectory never reached the target.
AdjointState transversality_seed(const Trajectory& traj, const ReducedParams& params);

/// Costate at every trajectory sample, index-aligned with traj.samples.
struct CostatePath {
  std::vector<double> t;
  std::vector<AdjointState> lambda;
};

/// Integrates the adjoint system backward from `seed` at the last sample,
/// interval by interval, with the state given by Hermite interpolation of the
/// samples and the setpoint recomputed from the branch in force.
/// Throws ResolutionError if the samples cannot support interpolation.
CostatePath adjoint_backward(const Trajectory& traj, const ReducedParams& params, const GrowthModel& growth,
                             AdjointState seed, const SimConfig& config = {});

/// Switching function (-l1/r) gamma(s1) - (-l2/(1-r)) gamma(s2).
double switching_function(AdjointState lambda, State s, const ReducedParams& params, const GrowthModel& growth);

/// Time derivative of the switching function along an extremal:
/// d (g1/r + g2/(1-r)) (l2/(1-r) - l1/r) + d (l1 mu(s-hat(s1))/r^2 + l2 mu(s-hat(s2))/(1-r)^2) (s1 - s2).
double switching_rate(AdjointState lambda, State s, const ReducedParams& params, const GrowthModel& growth);

struct ExtremalTolerances {
  double sign = 1e-8;      // costate sign and switching dead zone
  double eta_dot = 1e-5;   // switching_rate vs finite differences
  double fd_step = 1e-4;   // h of the finite-difference oracle, divided by max(1, d / (r (1 - r)))
};

struct ExtremalSample {
  double t = 0.0;
  AdjointState lambda;  // scaled to |l1| + |l2| = 1
  double eta = 0.0;
  double eta_dot = 0.0;
  double eta_dot_fd = 0.0;  // NaN where the oracle is skipped
  double alpha = 0.0;
  bool branch_ok = true;
  bool forbidden = false;
};

struct ExtremalReport {
  bool reached = false;
  std::vector<ExtremalSample> samples;
  double max_sign_violation = 0.0;  // max(0, l1, l2) over t < t_f
  std::size_t branch_violations = 0;
  double max_eta_dot_error = 0.0;
  std::size_t forbidden_visits = 0;
  std::size_t sign_changes = 0;  // of eta before diagonal capture
  bool pass = false;
};

/// A posteriori Pontryagin check of a reduced trajectory. Failures are
/// reported, never thrown.
ExtremalReport check_extremal(const Trajectory& traj, const ReducedParams& params, const GrowthModel& growth,
                              const ExtremalTolerances& tol = {}, const SimConfig& config = {});

/// Residuals -1 + max_u Q(x, -p, u) of W0 = r T(x1) + (1 - r) T(x2) for the
/// diffusion-free problem. Off the kinks p = grad W0 and one residual is
/// returned; on x_i = s_bar both corner elements of the subdifferential are
/// evaluated. Throws DomainError inside the target.
std::vector<double> hjb_residuals_v0(State x, const ReducedParams& params, const GrowthModel& growth);

/// The residual of largest magnitude from hjb_residuals_v0.
double hjb_residual_v0(State x, const ReducedParams& params, const GrowthModel& growth);

/// Q(x, lambda, u) = -(alpha l1 / r) beta(x1, sr) - ((1 - alpha) l2 / (1 - r)) beta(x2, sr).
double hamiltonian_q(State x, AdjointState lambda, Control u, const ReducedParams& params,
                     const GrowthModel& growth);

}  // namespace bioremed
