#include "bioremed/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "bioremed/errors.hpp"

namespace bioremed {

void ReducedParams::validate() const {
  if (!(r > 0.0 && r < 1.0)) throw ContractViolation("params: r must lie in (0, 1)");
  if (!(d >= 0.0) || !std::isfinite(d)) throw ContractViolation("params: d must be >= 0");
  if (!(s_bar > 0.0)) throw ContractViolation("params: s_bar must be > 0");
}

void FullParams::validate() const {
  reduced.validate();
  if (!(epsilon > 0.0)) throw ContractViolation("params: epsilon must be > 0");
}

bool admissible(Control u, State s, double tol) {
  if (!(u.alpha >= 0.0 && u.alpha <= 1.0)) return false;
  const double cap = inflow_concentration(s, u.alpha);
  return u.sr_star >= 0.0 && u.sr_star <= cap + tol * std::max(1.0, cap);
}

StateRate reduced_rhs(State s, Control u, const ReducedParams& params, const GrowthModel& growth) {
  const double r = params.r;
  const double growth_rate = growth.mu(u.sr_star);
  const double diff = s.s2 - s.s1;
  return {
      -(u.alpha / r) * growth_rate * (s.s1 - u.sr_star) + params.d * diff / r,
      -((1.0 - u.alpha) / (1.0 - r)) * growth_rate * (s.s2 - u.sr_star) - params.d * diff / (1.0 - r),
  };
}

FullStateRate full_rhs(FullState x, double alpha, double q_over_vr, const FullParams& params,
                       const GrowthModel& growth) {
  const double r = params.reduced.r;
  const double d = params.reduced.d;
  const double eps = params.epsilon;
  const double uptake = growth.mu(x.s_r) * x.x_r;
  const double s_in = alpha * x.s1 + (1.0 - alpha) * x.s2;
  return {
      -uptake + q_over_vr * (s_in - x.s_r),
      uptake - q_over_vr * x.x_r,
      eps * ((alpha / r) * q_over_vr * (x.s_r - x.s1) + (d / r) * (x.s2 - x.s1)),
      eps * (((1.0 - alpha) / (1.0 - r)) * q_over_vr * (x.s_r - x.s2) + (d / (1.0 - r)) * (x.s1 - x.s2)),
  };
}

std::pair<ReducedParams, FullParams> to_reduced(const PhysicalParams& phys, double s_bar) {
  if (!(phys.v1 > 0.0 && phys.v2 > 0.0 && phys.v_r > 0.0) || !(phys.D >= 0.0)) {
    throw ContractViolation("physical parameters: volumes must be > 0 and D >= 0");
  }
  const double total = phys.v1 + phys.v2;
  ReducedParams reduced{phys.v1 / total, phys.D / phys.v_r, s_bar};
  FullParams full{reduced, phys.v_r / total};
  return {reduced, full};
}

}  // namespace bioremed
