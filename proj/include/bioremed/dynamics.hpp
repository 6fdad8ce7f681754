#pragma once

#include <utility>

#include "bioremed/growth.hpp"

namespace bioremed {

/// Parameters of the two-patch reduced model.
struct ReducedParams {
  double r = 0.3;      // v1 / (v1 + v2), in (0, 1)
  double d = 0.1;      // D / v_r, 1/h
  double s_bar = 1.0;  // target threshold, g/L

  void validate() const;
};

/// Reduced parameters plus the time-scale ratio of the slow-fast model.
struct FullParams {
  ReducedParams reduced;
  double epsilon = 0.01;  // v_r / (v1 + v2)

  void validate() const;
};

/// Physical description of the resource and the bioreactor.
struct PhysicalParams {
  double v1 = 0.0;   // L
  double v2 = 0.0;   // L
  double v_r = 0.0;  // L
  double D = 0.0;    // L/h
};

/// Pollutant concentrations in the two patches, g/L.
struct State {
  double s1 = 0.0;
  double s2 = 0.0;

  friend bool operator==(const State&, const State&) = default;
};

struct StateRate {
  double ds1 = 0.0;
  double ds2 = 0.0;
};

/// Bioreactor-augmented state of the slow-fast model, g/L.
struct FullState {
  double s_r = 0.0;
  double x_r = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
};

struct FullStateRate {
  double ds_r = 0.0;
  double dx_r = 0.0;
  double ds1 = 0.0;
  double ds2 = 0.0;
};

/// Flow split alpha = q1/q and bioreactor quasi-steady-state setpoint.
struct Control {
  double alpha = 0.0;
  double sr_star = 0.0;

  friend bool operator==(const Control&, const Control&) = default;
};

/// Concentration entering the bioreactor under the flow split alpha.
inline double inflow_concentration(State s, double alpha) {
  return alpha * s.s1 + (1.0 - alpha) * s.s2;
}

/// True when u lies in U(s) up to a relative slack `tol`.
bool admissible(Control u, State s, double tol = 1e-12);

/// Reduced dynamics s' = F(s, u) + d G(s), in slow time.
StateRate reduced_rhs(State s, Control u, const ReducedParams& params, const GrowthModel& growth);

/// Slow-fast dynamics in fast time t, with total dilution q / v_r.
FullStateRate full_rhs(FullState x, double alpha, double q_over_vr, const FullParams& params,
                       const GrowthModel& growth);

/// r = v1/(v1+v2), d = D/v_r, epsilon = v_r/(v1+v2).
std::pair<ReducedParams, FullParams> to_reduced(const PhysicalParams& phys, double s_bar);

/// Weighted pollutant mass r s1 + (1-r) s2.
inline double weighted_mass(State s, double r) { return r * s.s1 + (1.0 - r) * s.s2; }

}  // namespace bioremed
