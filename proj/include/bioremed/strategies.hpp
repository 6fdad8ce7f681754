#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

#include "bioremed/dynamics.hpp"

namespace bioremed {

/// Most rapid approach: treat the dirtier patch at its optimal setpoint,
/// split the flow alpha = r on the diagonal.
struct OptimalTwoPump {};

/// A single pump on patch `active` (1 or 2) at setpoint s-hat(s_active).
struct OnePump {
  int active = 1;
};

/// alpha = r, setpoint half of the weighted mass.
struct Homogenizing {};

/// Constant (alpha, zeta) with the state-proportional setpoint
/// sr = zeta * (alpha s1 + (1 - alpha) s2). Admissible everywhere.
struct ConstantZeta {
  double alpha = 0.0;
  double zeta = 0.0;
};

/// Constant flow split and constant bioreactor setpoint. May leave U(s)
/// as the resource cleans; the simulator rejects it when it does.
struct ConstantSetpoint {
  double alpha = 0.0;
  double sr_star = 0.0;
};

/// The optimal feedback with its two bang branches swapped. Only useful as a
/// negative control for extremal verification.
struct SwappedBranches {};

using Strategy =
    std::variant<OptimalTwoPump, OnePump, Homogenizing, ConstantZeta, ConstantSetpoint, SwappedBranches>;

/// Width of the band |s1 - s2| <= tol treated as the diagonal. A positive
/// `configured` value is used as is; zero selects 1e-9 * max(1, |s|).
double diagonal_band(State s, double configured);

/// Everything a feedback law may look at besides the state.
struct FeedbackContext {
  const ReducedParams& params;
  const GrowthModel& growth;
  double diag_tol = 0.0;
};

Control optimal_feedback(State s, const ReducedParams& params, const GrowthModel& growth,
                         double diag_tol = 0.0);
Control one_pump_feedback(State s, int active, const GrowthModel& growth);
Control homogenizing_feedback(State s, const ReducedParams& params);
Control constant_zeta_control(State s, double alpha, double zeta);

Control evaluate(const Strategy& strategy, State s, const FeedbackContext& ctx);

/// True for strategies whose diagonal arc is the singular alpha = r arc.
bool locks_on_diagonal(const Strategy& strategy);

/// Parses `optimal`, `onepump:1`, `onepump:2`, `homog`, `const:<a>:<z>`,
/// `constsr:<a>:<sr>`, `swapped`. `bestconst` is resolved by the CLI.
/// Throws ContractViolation on malformed input.
Strategy parse_strategy(std::string_view text);
std::string to_string(const Strategy& strategy);

}  // namespace bioremed
