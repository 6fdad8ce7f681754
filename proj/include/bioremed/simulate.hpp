#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "bioremed/dynamics.hpp"
#include "bioremed/strategies.hpp"

namespace bioremed {

struct SimConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double t_max = 0.0;      // h; 0 selects default_horizon(x0)
  double diag_tol = 0.0;   // g/L; 0 selects 1e-9 * max(1, |s|)
  double event_tol = 1e-10;  // h
  double max_step = 0.0;   // h; 0 means unbounded

  void validate() const;
};

enum class Phase { offdiag, diagonal };
enum class Termination { target, horizon };

std::string_view to_string(Phase phase);
std::string_view to_string(Termination reason);

struct BioreactorSample {
  double s_r = 0.0;
  double x_r = 0.0;
  double q_over_vr = 0.0;
};

struct Sample {
  double t = 0.0;
  State s;
  Control u;
  Phase phase = Phase::offdiag;
  StateRate rate;     // right limit of s' (control u applied from here on)
  StateRate rate_in;  // left limit of s'; differs from `rate` at branch switches
  std::optional<BioreactorSample> bioreactor;
};

/// Event-annotated integration output. Times are strictly increasing.
struct Trajectory {
  std::vector<Sample> samples;
  std::optional<double> t_delta;  // first entry into the diagonal band
  std::optional<double> t_f;      // first time max(s1, s2) <= s_bar
  Termination reason = Termination::horizon;
  bool full_model = false;

  bool reached() const { return t_f.has_value(); }

  /// Piecewise cubic Hermite interpolation of the stored states.
  State state_at(double t) const;

  /// Index k with samples[k].t <= t < samples[k+1].t (clamped).
  std::size_t interval(double t) const;
};

/// 10 * (T(max(x1, x2)) + 1): a horizon comfortably beyond the diagonal
/// reach time from the worst corner.
double default_horizon(State x0, const ReducedParams& params, const GrowthModel& growth);

/// Integrates the reduced dynamics under `strategy`.
///
/// Events: target hit (max(s1, s2) falls to s_bar) and entry into the
/// diagonal band. For the optimal strategy the band entry switches to the
/// scalar diagonal flow s' = -gamma(s) and t_f = t_delta + T(s(t_delta)).
/// Other strategies only record t_delta and carry on.
///
/// Throws ContractViolation when the strategy leaves U(s) at an accepted step,
/// NumericalFailure on integrator breakdown.
Trajectory simulate(const Strategy& strategy, State x0, const ReducedParams& params,
                    const GrowthModel& growth, const SimConfig& config);

/// Bioreactor initial condition for the slow-fast model. Unset fields take
/// x_r(0) = 1 and s_r(0) = s-hat(alpha s1 + (1 - alpha) s2).
struct BioreactorStart {
  std::optional<double> x_r0;
  std::optional<double> s_r0;
};

/// Integrates the slow-fast model in slow time tau = epsilon t. The feedback
/// setpoint is realised as q / v_r = mu(sr_star). Times in the result are
/// slow-time hours, comparable with the reduced reach time.
Trajectory simulate_full(const Strategy& strategy, State x0, const FullParams& params,
                         const GrowthModel& growth, const SimConfig& config,
                         const BioreactorStart& start = {});

}  // namespace bioremed
