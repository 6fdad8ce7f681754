#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"

#include "bioremed/errors.hpp"
#include "bioremed/search.hpp"
#include "bioremed/simulate.hpp"
#include "bioremed/strategies.hpp"
#include "oracles.hpp"

using namespace bioremed;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const GrowthModel kMonod = GrowthModel::monod(1.0, 1.0);
const ReducedParams kParams{0.3, 0.1, 1.0};

double reach_time(const Strategy& s, State x0, const ReducedParams& p) {
  const auto traj = simulate(s, x0, p, kMonod, {});
  return traj.reached() ? *traj.t_f : std::numeric_limits<double>::infinity();
}

}  // namespace

TEST_CASE("optimal feedback examples", "[strategies]") {
  const auto a = optimal_feedback({3, 1}, kParams, kMonod);
  CHECK(a.alpha == 1.0);
  CHECK_THAT(a.sr_star, WithinAbs(1.0, 1e-12));

  const auto b = optimal_feedback({1, 3}, kParams, kMonod);
  CHECK(b.alpha == 0.0);
  CHECK_THAT(b.sr_star, WithinAbs(1.0, 1e-12));

  const auto c = optimal_feedback({2, 2}, kParams, kMonod);
  CHECK(c.alpha == 0.3);
  CHECK_THAT(c.sr_star, WithinAbs(std::sqrt(3.0) - 1.0, 1e-12));

  // Inside the band the singular split is used.
  const auto near = optimal_feedback({2 + 1e-10, 2}, kParams, kMonod);
  CHECK(near.alpha == 0.3);
  const auto wide = optimal_feedback({2 + 1e-3, 2}, kParams, kMonod, 1e-2);
  CHECK(wide.alpha == 0.3);
}

TEST_CASE("optimal feedback is always admissible", "[strategies]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> conc(1e-4, 10.0);
  for (int i = 0; i < 500; ++i) {
    const State s{conc(rng), conc(rng)};
    CHECK(admissible(optimal_feedback(s, kParams, kMonod), s));
  }
}

TEST_CASE("one-pump feedback examples", "[strategies]") {
  const auto a = one_pump_feedback({3, 10}, 1, kMonod);
  CHECK(a.alpha == 1.0);
  CHECK_THAT(a.sr_star, WithinAbs(1.0, 1e-12));

  const auto b = one_pump_feedback({0.5, 4}, 2, kMonod);
  CHECK(b.alpha == 0.0);
  CHECK_THAT(b.sr_star, WithinAbs(std::sqrt(5.0) - 1.0, 1e-12));
  CHECK(b.sr_star < 4.0);

  CHECK_THROWS_AS(one_pump_feedback({1, 1}, 3, kMonod), ContractViolation);
}

TEST_CASE("homogenizing feedback examples", "[strategies]") {
  const auto a = homogenizing_feedback({2, 2}, {0.5, 0.1, 1.0});
  CHECK(a.alpha == 0.5);
  CHECK(a.sr_star == 1.0);

  const auto b = homogenizing_feedback({4, 1}, kParams);
  CHECK(b.alpha == 0.3);
  CHECK_THAT(b.sr_star, WithinAbs(0.95, 1e-15));
}

TEST_CASE("homogenizing feedback drives the mass by -mu(m/2) m/2", "[strategies]") {
  const auto traj = simulate(Homogenizing{}, {4, 1}, kParams, kMonod, {});
  REQUIRE(traj.reached());
  for (const auto& smp : traj.samples) {
    const double m = weighted_mass(smp.s, kParams.r);
    const double m_dot = kParams.r * smp.rate.ds1 + (1 - kParams.r) * smp.rate.ds2;
    CHECK(std::abs(m_dot + kMonod.mu(m / 2) * m / 2) <= 1e-12);
  }
}

TEST_CASE("constant zeta control examples", "[strategies]") {
  CHECK(constant_zeta_control({3, 1}, 0.4, 0.0).sr_star == 0.0);
  const auto zero = reduced_rhs({3, 3}, constant_zeta_control({3, 3}, 0.4, 1.0), kParams, kMonod);
  CHECK(zero.ds1 == 0.0);
  CHECK(zero.ds2 == 0.0);
  CHECK_THAT(constant_zeta_control({3, 1}, 0.5, 0.5).sr_star, WithinAbs(1.0, 1e-15));
  CHECK_THROWS_AS(constant_zeta_control({3, 1}, 1.5, 0.5), ContractViolation);
}

TEST_CASE("strategy strings round-trip", "[strategies]") {
  for (const char* text : {"optimal", "onepump:1", "onepump:2", "homog", "swapped"}) {
    CHECK(to_string(parse_strategy(text)) == text);
  }
  const auto c = std::get<ConstantZeta>(parse_strategy("const:0.25:0.5"));
  CHECK(c.alpha == 0.25);
  CHECK(c.zeta == 0.5);
  const auto s = std::get<ConstantSetpoint>(parse_strategy("constsr:1:0.7"));
  CHECK(s.alpha == 1.0);
  CHECK(s.sr_star == 0.7);
  CHECK(std::get<ConstantZeta>(parse_strategy(to_string(c))).zeta == 0.5);

  for (const char* bad : {"", "optimal2", "onepump:3", "const:0.5", "const:2:0.5", "const:a:b", "bestconst"}) {
    CHECK_THROWS_AS(parse_strategy(bad), ContractViolation);
  }
  CHECK(locks_on_diagonal(OptimalTwoPump{}));
  CHECK_FALSE(locks_on_diagonal(OnePump{1}));
  CHECK_FALSE(locks_on_diagonal(Homogenizing{}));
}

TEST_CASE("the optimal feedback beats every other strategy", "[strategies]") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> conc(1.0, 4.0), unit(0.0, 1.0);
  for (double d : {0.1, 1.0}) {
    const ReducedParams p{0.3, d, 1.0};
    for (int i = 0; i < 10; ++i) {
      State x0{conc(rng), conc(rng)};
      if (x0.s1 <= 1.0 || x0.s2 <= 1.0) continue;
      const double best = reach_time(OptimalTwoPump{}, x0, p);
      REQUIRE(std::isfinite(best));
      CHECK(best <= reach_time(OnePump{1}, x0, p) + 1e-6);
      CHECK(best <= reach_time(OnePump{2}, x0, p) + 1e-6);
      CHECK(best <= reach_time(Homogenizing{}, x0, p) + 1e-6);
      for (int k = 0; k < 50; ++k) {
        CHECK(best <= reach_time(ConstantZeta{unit(rng), unit(rng)}, x0, p) + 1e-6);
      }
    }
  }
}

TEST_CASE("one pump without diffusion never cleans the other patch", "[strategies]") {
  const ReducedParams p{0.3, 0.0, 1.0};
  const auto traj = simulate(OnePump{1}, {4, 4}, p, kMonod, {});
  CHECK_FALSE(traj.reached());
  CHECK(traj.reason == Termination::horizon);
  CHECK_THAT(traj.samples.back().s.s2, WithinAbs(4.0, 1e-12));
}

TEST_CASE("best constant search examples", "[strategies]") {
  const auto full = best_constant_search({4, 4}, kParams, kMonod);
  CHECK_THAT(full.t_f, WithinRel(5.74, 0.05));
  CHECK(full.alpha >= 0.0);
  CHECK(full.alpha <= 1.0);
  CHECK_THAT(full.sr_star, WithinAbs(constant_setpoint({4, 4}, full.alpha, full.zeta, 1.0), 1e-15));

  const auto fast = best_constant_search({1.5, 0}, {0.3, 10.0, 1.0}, kMonod);
  CHECK_THAT(fast.t_f, WithinAbs(0.01, 0.01));

  // Restricting alpha to r cannot do better than the free search.
  const double restricted = constant_candidate_time({4, 4}, kParams.r, full.zeta, kParams, kMonod, {});
  CHECK(full.t_f <= restricted);
  CHECK(full.t_f == constant_candidate_time({4, 4}, full.alpha, full.zeta, kParams, kMonod, {}));
}

TEST_CASE("best constant search is reproducible", "[strategies]") {
  const ConstantSearchConfig cfg{11, 1e-2, {}};
  const auto a = best_constant_search({4, 1.5}, kParams, kMonod, cfg);
  const auto b = best_constant_search({4, 1.5}, kParams, kMonod, cfg);
  CHECK(a.alpha == b.alpha);
  CHECK(a.zeta == b.zeta);
  CHECK(a.t_f == b.t_f);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("best constant search error cases", "[strategies]") {
  CHECK_THROWS_AS(best_constant_search({0.5, 0.5}, kParams, kMonod), ContractViolation);
  CHECK_THROWS_AS(best_constant_search({4, 4}, kParams, kMonod, {1, 1e-3, {}}), ContractViolation);
  // No diffusion, no time: nothing reaches the target.
  ConstantSearchConfig tiny{5, 0.1, {}};
  tiny.sim.t_max = 1e-3;
  CHECK_THROWS_AS(best_constant_search({4, 4}, {0.3, 0.0, 1.0}, kMonod, tiny), InfeasibleSearch);
}

TEST_CASE("failing constant candidates score infinity", "[strategies]") {
  // sr = s_bar is only approached asymptotically.
  CHECK(std::isinf(constant_candidate_time({4, 4}, 1.0, 1.0, kParams, kMonod, {})));
  // sr = 2 leaves U(s) when diffusion drags s1 below it.
  CHECK_THROWS_AS(simulate(ConstantSetpoint{1.0, 2.0}, {4, 1}, kParams, kMonod, {}), ContractViolation);
}
