#include <filesystem>
#include <fstream>

#include "catch_amalgamated.hpp"

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

using namespace bioremed;
using namespace bioremed::cli;

TEST_CASE("config text parsing", "[config]") {
  const auto kv = parse_config_text("# scenario\n params.d = 10  # fast mixing\n\nx0=4,0.5\n");
  CHECK(kv.size() == 2);
  CHECK(kv.at("params.d") == "10");
  CHECK(kv.at("x0") == "4,0.5");

  CHECK_THROWS_AS(parse_config_text("params.d = 1\nparams.d = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("params.d\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(" = 3\n"), ConfigError);
  try {
    parse_config_text("x0=1,1\n\nbogus line\n");
    FAIL("expected a failure");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("defaults mirror the reference scenario", "[config]") {
  const auto sc = build_scenario({});
  CHECK(sc.params.r == 0.3);
  CHECK(sc.params.d == 0.1);
  CHECK(sc.params.s_bar == 1.0);
  CHECK(sc.epsilon == 0.01);
  CHECK(sc.growth.mu(1.0) == 0.5);
  CHECK(sc.x0 == State{4, 1.5});
  CHECK(sc.strategy == "optimal");
  CHECK(sc.seed == 42);
  CHECK(sc.start.x_r0 == 1.0);
  CHECK_FALSE(sc.start.s_r0.has_value());
  CHECK(sc.search.grid == 41);
}

TEST_CASE("overrides and physical parameters", "[config]") {
  KeyValues kv;
  apply_override(kv, "params.d=10");
  apply_override(kv, "strategy=onepump:2");
  apply_override(kv, "growth.kind=tessier");
  const auto sc = build_scenario(kv);
  CHECK(sc.params.d == 10.0);
  CHECK(sc.strategy == "onepump:2");
  CHECK(sc.growth.describe().find("tessier") != std::string::npos);

  const auto phys = build_scenario({{"phys.v1", "3"}, {"phys.v2", "7"}, {"phys.v_r", "0.1"}, {"phys.D", "1"}});
  CHECK(phys.params.r == Catch::Approx(0.3));
  CHECK(phys.params.d == Catch::Approx(10.0));
  CHECK(phys.epsilon == Catch::Approx(0.01));
}

TEST_CASE("config errors", "[config]") {
  const std::vector<KeyValues> bad{
      {{"params.q", "1"}},
      {{"params.r", "1.5"}},
      {{"params.d", "-1"}},
      {{"params.d", "abc"}},
      {{"x0", "4"}},
      {{"x0", "-1,2"}},
      {{"strategy", "twopump"}},
      {{"full.x_r0", "0"}},
      {{"full.s_r0", "-1"}},
      {{"growth.kind", "haldane"}},
      {{"growth.ks", "0"}},
      {{"search.grid", "1"}},
      {{"seed", "1.5"}},
      {{"phys.v1", "3"}},
      {{"phys.v1", "3"}, {"phys.v2", "7"}, {"phys.v_r", "0.1"}, {"phys.D", "1"}, {"params.d", "2"}},
      {{"sim.rel_tol", "0"}},
  };
  for (const auto& kv : bad) {
    INFO(kv.begin()->first << " = " << kv.begin()->second);
    CHECK_THROWS_AS(build_scenario(kv), ConfigError);
  }
  CHECK_NOTHROW(build_scenario({{"strategy", "bestconst"}}));
}

TEST_CASE("config files", "[config]") {
  const auto dir = std::filesystem::temp_directory_path() / "bioremed_config_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "scenario.cfg";
  {
    std::ofstream out(path);
    out << "params.d = 10\nparams.s_bar = 0.1\n";
  }
  const auto sc = build_scenario(read_config_file(path));
  CHECK(sc.params.d == 10.0);
  CHECK(sc.params.s_bar == 0.1);
  CHECK_THROWS_AS(read_config_file(dir / "missing.cfg"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("scenario hash is deterministic and sensitive", "[config]") {
  const auto a = build_scenario({{"params.d", "10"}});
  const auto b = build_scenario({{"params.d", "10"}});
  const auto c = build_scenario({{"params.d", "1"}});
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash().size() == 16);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("list and point parsing", "[config]") {
  CHECK(parse_point(" 4 , 0.5 ") == State{4, 0.5});
  CHECK(parse_list("0.1,10", "d") == std::vector<double>{0.1, 10.0});
  const auto pts = parse_point_list("1.5,0;3,0");
  REQUIRE(pts.size() == 2);
  CHECK(pts[1] == State{3, 0});
  CHECK_THROWS_AS(parse_point_list(""), ConfigError);
  CHECK_THROWS_AS(parse_number("1e", "x"), ConfigError);
}

TEST_CASE("number formatting round-trips", "[config]") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(5.0) == "5");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  const double v = 3.1941234567891234;
  CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("comparison percentages", "[config]") {
  CHECK(increase_pct(5.0, 5.0) == 0.0);
  CHECK(increase_pct(6.0, 5.0) == Catch::Approx(20.0));
}

TEST_CASE("random verification states are seeded and off the diagonal", "[config]") {
  const auto a = random_states(42, 20, 1.0, 4.0);
  const auto b = random_states(42, 20, 1.0, 4.0);
  CHECK(a == b);
  for (const auto& x : a) {
    CHECK(x.s1 > 1.0);
    CHECK(x.s2 <= 4.0);
    CHECK(std::abs(x.s1 - x.s2) > 1e-3);
  }
  CHECK(random_states(7, 20, 1.0, 4.0) != a);
}
