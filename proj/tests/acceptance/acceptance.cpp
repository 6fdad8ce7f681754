// Acceptance gate: one PASS/FAIL line per criterion, details for failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bioremed/errors.hpp"
#include "bioremed/pmp_verify.hpp"
#include "bioremed/search.hpp"
#include "bioremed/simulate.hpp"
#include "bioremed/value.hpp"
#include "commands.hpp"
#include "config.hpp"

using namespace bioremed;

namespace {

// Tolerances, pinned.
constexpr double kTableVdRel = 0.03;
constexpr double kTableOneRel = 0.03;
constexpr double kTableCstRel = 0.05;
constexpr double kTableFloorHours = 0.05;  // printed values carry two decimals
constexpr double kTableRuntimeSec = 60.0;
constexpr double kClosedRel = 1e-4;
constexpr double kDiagonalRel = 1e-3;
constexpr double kVinfVsLargeD = 0.02;
constexpr double kEtaDotTol = 1e-5;
constexpr double kHjbTol = 1e-9;
constexpr double kFullRel = 0.05;

struct Result {
  bool pass = true;
  std::vector<std::string> details;

  void fail(std::string msg) {
    pass = false;
    details.push_back(std::move(msg));
  }
  void note(std::string msg) { details.push_back(std::move(msg)); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Published table, per s_bar: rows x0, columns (d=0.1, d=10).
struct Row {
  State x0;
  double vd[2], cst[2], one[2];
};

const std::vector<Row> kTop = {
    {{1.5, 0}, {0.42, 0.01}, {0.42, 0.01}, {0.42, 0.01}},
    {{3, 0}, {1.01, 0.06}, {1.05, 0.06}, {1.01, 0.06}},
    {{4, 0.5}, {1.33, 2.17}, {1.39, 2.23}, {1.37, 2.21}},
    {{4, 1.5}, {3.20, 3.65}, {3.67, 3.75}, {8.27, 3.72}},
    {{4, 4}, {5.45, 5.45}, {5.74, 5.71}, {18.25, 5.53}},
};

const std::vector<Row> kBottom = {
    {{1.5, 0}, {25.95, 34.12}, {38.65, 38.81}, {34.03, 34.14}},
    {{3, 0}, {32.91, 39.91}, {50.08, 50.12}, {45.89, 40.15}},
    {{4, 0.5}, {41.08, 42.86}, {58.65, 58.02}, {61.51, 42.94}},
    {{4, 1.5}, {43.69, 44.37}, {63.59, 63.28}, {70.81, 44.49}},
    {{4, 4}, {45.94, 45.94}, {71.67, 71.04}, {81.58, 46.17}},
};

constexpr double kDs[2] = {0.1, 10.0};

struct TableRun {
  std::vector<cli::CompareCell> cells;  // row-major, d fastest
  double seconds = 0.0;
};

TableRun run_table(const cli::Scenario& sc, const std::vector<Row>& rows, double s_bar) {
  TableRun out;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& row : rows) {
    for (const double d : kDs) out.cells.push_back(cli::compare_cell(sc, row.x0, d, s_bar));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void check_value(Result& res, const char* col, const Row& row, double d, double s_bar,
                 const std::optional<double>& got, double want, double rel) {
  const double tol = std::max(rel * want, kTableFloorHours);
  const std::string where = fmt("%s s_bar=%g x0=(%g,%g) d=%g", col, s_bar, row.x0.s1, row.x0.s2, d);
  if (!got) {
    res.fail(where + ": no value");
    return;
  }
  if (!(std::abs(*got - want) <= tol)) {
    res.fail(fmt("%s: got %.4f want %.2f (|diff| %.4f > tol %.4f, %+.2f%%)", where.c_str(), *got, want,
                 std::abs(*got - want), tol, 100.0 * (*got - want) / want));
  }
}

enum class Column { vd, one, cst };

Result table_column(const TableRun& run, const std::vector<Row>& rows, double s_bar, Column col) {
  Result res;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < 2; ++k) {
      const auto& cell = run.cells[2 * i + k];
      if (!cell.error.empty() && col == Column::vd) {
        res.fail(fmt("s_bar=%g x0=(%g,%g) d=%g: %s", s_bar, rows[i].x0.s1, rows[i].x0.s2, kDs[k], cell.error.c_str()));
        continue;
      }
      switch (col) {
        case Column::vd:
          check_value(res, "V_d", rows[i], kDs[k], s_bar, cell.vd, rows[i].vd[k], kTableVdRel);
          break;
        case Column::one:
          check_value(res, "T*_one", rows[i], kDs[k], s_bar, cell.one_patch1, rows[i].one[k], kTableOneRel);
          break;
        case Column::cst: {
          std::optional<double> t;
          if (cell.cst) t = cell.cst->t_f;
          check_value(res, "T*_cst", rows[i], kDs[k], s_bar, t, rows[i].cst[k], kTableCstRel);
          break;
        }
      }
    }
  }
  return res;
}

Result closed_form(const cli::Scenario& sc) {
  Result res;
  const GrowthModel& g = sc.growth;
  ReducedParams p = sc.params;
  const TimeFunction time(g, p.s_bar);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  p.d = 0.0;
  for (int i = 0; i < 25; ++i) {
    const State x{u(rng), u(rng)};
    const double sim = vd_sim(x, p, g, sc.sim);
    const double ref = v0_closed(x, time, p.r);
    if (!(std::abs(sim - ref) <= kClosedRel * ref || std::abs(sim - ref) <= 1e-12)) {
      res.fail(fmt("vd_sim(%.4f,%.4f; d=0) = %.8f vs v0 %.8f", x.s1, x.s2, sim, ref));
    }
  }

  const double t4 = time(4.0);
  for (const double d : {0.0, 0.1, 10.0}) {
    p.d = d;
    const double sim = vd_sim({4, 4}, p, g, sc.sim);
    if (!(std::abs(sim - t4) <= kDiagonalRel * t4)) res.fail(fmt("vd_sim(4,4; d=%g) = %.6f vs T(4) = %.6f", d, sim, t4));
  }

  const double vinf = vinf_closed({4, 0.5}, time, p.r);
  const double published = 2.17;
  res.note(fmt("vinf(4,0.5) = %.6f, published d=10 value %.2f (%+.2f%%)", vinf, published,
               100.0 * (vinf - published) / published));
  if (!(std::abs(vinf - published) <= kVinfVsLargeD * published)) res.fail("vinf(4,0.5) outside 2% of 2.17");
  return res;
}

Result property_suites(const cli::Scenario& sc) {
  Result res;
  const GrowthModel& g = sc.growth;
  const auto with_d = [&](double d) {
    ReducedParams p = sc.params;
    p.d = d;
    return p;
  };
  const TimeFunction time(g, sc.params.s_bar);
  const double r = sc.params.r;
  const double sb = sc.params.s_bar;

  // Positive invariance and nonincreasing weighted mass.
  {
    const std::vector<Strategy> strategies = {OptimalTwoPump{}, OnePump{1},           OnePump{2},
                                              Homogenizing{},   ConstantZeta{0.4, 0.5}, ConstantZeta{0.9, 0.2}};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> conc(0.0, 4.0);
    std::size_t bad = 0;
    for (const double d : {0.0, 0.1, 1.0, 10.0}) {
      for (int trial = 0; trial < 3; ++trial) {
        const State x0{conc(rng) + 1.0, conc(rng)};
        for (const auto& strategy : strategies) {
          SimConfig c = sc.sim;
          c.t_max = 40.0;
          const auto traj = simulate(strategy, x0, with_d(d), g, c);
          for (std::size_t k = 0; k < traj.samples.size(); ++k) {
            const State s = traj.samples[k].s;
            bool ok = s.s1 >= -c.abs_tol && s.s2 >= -c.abs_tol;
            if (k > 0) ok = ok && weighted_mass(s, r) <= weighted_mass(traj.samples[k - 1].s, r) + c.abs_tol;
            if (!ok) ++bad;
          }
        }
      }
    }
    if (bad) res.fail(fmt("positivity/mass: %zu violating samples", bad));
  }

  // L = (s1 - s2)^2 / 2 decays at least at rate 2d / (r (1 - r)) along optimal runs.
  {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> conc(1.0, 5.0);
    double worst = -INFINITY;
    for (const double d : {0.0, 0.1, 1.0, 10.0}) {
      const double k = 2.0 * d / (r * (1 - r));
      for (int trial = 0; trial < 5; ++trial) {
        const auto traj = simulate(OptimalTwoPump{}, {conc(rng), conc(rng)}, with_d(d), g, sc.sim);
        for (const auto& smp : traj.samples) {
          const double gap = smp.s.s1 - smp.s.s2;
          worst = std::max(worst, gap * (smp.rate.ds1 - smp.rate.ds2) + k * 0.5 * gap * gap);
        }
      }
    }
    if (!(worst <= 1e-12)) res.fail(fmt("L-decay: max(L' + kL) = %.3e", worst));
  }

  const auto offdiag = [](std::uint64_t seed, int n, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<State> out;
    while (static_cast<int>(out.size()) < n) {
      const State x{u(rng), u(rng)};
      if (std::abs(x.s1 - x.s2) > 1e-2) out.push_back(x);
    }
    return out;
  };

  // V_d increasing in d above the threshold.
  for (const State& x : offdiag(23, 10, sb + 0.2, 4.0)) {
    const double a = vd_sim(x, with_d(0.1), g, sc.sim);
    const double b = vd_sim(x, with_d(1.0), g, sc.sim);
    const double c = vd_sim(x, with_d(10.0), g, sc.sim);
    if (!(a < b && b < c)) res.fail(fmt("monotone in d at (%.4f,%.4f): %.6f %.6f %.6f", x.s1, x.s2, a, b, c));
  }

  // V0 <= V_d < Vinf above the threshold, and its failure with a clean patch.
  for (const State& x : offdiag(29, 10, sb, 4.0)) {
    for (const double d : {0.1, 1.0, 10.0}) {
      const double vd = vd_sim(x, with_d(d), g, sc.sim);
      const double lo = v0_closed(x, time, r), hi = vinf_closed(x, time, r);
      if (!(lo <= vd + 1e-9 && vd < hi - 1e-6)) {
        res.fail(fmt("sandwich at (%.4f,%.4f) d=%g: %.6f <= %.6f < %.6f", x.s1, x.s2, d, lo, vd, hi));
      }
    }
  }
  {
    const State x{1.5, 0.0};
    const double vd = vd_sim(x, with_d(10.0), g, sc.sim), lo = v0_closed(x, time, r);
    res.note(fmt("sandwich failure at (1.5,0), d=10: V_d = %.4f < V0 = %.4f", vd, lo));
    if (!(vd < lo)) res.fail("expected V_d < V0 at (1.5,0), d=10");
  }

  // Diagonal arrival time and concentration bounds.
  {
    const std::vector<double> ds{0.1, 1.0, 10.0};
    const auto xs = offdiag(31, 20, sb, 4.0);
    std::size_t met = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto p = with_d(ds[i % ds.size()]);
      const auto traj = simulate(OptimalTwoPump{}, xs[i], p, g, sc.sim);
      if (!traj.reached()) {
        res.fail(fmt("bounds run (%.4f,%.4f) did not reach the target", xs[i].s1, xs[i].s2));
        continue;
      }
      if (!traj.t_delta) continue;  // left through a side first
      ++met;
      const double td = *traj.t_delta;
      const double bound = t_delta_bound(xs[i], p, g).bound;
      const State s = traj.state_at(td);
      const auto range = s_delta_sandwich(xs[i], td, p, g);
      if (!(td <= bound)) res.fail(fmt("t_delta %.6f > bound %.6f at (%.4f,%.4f)", td, bound, xs[i].s1, xs[i].s2));
      if (!(range.lower <= s.s1 + 1e-9 && s.s1 <= range.upper + 1e-9)) {
        res.fail(fmt("s(t_delta) = %.6f outside [%.6f, %.6f]", s.s1, range.lower, range.upper));
      }
    }
    res.note(fmt("%zu of %zu bound runs met the diagonal", met, xs.size()));
  }
  return res;
}

Result pmp(const cli::Scenario& sc) {
  Result res;
  const auto xs = cli::random_states(sc.seed, 20, sc.params.s_bar, 4.0);
  const double ds[] = {0.1, 1.0, 10.0};
  std::size_t passed = 0, corrupt_failed = 0;
  double worst_eta_dot = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ReducedParams p = sc.params;
    p.d = ds[i % 3];
    const auto rep = check_extremal(simulate(OptimalTwoPump{}, xs[i], p, sc.growth, sc.sim), p, sc.growth, {}, sc.sim);
    worst_eta_dot = std::max(worst_eta_dot, rep.max_eta_dot_error);
    if (rep.pass && rep.max_eta_dot_error <= kEtaDotTol) {
      ++passed;
    } else {
      res.fail(fmt("x0=(%.5f,%.5f) d=%g: sign %.2e branch %zu forbidden %zu eta_dot %.2e changes %zu", xs[i].s1,
                   xs[i].s2, p.d, rep.max_sign_violation, rep.branch_violations, rep.forbidden_visits,
                   rep.max_eta_dot_error, rep.sign_changes));
    }
    const auto bad = check_extremal(simulate(SwappedBranches{}, xs[i], p, sc.growth, sc.sim), p, sc.growth, {}, sc.sim);
    if (!bad.pass) ++corrupt_failed;
  }
  res.note(fmt("optimal: %zu/%zu extremal, max |eta_dot - fd| = %.2e", passed, xs.size(), worst_eta_dot));
  res.note(fmt("swapped branches: %zu/%zu rejected", corrupt_failed, xs.size()));
  if (corrupt_failed != xs.size()) res.fail("a swapped-branch run passed the extremal check");
  return res;
}

Result hjb(const cli::Scenario& sc) {
  Result res;
  const auto s = cli::hjb_suite(sc, 50, 20, 5.0);
  res.note(fmt("max |res| = %.3e over %zu grid + %zu kink points", s.max_abs_residual, s.grid_points, s.kink_points));
  if (!(s.max_abs_residual < kHjbTol)) res.fail("HJB residual too large");
  return res;
}

Result full_model(const cli::Scenario& sc) {
  Result res;
  ReducedParams p = sc.params;
  p.d = 0.1;
  const State x0{4, 1.5};
  const double vd = vd_sim(x0, p, sc.growth, sc.sim);
  double prev = INFINITY, last = INFINITY;
  for (const double eps : {0.1, 0.01, 0.001}) {
    const auto traj = simulate_full(OptimalTwoPump{}, x0, {p, eps}, sc.growth, sc.sim, sc.start);
    if (!traj.reached()) {
      res.fail(fmt("eps=%g did not reach the target", eps));
      return res;
    }
    const double gap = std::abs(*traj.t_f - vd);
    res.note(fmt("eps=%g: t_f = %.5f, V_d = %.5f, gap %.5f", eps, *traj.t_f, vd, gap));
    if (!(gap < prev)) res.fail(fmt("gap not decreasing at eps=%g", eps));
    prev = last = gap;
  }
  if (!(last <= kFullRel * vd)) res.fail(fmt("eps=0.001 gap %.4f above 5%% of V_d", last));
  return res;
}

}  // namespace

int main() {
  const cli::Scenario sc = cli::build_scenario({});
  int failures = 0;
  const auto report = [&](const char* name, const Result& r) {
    std::printf("%s %s\n", r.pass ? "PASS" : "FAIL", name);
    if (!r.pass) ++failures;
    for (const auto& line : r.details) std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
  };
  const auto guarded = [&](const char* name, const std::function<Result()>& f) {
    try {
      report(name, f());
    } catch (const std::exception& e) {
      Result r;
      r.fail(std::string("exception: ") + e.what());
      report(name, r);
    }
  };

  const TableRun top = run_table(sc, kTop, 1.0);
  const TableRun bottom = run_table(sc, kBottom, 0.1);
  const double seconds = top.seconds + bottom.seconds;

  guarded("table-top V_d (s_bar=1)", [&] {
    Result r = table_column(top, kTop, 1.0, Column::vd);
    r.note(fmt("both tables computed in %.1f s", seconds));
    if (!(seconds < kTableRuntimeSec)) r.fail("runtime limit exceeded");
    return r;
  });
  guarded("table-bottom V_d (s_bar=0.1)", [&] { return table_column(bottom, kBottom, 0.1, Column::vd); });
  guarded("table T*_one and T*_cst columns", [&] {
    Result r;
    for (const auto& part : {table_column(top, kTop, 1.0, Column::one), table_column(bottom, kBottom, 0.1, Column::one),
                             table_column(top, kTop, 1.0, Column::cst),
                             table_column(bottom, kBottom, 0.1, Column::cst)}) {
      if (!part.pass) r.pass = false;
      r.details.insert(r.details.end(), part.details.begin(), part.details.end());
    }
    return r;
  });
  guarded("closed-form consistency", [&] { return closed_form(sc); });
  guarded("property suites", [&] { return property_suites(sc); });
  guarded("Pontryagin extremal verification", [&] { return pmp(sc); });
  guarded("HJB residual of W0", [&] { return hjb(sc); });
  guarded("slow-fast model convergence", [&] { return full_model(sc); });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
