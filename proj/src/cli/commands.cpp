#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "bioremed/errors.hpp"
#include "bioremed/value.hpp"
#include "output.hpp"

namespace bioremed::cli {

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("-c,--config", common.config_path, "Scenario file of dotted key=value lines");
  sub->add_option("--set", common.overrides, "Override a config key, e.g. --set params.d=10")->take_all();
}

Scenario load(const Common& common) {
  KeyValues kv = common.config_path.empty() ? KeyValues{} : read_config_file(common.config_path);
  for (const auto& o : common.overrides) apply_override(kv, o);
  return build_scenario(kv);
}

nlohmann::json metadata(const Scenario& sc, std::string_view command) {
  return {{"command", std::string(command)},
          {"config_hash", sc.hash()},
          {"growth", sc.growth.describe()},
          {"units", {{"time", "h"}, {"concentration", "g/L"}, {"d", "1/h"}}}};
}

void emit_json(const std::string& path, const nlohmann::json& j) {
  if (!path.empty()) write_text(path, j.dump(2) + "\n");
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

// Runs `f`, reporting contract violations as configuration errors.
template <class F>
auto as_config(F&& f) {
  try {
    return f();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
}

Strategy resolve_strategy(const Scenario& sc, const std::string& text, State x0, std::string& note) {
  if (text != "bestconst") return as_config([&] { return parse_strategy(text); });
  const auto best = best_constant_search(x0, sc.params, sc.growth, sc.search);
  std::ostringstream out;
  out << "bestconst: alpha=" << format_number(best.alpha) << " zeta=" << format_number(best.zeta)
      << " sr_star=" << format_number(best.sr_star);
  note = out.str();
  return ConstantSetpoint{best.alpha, best.sr_star};
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  Common common;
  std::string strategy;
  std::string x0;
  std::string out_csv;
  std::string out_json;
};

int cmd_simulate(const SimulateOpts& o) {
  Scenario sc = load(o.common);
  const State x0 = o.x0.empty() ? sc.x0 : parse_point(o.x0);
  const std::string text = o.strategy.empty() ? sc.strategy : o.strategy;
  std::string note;
  const Strategy strategy = resolve_strategy(sc, text, x0, note);
  const Trajectory traj = simulate(strategy, x0, sc.params, sc.growth, sc.sim);

  if (!o.out_csv.empty()) {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_text(o.out_csv, csv.str());
  }
  nlohmann::json j = events_json(traj);
  j["metadata"] = metadata(sc, "simulate");
  j["strategy"] = to_string(strategy);
  j["x0"] = {x0.s1, x0.s2};
  emit_json(o.out_json, j);

  if (!note.empty()) std::cout << note << '\n';
  std::cout << "strategy " << to_string(strategy) << ", x0 = (" << format_number(x0.s1) << ", "
            << format_number(x0.s2) << ")\n";
  std::cout << "t_delta = " << (traj.t_delta ? format_number(*traj.t_delta) + " h" : "none") << '\n';
  std::cout << "t_f = " << (traj.t_f ? format_number(*traj.t_f) + " h" : "none") << '\n';
  std::cout << "reason = " << to_string(traj.reason) << '\n';
  return traj.reached() ? kOk : kHorizon;
}

// ---------------------------------------------------------------- value

struct ValueOpts {
  Common common;
  std::string which = "vd";
  std::optional<double> d;
  std::string point;
  bool grid = false;
  std::string domain = "0,5,0,5";
  std::string resolution = "51,51";
  std::string out_csv;
  std::string out_json;
};

int cmd_value(const ValueOpts& o) {
  Scenario sc = load(o.common);
  if (o.d) sc.params.d = *o.d;
  as_config([&] { sc.params.validate(); });
  const ValueKind which = as_config([&] { return parse_value_kind(o.which); });
  if (o.grid == !o.point.empty()) throw ConfigError("value: give exactly one of --point or --grid");

  if (!o.grid) {
    const State x = parse_point(o.point);
    const TimeFunction time(sc.growth, sc.params.s_bar);
    const double v = value_at(which, x, sc.params, sc.growth, time, sc.sim);
    std::cout << format_number(v) << '\n';
    nlohmann::json j{{"which", std::string(to_string(which))}, {"point", {x.s1, x.s2}}, {"value", v},
                     {"d", sc.params.d}, {"metadata", metadata(sc, "value")}};
    emit_json(o.out_json, j);
    return kOk;
  }

  const auto dom = parse_list(o.domain, "--domain");
  const auto res = parse_list(o.resolution, "--n");
  if (dom.size() != 4 || res.size() != 2) throw ConfigError("--domain needs lo1,hi1,lo2,hi2 and --n needs n1,n2");
  for (const double n : res) {
    if (n < 2.0 || n != std::floor(n)) throw ConfigError("--n entries must be integers >= 2");
  }
  const GridDomain domain{dom[0], dom[1], dom[2], dom[3], static_cast<std::size_t>(res[0]),
                          static_cast<std::size_t>(res[1])};
  as_config([&] { domain.validate(); });
  const ValueGrid grid = value_grid(which, domain, sc.params, sc.growth, sc.sim);
  std::ostringstream csv;
  write_grid_csv(csv, grid);
  if (o.out_csv.empty()) {
    std::cout << csv.str();
  } else {
    write_text(o.out_csv, csv.str());
  }
  nlohmann::json j = grid_metadata(grid);
  j["metadata"] = metadata(sc, "value");
  emit_json(o.out_json, j);
  return kOk;
}

// ---------------------------------------------------------------- compare

struct CompareOpts {
  Common common;
  std::string x0_list = "1.5,0;3,0;4,0.5;4,1.5;4,4";
  std::string d_list = "0.1,10";
  std::string sbar_list = "1,0.1";
  std::string out_json;
};

int cmd_compare(const CompareOpts& o) {
  const Scenario sc = load(o.common);
  const auto points = parse_point_list(o.x0_list);
  const auto ds = parse_list(o.d_list, "--d-list");
  const auto sbars = parse_list(o.sbar_list, "--sbar-list");

  std::vector<CompareCell> cells;
  for (const double sb : sbars) {
    for (const State& x : points) {
      for (const double d : ds) cells.push_back(compare_cell(sc, x, d, sb));
    }
  }
  std::cout << compare_table(cells, ds, sbars);

  nlohmann::json j{{"metadata", metadata(sc, "compare")}, {"r", sc.params.r}, {"cells", nlohmann::json::array()}};
  bool all_ok = true;
  for (const auto& c : cells) {
    j["cells"].push_back(compare_cell_json(c));
    all_ok = all_ok && c.ok();
  }
  emit_json(o.out_json, j);
  return all_ok ? kOk : kPartialFailure;
}

// ---------------------------------------------------------------- verify

struct VerifyOpts {
  Common common;
  std::string x0_list;
  std::size_t random = 20;
  std::optional<std::uint64_t> seed;
  std::string d_list = "0.1,1,10";
  bool corrupt = false;
  std::size_t hjb_n = 50;
  std::size_t hjb_kinks = 20;
  std::string out_json;
};

nlohmann::json report_json(const VerifyScenario& v) {
  const auto& r = v.report;
  return {{"x0", {v.x0.s1, v.x0.s2}},
          {"d", v.d},
          {"reached", r.reached},
          {"samples", r.samples.size()},
          {"max_sign_violation", r.max_sign_violation},
          {"branch_violations", r.branch_violations},
          {"max_eta_dot_error", r.max_eta_dot_error},
          {"forbidden_visits", r.forbidden_visits},
          {"sign_changes", r.sign_changes},
          {"pass", r.pass}};
}

int cmd_verify(const VerifyOpts& o) {
  Scenario sc = load(o.common);
  const std::uint64_t seed = o.seed.value_or(sc.seed);
  const auto ds = parse_list(o.d_list, "--d-list");
  if (ds.empty()) throw ConfigError("--d-list is empty");
  const std::vector<State> points = o.x0_list.empty() ? random_states(seed, o.random, sc.params.s_bar, 4.0)
                                                      : parse_point_list(o.x0_list);

  const Strategy strategy = o.corrupt ? Strategy{SwappedBranches{}} : Strategy{OptimalTwoPump{}};
  std::vector<VerifyScenario> runs(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    runs[i].x0 = points[i];
    runs[i].d = ds[i % ds.size()];
  }
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(runs.size()); ++i) {
    ReducedParams p = sc.params;
    p.d = runs[i].d;
    const Trajectory traj = simulate(strategy, runs[i].x0, p, sc.growth, sc.sim);
    runs[i].report = check_extremal(traj, p, sc.growth, {}, sc.sim);
  }

  const HjbSummary hjb = hjb_suite(sc, o.hjb_n, o.hjb_kinks, 5.0);
  const bool hjb_ok = hjb.max_abs_residual < 1e-9;

  std::size_t passed = 0;
  nlohmann::json j{{"metadata", metadata(sc, "verify")},
                   {"seed", seed},
                   {"strategy", to_string(strategy)},
                   {"scenarios", nlohmann::json::array()}};
  for (const auto& r : runs) {
    passed += r.report.pass ? 1 : 0;
    j["scenarios"].push_back(report_json(r));
  }
  j["hjb"] = {{"grid_points", hjb.grid_points},
              {"kink_points", hjb.kink_points},
              {"max_abs_residual", hjb.max_abs_residual},
              {"pass", hjb_ok}};
  const bool ok = passed == runs.size() && hjb_ok;
  j["pass"] = ok;
  emit_json(o.out_json, j);

  std::cout << "extremal checks: " << passed << "/" << runs.size() << " pass (strategy " << to_string(strategy)
            << ", seed " << seed << ")\n";
  for (const auto& r : runs) {
    if (r.report.pass) continue;
    std::cout << "  FAIL x0=(" << fixed(r.x0.s1, 4) << ", " << fixed(r.x0.s2, 4) << ") d=" << format_number(r.d)
              << " reached=" << r.report.reached << " branch_violations=" << r.report.branch_violations
              << " max_eta_dot_error=" << format_number(r.report.max_eta_dot_error) << '\n';
  }
  std::cout << "HJB residual of W0: max |res| = " << format_number(hjb.max_abs_residual) << " over "
            << hjb.grid_points << " grid + " << hjb.kink_points << " kink points (" << (hjb_ok ? "pass" : "FAIL")
            << ")\n";
  return ok ? kOk : kVerificationFailure;
}

// ---------------------------------------------------------------- full

struct FullOpts {
  Common common;
  std::string eps_list = "0.1,0.01,0.001";
  std::string x0;
  std::string out_prefix;
  std::string out_json;
};

int cmd_full(const FullOpts& o) {
  const Scenario sc = load(o.common);
  const State x0 = o.x0.empty() ? sc.x0 : parse_point(o.x0);
  const auto eps = parse_list(o.eps_list, "--eps-list");
  const Strategy strategy =
      as_config([&] { return parse_strategy(sc.strategy == "bestconst" ? "optimal" : sc.strategy); });
  const double vd = vd_sim(x0, sc.params, sc.growth, sc.sim);

  std::vector<FullRun> runs(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw ConfigError("--eps-list entries must be positive");
    runs[i].epsilon = eps[i];
    runs[i].traj = simulate_full(strategy, x0, {sc.params, eps[i]}, sc.growth, sc.sim, sc.start);
  }

  nlohmann::json j{{"metadata", metadata(sc, "full")},
                   {"x0", {x0.s1, x0.s2}},
                   {"strategy", to_string(strategy)},
                   {"vd", vd},
                   {"runs", nlohmann::json::array()}};
  bool all_reached = true;
  std::cout << "reduced V_d = " << format_number(vd) << " h\n";
  std::cout << "epsilon        t_f (slow, h)    gap to V_d (h)\n";
  for (const auto& run : runs) {
    const auto& tr = run.traj;
    all_reached = all_reached && tr.reached();
    nlohmann::json r = events_json(tr);
    r["epsilon"] = run.epsilon;
    r["t_f_fast"] = tr.t_f ? nlohmann::json(*tr.t_f / run.epsilon) : nlohmann::json(nullptr);
    r["gap_to_vd"] = tr.t_f ? nlohmann::json(*tr.t_f - vd) : nlohmann::json(nullptr);
    j["runs"].push_back(r);
    std::cout << format_number(run.epsilon) << "    " << (tr.t_f ? fixed(*tr.t_f, 6) : "horizon") << "    "
              << (tr.t_f ? fixed(*tr.t_f - vd, 6) : "-") << '\n';
    if (!o.out_prefix.empty()) {
      std::ostringstream csv;
      write_trajectory_csv(csv, tr);
      write_text(o.out_prefix + "_eps" + format_number(run.epsilon) + ".csv", csv.str());
    }
  }
  bool monotone = all_reached;
  for (std::size_t i = 1; monotone && i < runs.size(); ++i) {
    if (runs[i].epsilon < runs[i - 1].epsilon) {
      monotone = std::abs(*runs[i].traj.t_f - vd) < std::abs(*runs[i - 1].traj.t_f - vd);
    }
  }
  j["gap_monotone_in_epsilon"] = monotone;
  emit_json(o.out_json, j);
  std::cout << "gap shrinks as epsilon decreases: " << (monotone ? "yes" : "no") << '\n';
  return all_reached ? kOk : kHorizon;
}

// ---------------------------------------------------------------- gamma

struct GammaOpts {
  Common common;
  double sigma_max = 10.0;
  std::size_t n = 101;
  std::string out_csv;
};

int cmd_gamma(const GammaOpts& o) {
  const Scenario sc = load(o.common);
  if (!(o.sigma_max > 0.0) || o.n < 2) throw ConfigError("gamma: need --sigma-max > 0 and --n >= 2");
  const TimeFunction time(sc.growth, sc.params.s_bar);
  std::ostringstream csv;
  csv << "sigma,mu,shat,gamma,gamma_prime,T\n";
  for (std::size_t i = 0; i < o.n; ++i) {
    const double sigma = i + 1 == o.n ? o.sigma_max : o.sigma_max * static_cast<double>(i) / (o.n - 1);
    const bool pos = sigma > 0.0;
    csv << format_number(sigma) << ',' << format_number(sc.growth.mu(sigma)) << ','
        << format_number(pos ? optimal_setpoint(sc.growth, sigma) : 0.0) << ','
        << format_number(pos ? max_removal_rate(sc.growth, sigma) : 0.0) << ','
        << format_number(pos ? max_removal_rate_slope(sc.growth, sigma) : 0.0) << ','
        << format_number(time(sigma)) << '\n';
  }
  if (o.out_csv.empty()) {
    std::cout << csv.str();
  } else {
    write_text(o.out_csv, csv.str());
  }
  return kOk;
}

}  // namespace

std::optional<double> CompareCell::one_better() const {
  if (one_patch1 && one_patch2) return std::min(*one_patch1, *one_patch2);
  return one_patch1 ? one_patch1 : one_patch2;
}

double increase_pct(double t, double v) { return v > 0.0 ? (t - v) / v * 100.0 : 0.0; }

CompareCell compare_cell(const Scenario& sc, State x0, double d, double s_bar) {
  CompareCell cell{x0, d, s_bar, {}, {}, {}, {}, {}};
  ReducedParams p = sc.params;
  p.d = d;
  p.s_bar = s_bar;
  try {
    p.validate();
    cell.vd = vd_sim(x0, p, sc.growth, sc.sim);
    const auto one = [&](int patch) -> std::optional<double> {
      const Trajectory tr = simulate(OnePump{patch}, x0, p, sc.growth, sc.sim);
      return tr.t_f;
    };
    cell.one_patch1 = one(1);
    cell.one_patch2 = one(2);
    if (std::max(x0.s1, x0.s2) <= s_bar) {
      cell.cst = ConstantSearchResult{};
    } else {
      cell.cst = best_constant_search(x0, p, sc.growth, sc.search);
    }
    if (!cell.one_patch1) cell.error = "one-pump (patch 1) did not reach the target";
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

nlohmann::json compare_cell_json(const CompareCell& c) {
  nlohmann::json j{{"x0", {c.x0.s1, c.x0.s2}}, {"d", c.d}, {"s_bar", c.s_bar}, {"vd", opt_json(c.vd)}};
  if (c.cst) {
    j["t_cst"] = {{"t_f", c.cst->t_f},
                  {"alpha", c.cst->alpha},
                  {"zeta", c.cst->zeta},
                  {"sr_star", c.cst->sr_star},
                  {"evaluations", c.cst->evaluations}};
  } else {
    j["t_cst"] = nullptr;
  }
  j["t_one"] = opt_json(c.one_patch1);
  j["t_one_patch2"] = opt_json(c.one_patch2);
  j["t_one_better"] = opt_json(c.one_better());
  nlohmann::json inc;
  inc["t_cst"] = (c.vd && c.cst) ? nlohmann::json(increase_pct(c.cst->t_f, *c.vd)) : nlohmann::json(nullptr);
  inc["t_one"] = (c.vd && c.one_patch1) ? nlohmann::json(increase_pct(*c.one_patch1, *c.vd)) : nlohmann::json(nullptr);
  j["increase_pct"] = inc;
  j["status"] = c.ok() ? "ok" : "failed";
  if (!c.ok()) j["error"] = c.error;
  return j;
}

std::string compare_table(const std::vector<CompareCell>& cells, const std::vector<double>& d_list,
                          const std::vector<double>& sbar_list) {
  std::ostringstream out;
  const auto find = [&](State x, double d, double sb) -> const CompareCell* {
    for (const auto& c : cells) {
      if (c.x0 == x && c.d == d && c.s_bar == sb) return &c;
    }
    return nullptr;
  };
  std::vector<State> points;
  for (const auto& c : cells) {
    if (std::find(points.begin(), points.end(), c.x0) == points.end()) points.push_back(c.x0);
  }
  char buf[64];
  for (const double sb : sbar_list) {
    out << "s_bar = " << format_number(sb) << " g/L, times in h\n";
    out << "s(0)          ";
    for (const char* col : {"V_d", "T*_cst", "T*_one"}) {
      for (const double d : d_list) {
        std::snprintf(buf, sizeof buf, "%-8s d=%-6s", col, format_number(d).c_str());
        out << buf;
      }
    }
    out << '\n';
    for (const State& x : points) {
      std::snprintf(buf, sizeof buf, "(%s,%s)", format_number(x.s1).c_str(), format_number(x.s2).c_str());
      std::string row = buf;
      row.resize(14, ' ');
      std::string inc(14, ' ');
      const auto cell_text = [&](const std::optional<double>& v, const std::optional<double>& ref) {
        std::snprintf(buf, sizeof buf, "%-17s", v ? fixed(*v, 3).c_str() : "-");
        row += buf;
        if (v && ref) {
          std::snprintf(buf, sizeof buf, "(+%.2f%%)", increase_pct(*v, *ref));
          std::string s = buf;
          s.resize(17, ' ');
          inc += s;
        } else {
          inc += std::string(17, ' ');
        }
      };
      for (const double d : d_list) {
        const CompareCell* c = find(x, d, sb);
        cell_text(c ? c->vd : std::nullopt, std::nullopt);
      }
      for (const double d : d_list) {
        const CompareCell* c = find(x, d, sb);
        cell_text(c && c->cst ? std::optional<double>(c->cst->t_f) : std::nullopt, c ? c->vd : std::nullopt);
      }
      for (const double d : d_list) {
        const CompareCell* c = find(x, d, sb);
        cell_text(c ? c->one_patch1 : std::nullopt, c ? c->vd : std::nullopt);
      }
      out << row << '\n' << inc << '\n';
      for (const double d : d_list) {
        const CompareCell* c = find(x, d, sb);
        if (c && !c->ok()) out << "  error at d=" << format_number(d) << ": " << c->error << '\n';
      }
    }
    out << '\n';
  }
  return out.str();
}

std::vector<State> random_states(std::uint64_t seed, std::size_t count, double s_bar, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(s_bar, hi);
  std::vector<State> out;
  while (out.size() < count) {
    const State s{dist(rng), dist(rng)};
    if (s.s1 > s_bar && s.s2 > s_bar && std::abs(s.s1 - s.s2) > 1e-3) out.push_back(s);
  }
  return out;
}

HjbSummary hjb_suite(const Scenario& sc, std::size_t n, std::size_t kinks, double hi) {
  ReducedParams p = sc.params;
  p.d = 0.0;
  const double sb = p.s_bar;
  HjbSummary out;
  const auto record = [&](State x) {
    for (const double r : hjb_residuals_v0(x, p, sc.growth)) {
      out.max_abs_residual = std::max(out.max_abs_residual, std::abs(r));
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      record({sb + (hi - sb) * (i + 1.0) / n, sb + (hi - sb) * (j + 1.0) / n});
      ++out.grid_points;
    }
  }
  const std::size_t per_line = (kinks + 1) / 2;
  for (std::size_t k = 0; k < kinks; ++k) {
    const double v = sb + (hi - sb) * ((k % per_line) + 1.0) / per_line;
    record(k < per_line ? State{sb, v} : State{v, sb});
    ++out.kink_points;
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Minimal-time decontamination of a two-patch water resource by a side bioreactor"};
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* s = app.add_subcommand("simulate", "Integrate one strategy from x0; writes trajectory CSV and events JSON");
  add_common(s, sim.common);
  s->add_option("--strategy", sim.strategy, "optimal | onepump:1 | onepump:2 | homog | const:a:z | constsr:a:sr | bestconst");
  s->add_option("--x0", sim.x0, "Initial state s1,s2 (g/L)");
  s->add_option("--out-csv", sim.out_csv, "Trajectory CSV path");
  s->add_option("--out-json", sim.out_json, "Events JSON path");

  ValueOpts val;
  auto* v = app.add_subcommand("value", "Evaluate V0, Vinf or V_d at a point or on a grid");
  add_common(v, val.common);
  v->add_option("--which", val.which, "v0 | vinf | vd");
  v->add_option("--d", val.d, "Override params.d (1/h)");
  v->add_option("--point", val.point, "s1,s2");
  v->add_flag("--grid", val.grid, "Evaluate on a grid");
  v->add_option("--domain", val.domain, "lo1,hi1,lo2,hi2");
  v->add_option("--n", val.resolution, "n1,n2");
  v->add_option("--out-csv", val.out_csv, "Grid CSV path (stdout if absent)");
  v->add_option("--out-json", val.out_json, "JSON sidecar path");

  CompareOpts cmp;
  auto* c = app.add_subcommand("compare", "Optimal vs best constant vs one-pump reach times");
  add_common(c, cmp.common);
  c->add_option("--x0-list", cmp.x0_list, "Initial states a,b;c,d;...");
  c->add_option("--d-list", cmp.d_list, "Diffusion values");
  c->add_option("--sbar-list", cmp.sbar_list, "Target thresholds");
  c->add_option("--out-json", cmp.out_json, "JSON path");

  VerifyOpts ver;
  auto* w = app.add_subcommand("verify", "Pontryagin extremal checks and HJB residual of W0");
  add_common(w, ver.common);
  w->add_option("--x0-list", ver.x0_list, "Explicit initial states (default: random suite)");
  w->add_option("--random", ver.random, "Size of the random suite");
  w->add_option("--seed", ver.seed, "Seed of the random suite (default: config seed, 42)");
  w->add_option("--d-list", ver.d_list, "Diffusion values, cycled over the scenarios");
  w->add_flag("--corrupt", ver.corrupt, "Verify the swapped-branch feedback instead (must fail)");
  w->add_option("--hjb-n", ver.hjb_n, "HJB grid size per axis");
  w->add_option("--hjb-kinks", ver.hjb_kinks, "HJB samples on the threshold kinks");
  w->add_option("--out-json", ver.out_json, "Report JSON path");

  FullOpts full;
  auto* f = app.add_subcommand("full", "Feedback on the slow-fast model for several epsilon");
  add_common(f, full.common);
  f->add_option("--eps-list", full.eps_list, "epsilon values");
  f->add_option("--x0", full.x0, "Initial state s1,s2 (g/L)");
  f->add_option("--out-prefix", full.out_prefix, "Trajectory CSVs go to <prefix>_eps<eps>.csv");
  f->add_option("--out-json", full.out_json, "JSON path");

  GammaOpts gam;
  auto* g = app.add_subcommand("gamma", "Tabulate mu, s-hat, gamma, gamma' and T");
  add_common(g, gam.common);
  g->add_option("--sigma-max", gam.sigma_max, "Largest sigma (g/L)");
  g->add_option("--n", gam.n, "Number of rows");
  g->add_option("--out-csv", gam.out_csv, "CSV path (stdout if absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*v) return cmd_value(val);
    if (*c) return cmd_compare(cmp);
    if (*w) return cmd_verify(ver);
    if (*f) return cmd_full(full);
    if (*g) return cmd_gamma(gam);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace bioremed::cli
