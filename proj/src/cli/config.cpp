#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "bioremed/errors.hpp"

namespace bioremed::cli {

namespace {

const KeyValues& defaults() {
  static const KeyValues d{
      {"growth.kind", "monod"},   {"growth.mu_max", "1"},     {"growth.ks", "1"},
      {"growth.k", "1"},          {"params.r", "0.3"},        {"params.d", "0.1"},
      {"params.s_bar", "1"},      {"params.epsilon", "0.01"}, {"sim.rel_tol", "1e-10"},
      {"sim.abs_tol", "1e-12"},   {"sim.t_max", "0"},         {"sim.diag_tol", "0"},
      {"sim.event_tol", "1e-10"}, {"sim.max_step", "0"},      {"x0", "4,1.5"},
      {"strategy", "optimal"},    {"full.x_r0", "1"},         {"search.grid", "41"},
      {"search.min_step", "1e-3"}, {"seed", "42"},
  };
  return d;
}

const std::set<std::string>& optional_keys() {
  static const std::set<std::string> k{"full.s_r0", "phys.v1", "phys.v2", "phys.v_r", "phys.D"};
  return k;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::pair<std::string, std::string> split_assignment(std::string_view line, std::string_view where) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(std::string(where) + ": expected key=value, got '" + std::string(line) + "'");
  }
  std::string key = trim(line.substr(0, eq));
  std::string value = trim(line.substr(eq + 1));
  if (key.empty()) throw ConfigError(std::string(where) + ": empty key");
  return {std::move(key), std::move(value)};
}

}  // namespace

KeyValues parse_config_text(std::string_view text) {
  KeyValues kv;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto [key, value] = split_assignment(line, "line " + std::to_string(lineno));
    if (kv.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_override(KeyValues& kv, std::string_view assignment) {
  auto [key, value] = split_assignment(assignment, "--set");
  kv[key] = value;
}

double parse_number(std::string_view text, std::string_view what) {
  const std::string buf = trim(text);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + ": not a number: '" + buf + "'");
  }
  return v;
}

State parse_point(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ConfigError("point must be 's1,s2', got '" + std::string(text) + "'");
  const State s{parse_number(parts[0], "s1"), parse_number(parts[1], "s2")};
  if (s.s1 < 0.0 || s.s2 < 0.0) throw ConfigError("point must lie in the positive orthant");
  return s;
}

std::vector<double> parse_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_number(p, what));
  return out;
}

std::vector<State> parse_point_list(std::string_view text) {
  std::vector<State> out;
  for (const auto& p : split(text, ';')) {
    if (!p.empty()) out.push_back(parse_point(p));
  }
  if (out.empty()) throw ConfigError("empty point list");
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string Scenario::hash() const {
  std::string listing;
  for (const auto& [k, v] : resolved) listing += k + "=" + v + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(listing)));
  return buf;
}

Scenario build_scenario(const KeyValues& kv) {
  for (const auto& [k, v] : kv) {
    if (!defaults().count(k) && !optional_keys().count(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  KeyValues all = defaults();
  for (const auto& [k, v] : kv) all[k] = v;
  const auto num = [&](const std::string& key) { return parse_number(all.at(key), key); };

  Scenario sc;
  try {
    const std::string& kind = all.at("growth.kind");
    if (kind == "monod") {
      sc.growth = GrowthModel::monod(num("growth.mu_max"), num("growth.ks"));
      all.erase("growth.k");
    } else if (kind == "tessier") {
      sc.growth = GrowthModel::tessier(num("growth.mu_max"), num("growth.k"));
      all.erase("growth.ks");
    } else {
      throw ConfigError("growth.kind must be monod or tessier, got '" + kind + "'");
    }
    sc.growth.validate();

    const bool physical = kv.count("phys.v1") || kv.count("phys.v2") || kv.count("phys.v_r") || kv.count("phys.D");
    if (physical) {
      if (kv.count("params.r") || kv.count("params.d") || kv.count("params.epsilon")) {
        throw ConfigError("give either params.r/params.d/params.epsilon or phys.*, not both");
      }
      for (const char* k : {"phys.v1", "phys.v2", "phys.v_r", "phys.D"}) {
        if (!kv.count(k)) throw ConfigError(std::string("physical parameters need ") + k);
      }
      const PhysicalParams phys{num("phys.v1"), num("phys.v2"), num("phys.v_r"), num("phys.D")};
      const auto [reduced, full] = to_reduced(phys, num("params.s_bar"));
      sc.params = reduced;
      sc.epsilon = full.epsilon;
      all.erase("params.r");
      all.erase("params.d");
      all.erase("params.epsilon");
    } else {
      sc.params = {num("params.r"), num("params.d"), num("params.s_bar")};
      sc.epsilon = num("params.epsilon");
    }
    sc.full_params().validate();

    sc.sim.rel_tol = num("sim.rel_tol");
    sc.sim.abs_tol = num("sim.abs_tol");
    sc.sim.t_max = num("sim.t_max");
    sc.sim.diag_tol = num("sim.diag_tol");
    sc.sim.event_tol = num("sim.event_tol");
    sc.sim.max_step = num("sim.max_step");
    sc.sim.validate();

    sc.x0 = parse_point(all.at("x0"));
    sc.strategy = all.at("strategy");
    if (sc.strategy != "bestconst") parse_strategy(sc.strategy);

    const double x_r0 = num("full.x_r0");
    if (!(x_r0 > 0.0)) throw ConfigError("full.x_r0 must be positive (the bioreactor needs biomass)");
    sc.start.x_r0 = x_r0;
    if (all.count("full.s_r0")) {
      const double s_r0 = num("full.s_r0");
      if (s_r0 < 0.0) throw ConfigError("full.s_r0 must be non-negative");
      sc.start.s_r0 = s_r0;
    }

    const double grid = num("search.grid");
    if (grid < 2.0 || grid != std::floor(grid)) throw ConfigError("search.grid must be an integer >= 2");
    sc.search.grid = static_cast<std::size_t>(grid);
    sc.search.min_step = num("search.min_step");
    if (!(sc.search.min_step > 0.0)) throw ConfigError("search.min_step must be positive");
    sc.search.sim = sc.sim;

    const double seed = num("seed");
    if (seed < 0.0 || seed != std::floor(seed)) throw ConfigError("seed must be a non-negative integer");
    sc.seed = static_cast<std::uint64_t>(seed);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  sc.resolved = std::move(all);
  return sc;
}

}  // namespace bioremed::cli
