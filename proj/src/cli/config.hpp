#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bioremed/dynamics.hpp"
#include "bioremed/growth.hpp"
#include "bioremed/search.hpp"
#include "bioremed/simulate.hpp"

namespace bioremed::cli {

/// Malformed or inconsistent scenario configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
KeyValues parse_config_text(std::string_view text);
KeyValues read_config_file(const std::filesystem::path& path);

/// Applies one `key=value` override on top of `kv`.
void apply_override(KeyValues& kv, std::string_view assignment);

struct Scenario {
  GrowthModel growth;
  ReducedParams params;
  double epsilon = 0.01;
  SimConfig sim;
  State x0{4.0, 1.5};
  std::string strategy = "optimal";
  BioreactorStart start;
  ConstantSearchConfig search;
  std::uint64_t seed = 42;
  KeyValues resolved;  // every known key with its effective value

  /// FNV-1a of the resolved key/value listing, as 16 hex digits.
  std::string hash() const;

  FullParams full_params() const { return {params, epsilon}; }
};

/// Validates keys and values and fills in the defaults. Throws ConfigError.
Scenario build_scenario(const KeyValues& kv);

double parse_number(std::string_view text, std::string_view what);
State parse_point(std::string_view text);
std::vector<double> parse_list(std::string_view text, std::string_view what);
std::vector<State> parse_point_list(std::string_view text);

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace bioremed::cli
