#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bioremed/pmp_verify.hpp"
#include "bioremed/search.hpp"
#include "config.hpp"

namespace bioremed::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,
  kConfigError = 2,
  kHorizon = 3,
  kPartialFailure = 4,
  kVerificationFailure = 5,
};

/// One (x0, d, s_bar) cell of the strategy comparison.
struct CompareCell {
  State x0;
  double d = 0.0;
  double s_bar = 0.0;
  std::optional<double> vd;
  std::optional<ConstantSearchResult> cst;
  std::optional<double> one_patch1;  // the T*_one column
  std::optional<double> one_patch2;
  std::string error;

  bool ok() const { return error.empty(); }
  std::optional<double> one_better() const;
};

CompareCell compare_cell(const Scenario& sc, State x0, double d, double s_bar);
nlohmann::json compare_cell_json(const CompareCell& cell);
std::string compare_table(const std::vector<CompareCell>& cells, const std::vector<double>& d_list,
                          const std::vector<double>& sbar_list);

/// Percentage increase of t over the reference v.
double increase_pct(double t, double v);

struct VerifyScenario {
  State x0;
  double d = 0.0;
  ExtremalReport report;
};

/// Seeded random initial states in (s_bar, hi]^2, off the diagonal.
std::vector<State> random_states(std::uint64_t seed, std::size_t count, double s_bar, double hi);

struct HjbSummary {
  std::size_t grid_points = 0;
  std::size_t kink_points = 0;
  double max_abs_residual = 0.0;
};

/// W0 residuals on an n x n grid over (s_bar, hi]^2 without the kinks, plus
/// `kinks` points on each of x1 = s_bar and x2 = s_bar.
HjbSummary hjb_suite(const Scenario& sc, std::size_t n, std::size_t kinks, double hi);

struct FullRun {
  double epsilon = 0.0;
  Trajectory traj;
};

/// Entry point shared by the executable; returns the process exit code.
int run(int argc, char** argv);

}  // namespace bioremed::cli
