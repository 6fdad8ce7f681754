#include "output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bioremed/errors.hpp"

namespace bioremed::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,s1,s2,alpha,sr_star,phase";
  if (traj.full_model) out << ",s_r,x_r,q_over_vr";
  out << '\n';
  for (const auto& smp : traj.samples) {
    out << format_number(smp.t) << ',' << format_number(smp.s.s1) << ',' << format_number(smp.s.s2) << ','
        << format_number(smp.u.alpha) << ',' << format_number(smp.u.sr_star) << ',' << to_string(smp.phase);
    if (traj.full_model) {
      const BioreactorSample b = smp.bioreactor.value_or(BioreactorSample{});
      out << ',' << format_number(b.s_r) << ',' << format_number(b.x_r) << ',' << format_number(b.q_over_vr);
    }
    out << '\n';
  }
}

nlohmann::json events_json(const Trajectory& traj) {
  nlohmann::json j;
  j["t_delta"] = traj.t_delta ? nlohmann::json(*traj.t_delta) : nlohmann::json(nullptr);
  j["t_f"] = traj.t_f ? nlohmann::json(*traj.t_f) : nlohmann::json(nullptr);
  j["reason"] = std::string(to_string(traj.reason));
  return j;
}

void write_grid_csv(std::ostream& out, const ValueGrid& grid) {
  out << "s1,s2,value\n";
  for (std::size_t i = 0; i < grid.domain.n1; ++i) {
    for (std::size_t j = 0; j < grid.domain.n2; ++j) {
      out << format_number(grid.domain.s1(i)) << ',' << format_number(grid.domain.s2(j)) << ','
          << format_number(grid.at(i, j)) << '\n';
    }
  }
}

nlohmann::json grid_metadata(const ValueGrid& grid) {
  const auto& d = grid.domain;
  return {
      {"which", std::string(to_string(grid.which))},
      {"domain", {{"s1", {d.lo1, d.hi1}}, {"s2", {d.lo2, d.hi2}}}},
      {"resolution", {d.n1, d.n2}},
      {"params", {{"r", grid.params.r}, {"d", grid.params.d}, {"s_bar", grid.params.s_bar}}},
      {"units", {{"value", "h"}, {"s1", "g/L"}, {"s2", "g/L"}}},
  };
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace bioremed::cli
