#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "json.hpp"

#include "bioremed/simulate.hpp"
#include "bioremed/value.hpp"

namespace bioremed::cli {

/// Shortest round-trip decimal form; identical inputs give identical text.
std::string format_number(double v);

/// `t,s1,s2,alpha,sr_star,phase`, plus `s_r,x_r,q_over_vr` for the full model.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// `{t_delta, t_f, reason}`; absent events are null.
nlohmann::json events_json(const Trajectory& traj);

/// `s1,s2,value`, s1 outer, s2 inner.
void write_grid_csv(std::ostream& out, const ValueGrid& grid);
nlohmann::json grid_metadata(const ValueGrid& grid);

/// Writes `content` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace bioremed::cli
