#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "popdyn/dynamics.hpp"

namespace popdyn {

/// CSV export: comment header with metadata, then
/// `t,rho_1..rho_n,free_energy,H,I` (blank when undefined). For n = 3
/// the ternary plot coordinates x = rho_2 + rho_3/2, y = (sqrt(3)/2) rho_3
/// are appended as extra columns.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// Full-fidelity JSON mirror of the Trajectory type. `game` carries the
/// game specification needed to re-ingest the file (see read).
nlohmann::json trajectory_to_json(const Trajectory& traj, const nlohmann::json& game_spec);

void write_trajectory_json(const Trajectory& traj, const nlohmann::json& game_spec,
                           const std::string& path);

struct LoadedTrajectory {
  Trajectory trajectory;
  nlohmann::json game_spec;
};

LoadedTrajectory read_trajectory_json(const std::string& path);

}  // namespace popdyn
