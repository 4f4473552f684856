#include "popdyn/trajectory_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include <nlohmann/json.hpp>

namespace popdyn {

namespace {

void write_or_blank(std::ostream& os, double v) {
  if (std::isnan(v)) return;  // blank field
  os << v;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::config_error, "cannot open " + path + " for writing");
  os << std::setprecision(17);

  const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
  os << "# beta=" << traj.beta;
  if (!traj.game_id.empty()) os << " game=" << traj.game_id;
  if (traj.ensemble_size) os << " N=" << *traj.ensemble_size;
  if (traj.seed) os << " seed=" << *traj.seed;
  os << "\n";
  if (n == 3) {
    os << "# ternary columns: x = rho_2 + rho_3/2, y = (sqrt(3)/2) rho_3\n";
  }
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",rho_" << (i + 1);
  os << ",free_energy,H,I";
  if (n == 3) os << ",x,y";
  os << "\n";

  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << traj.times[k];
    for (Eigen::Index i = 0; i < n; ++i) os << "," << traj.states[k][i];
    os << ",";
    if (k < traj.free_energy.size()) write_or_blank(os, traj.free_energy[k]);
    os << ",";
    write_or_blank(os, traj.relative_entropy[k]);
    os << ",";
    write_or_blank(os, traj.fisher_information[k]);
    if (n == 3) {
      const auto& s = traj.states[k];
      os << "," << s[1] + 0.5 * s[2] << "," << 0.5 * std::sqrt(3.0) * s[2];
    }
    os << "\n";
  }
}

nlohmann::json trajectory_to_json(const Trajectory& traj, const nlohmann::json& game_spec) {
  nlohmann::json j;
  j["beta"] = traj.beta;
  j["game"] = game_spec;
  if (!traj.game_id.empty()) j["game_id"] = traj.game_id;
  j["times"] = traj.times;
  auto& states = j["states"] = nlohmann::json::array();
  for (const auto& s : traj.states) {
    states.push_back(std::vector<double>(s.data(), s.data() + s.size()));
  }
  auto column = [](const std::vector<double>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : v) {
      if (std::isnan(x)) {
        arr.push_back(nullptr);
      } else {
        arr.push_back(x);
      }
    }
    return arr;
  };
  if (!traj.free_energy.empty()) j["free_energy"] = column(traj.free_energy);
  j["H"] = column(traj.relative_entropy);
  j["I"] = column(traj.fisher_information);
  j["integrator"] = {{"steps_accepted", traj.stats.steps_accepted},
                     {"steps_rejected", traj.stats.steps_rejected},
                     {"floor_clamps", traj.stats.floor_clamps},
                     {"max_mass_drift", traj.stats.max_mass_drift}};
  if (traj.ensemble_size) j["N"] = *traj.ensemble_size;
  if (traj.seed) j["seed"] = *traj.seed;
  return j;
}

void write_trajectory_json(const Trajectory& traj, const nlohmann::json& game_spec,
                           const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::config_error, "cannot open " + path + " for writing");
  os << trajectory_to_json(traj, game_spec).dump(2) << "\n";
}

LoadedTrajectory read_trajectory_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::config_error, "cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::config_error, "malformed trajectory file: " + std::string(e.what()));
  }

  LoadedTrajectory out;
  Trajectory& traj = out.trajectory;
  try {
    traj.beta = j.at("beta").get<double>();
    out.game_spec = j.at("game");
    if (j.contains("game_id")) traj.game_id = j["game_id"].get<std::string>();
    traj.times = j.at("times").get<std::vector<double>>();
    for (const auto& s : j.at("states")) {
      auto v = s.get<std::vector<double>>();
      traj.states.push_back(
          Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    auto column = [](const nlohmann::json& arr) {
      std::vector<double> v;
      for (const auto& x : arr) {
        v.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                : x.get<double>());
      }
      return v;
    };
    if (j.contains("free_energy")) traj.free_energy = column(j["free_energy"]);
    traj.relative_entropy = column(j.at("H"));
    traj.fisher_information = column(j.at("I"));
    if (j.contains("N")) traj.ensemble_size = j["N"].get<long>();
    if (j.contains("seed")) traj.seed = j["seed"].get<unsigned long long>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::config_error,
                "trajectory file missing fields: " + std::string(e.what()));
  }
  if (traj.times.size() != traj.states.size()) {
    throw Error(ErrorCode::config_error, "trajectory times/states length mismatch");
  }
  return out;
}

}  // namespace popdyn
