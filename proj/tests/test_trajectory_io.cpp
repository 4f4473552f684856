#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <popdyn/builtin_games.hpp>
#include <popdyn/diagnostics.hpp>
#include <popdyn/trajectory_io.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace popdyn;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  auto dir = fs::temp_directory_path() / "popdyn_io_test";
  fs::create_directories(dir);
  return dir / name;
}

Trajectory sample_run(int n) {
  auto g = StrategyGraph::complete(n);
  auto game = n == 2 ? builtin_game("stag_hunt") : GameModel::from_matrix(
                                                       -Eigen::MatrixXd::Identity(n, n));
  IntegratorOptions opts;
  opts.sample_dt = 0.1;
  auto traj = integrate(game, g, PopulationState::uniform(n), 0.5, 1.0, opts);
  traj.game_id = n == 2 ? "stag_hunt" : "congestion";
  return traj;
}

}  // namespace

TEST_CASE("csv layout") {
  auto traj = sample_run(2);
  auto path = temp_file("run2.csv");
  write_trajectory_csv(traj, path.string());

  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("# beta=0.5", 0) == 0);
  CHECK(line.find("game=stag_hunt") != std::string::npos);
  std::getline(is, line);
  CHECK(line == "t,rho_1,rho_2,free_energy,H,I");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == traj.size());
}

TEST_CASE("csv appends ternary coordinates for three strategies") {
  auto traj = sample_run(3);
  auto path = temp_file("run3.csv");
  write_trajectory_csv(traj, path.string());

  std::ifstream is(path);
  std::string line;
  std::getline(is, line);                     // metadata
  std::getline(is, line);                     // ternary comment
  CHECK(line.rfind("# ternary", 0) == 0);
  std::getline(is, line);
  CHECK(line == "t,rho_1,rho_2,rho_3,free_energy,H,I,x,y");

  std::getline(is, line);  // t = 0: uniform state
  std::stringstream ss(line);
  std::vector<std::string> fields;
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  REQUIRE(fields.size() == 9);
  CHECK(std::stod(fields[7]) == doctest::Approx(1.0 / 3.0 + 1.0 / 6.0));
  CHECK(std::stod(fields[8]) == doctest::Approx(std::sqrt(3.0) / 6.0));
  // H and I were never annotated: blank fields
  CHECK(fields[5].empty());
  CHECK(fields[6].empty());
}

TEST_CASE("json round trip preserves the trajectory") {
  auto traj = sample_run(3);
  auto g = StrategyGraph::complete(3);
  auto game = GameModel::from_matrix(-Eigen::MatrixXd::Identity(3, 3));
  annotate_diagnostics(traj, game, g, PopulationState::uniform(3));

  nlohmann::json spec = {{"builtin", "congestion"}, {"n", 3}};
  auto path = temp_file("run3.json");
  write_trajectory_json(traj, spec, path.string());

  auto loaded = read_trajectory_json(path.string());
  CHECK(loaded.game_spec == spec);
  const auto& t2 = loaded.trajectory;
  CHECK(t2.beta == traj.beta);
  CHECK(t2.game_id == traj.game_id);
  REQUIRE(t2.size() == traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CHECK(t2.times[k] == traj.times[k]);
    CHECK((t2.states[k] - traj.states[k]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(t2.relative_entropy[k] == traj.relative_entropy[k]);
    CHECK(t2.fisher_information[k] == traj.fisher_information[k]);
  }
}

TEST_CASE("json round trip maps NaN diagnostics to null and back") {
  auto traj = sample_run(2);  // H, I never annotated
  auto path = temp_file("run2.json");
  write_trajectory_json(traj, nlohmann::json{{"builtin", "stag_hunt"}}, path.string());

  std::ifstream is(path);
  nlohmann::json j;
  is >> j;
  CHECK(j["H"][0].is_null());

  auto loaded = read_trajectory_json(path.string());
  CHECK(std::isnan(loaded.trajectory.relative_entropy[0]));
}

TEST_CASE("malformed inputs are rejected as config errors") {
  auto garbage = temp_file("garbage.json");
  std::ofstream(garbage) << "{not json";
  auto missing = temp_file("missing.json");
  std::ofstream(missing) << R"({"beta": 0.5})";

  for (const auto& p : {garbage, missing, temp_file("does_not_exist.json")}) {
    bool threw = false;
    try {
      read_trajectory_json(p.string());
    } catch (const Error& e) {
      threw = true;
      CHECK(e.code() == ErrorCode::config_error);
    }
    CHECK(threw);
  }
}

TEST_CASE("unwritable paths are reported") {
  auto traj = sample_run(2);
  CHECK_THROWS_AS(write_trajectory_csv(traj, "/nonexistent_dir/x.csv"), Error);
  CHECK_THROWS_AS(
      write_trajectory_json(traj, nlohmann::json::object(), "/nonexistent_dir/x.json"),
      Error);
}
