#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <popdyn/dynamics.hpp>
#include <popdyn/equilibrium.hpp>
#include <popdyn/game_model.hpp>
#include <popdyn/strategy_graph.hpp>

namespace popdyn::cli {

/// Initial-condition spec: uniform, an explicit state, or k seeded-random
/// interior starts.
struct InitialSpec {
  enum class Kind { uniform, explicit_state, random } kind = Kind::uniform;
  Eigen::VectorXd state;
  int random_count = 0;
};

/// Validated run configuration. Parsing is strict: unknown keys are
/// rejected with the offending key named, as are missing required fields.
struct RunConfig {
  std::string command;

  nlohmann::json game_spec;  // as given; kept for trajectory files
  std::string game_id;

  std::optional<double> beta;
  std::vector<double> betas;

  InitialSpec initial;
  double t_end = 100.0;
  IntegratorOptions integrator;
  GibbsSolveOptions solver;
  bool compute_lambda = false;

  unsigned long long seed = 0;
  std::string label;

  // agents
  long players = 0;
  double agent_step = 0.0;  // 0 = adaptive
  double record_dt = 0.5;

  // diagnose
  std::string input_path;
  std::optional<Eigen::VectorXd> reference;

  // graph spec (empty edges = complete graph)
  int graph_n = 0;  // 0 = take n from the game
  std::vector<std::pair<int, int>> graph_edges;
};

/// Parses and validates a config file for the given subcommand.
/// Throws Error(config_error) with a message naming the field.
RunConfig load_config(const std::string& path, const std::string& command);

/// Same, from an already-parsed document (used by tests).
RunConfig parse_config(const nlohmann::json& doc, const std::string& command);

GameModel build_game(const RunConfig& cfg);
StrategyGraph build_graph(const RunConfig& cfg, const GameModel& game);

/// Materializes the initial states (one entry unless kind == random).
std::vector<PopulationState> initial_states(const RunConfig& cfg, int n);

}  // namespace popdyn::cli
