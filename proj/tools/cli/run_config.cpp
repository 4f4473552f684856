#include "run_config.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <popdyn/builtin_games.hpp>

namespace popdyn::cli {

namespace {

[[noreturn]] void bad(const std::string& msg) {
  throw Error(ErrorCode::config_error, msg);
}

void require_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) bad("unknown key \"" + key + "\" in " + where);
  }
}

double number_field(const nlohmann::json& obj, const std::string& key) {
  if (!obj.at(key).is_number()) bad("field \"" + key + "\" must be a number");
  return obj.at(key).get<double>();
}

Eigen::VectorXd vector_field(const nlohmann::json& arr, const std::string& key) {
  if (!arr.is_array() || arr.empty()) bad("field \"" + key + "\" must be a nonempty array");
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) bad("field \"" + key + "\" must contain numbers");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

void parse_game(RunConfig& cfg, const nlohmann::json& doc) {
  if (!doc.contains("game")) bad("missing required field \"game\"");
  const auto& game = doc.at("game");
  if (game.is_string()) {
    cfg.game_id = game.get<std::string>();
    builtin_game(cfg.game_id);  // validates the name
  } else if (game.is_object()) {
    require_keys(game, {"matrix", "name"}, "\"game\"");
    if (!game.contains("matrix")) bad("game object needs a \"matrix\" field");
    const auto& rows = game.at("matrix");
    if (!rows.is_array() || rows.size() < 2) bad("\"game.matrix\" must have >= 2 rows");
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != rows.size()) {
        bad("\"game.matrix\" must be square");
      }
    }
    cfg.game_id = game.value("name", "matrix_game");
  } else {
    bad("field \"game\" must be a builtin name or a {matrix: ...} object");
  }
  cfg.game_spec = game;
}

void parse_graph(RunConfig& cfg, const nlohmann::json& doc) {
  if (!doc.contains("graph")) return;  // complete graph by default
  const auto& graph = doc.at("graph");
  if (graph.is_string()) {
    if (graph.get<std::string>() != "complete") {
      bad("field \"graph\" must be \"complete\" or an {n, edges} object");
    }
    return;
  }
  if (!graph.is_object()) bad("field \"graph\" must be \"complete\" or an object");
  require_keys(graph, {"n", "edges"}, "\"graph\"");
  if (!graph.contains("n") || !graph.contains("edges")) {
    bad("\"graph\" object needs \"n\" and \"edges\"");
  }
  cfg.graph_n = graph.at("n").get<int>();
  for (const auto& e : graph.at("edges")) {
    if (!e.is_array() || e.size() != 2) bad("\"graph.edges\" entries must be pairs");
    cfg.graph_edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
}

void parse_initial(RunConfig& cfg, const nlohmann::json& doc) {
  if (!doc.contains("initial")) return;
  const auto& init = doc.at("initial");
  if (init.is_string()) {
    if (init.get<std::string>() != "uniform") {
      bad("field \"initial\" must be \"uniform\", a state array, or {random: k}");
    }
  } else if (init.is_array()) {
    cfg.initial.kind = InitialSpec::Kind::explicit_state;
    cfg.initial.state = vector_field(init, "initial");
  } else if (init.is_object()) {
    require_keys(init, {"random"}, "\"initial\"");
    if (!init.contains("random")) bad("\"initial\" object needs \"random\"");
    cfg.initial.kind = InitialSpec::Kind::random;
    cfg.initial.random_count = init.at("random").get<int>();
    if (cfg.initial.random_count < 1) bad("\"initial.random\" must be >= 1");
  } else {
    bad("field \"initial\" must be \"uniform\", a state array, or {random: k}");
  }
}

void parse_integrator(RunConfig& cfg, const nlohmann::json& doc) {
  if (!doc.contains("integrator")) return;
  const auto& opts = doc.at("integrator");
  require_keys(opts, {"abs_tol", "rel_tol", "initial_step", "max_step", "sample_dt"},
               "\"integrator\"");
  if (opts.contains("abs_tol")) cfg.integrator.abs_tol = number_field(opts, "abs_tol");
  if (opts.contains("rel_tol")) cfg.integrator.rel_tol = number_field(opts, "rel_tol");
  if (opts.contains("initial_step")) {
    cfg.integrator.initial_step = number_field(opts, "initial_step");
  }
  if (opts.contains("max_step")) cfg.integrator.max_step = number_field(opts, "max_step");
  if (opts.contains("sample_dt")) cfg.integrator.sample_dt = number_field(opts, "sample_dt");
  if (cfg.integrator.abs_tol <= 0 || cfg.integrator.rel_tol <= 0) {
    bad("integrator tolerances must be positive");
  }
}

void parse_solver(RunConfig& cfg, const nlohmann::json& doc) {
  if (!doc.contains("solver")) return;
  const auto& opts = doc.at("solver");
  require_keys(opts, {"num_starts", "tol", "max_iterations", "damping", "cluster_radius"},
               "\"solver\"");
  if (opts.contains("num_starts")) cfg.solver.num_starts = opts.at("num_starts").get<int>();
  if (opts.contains("tol")) cfg.solver.tol = number_field(opts, "tol");
  if (opts.contains("max_iterations")) {
    cfg.solver.max_iterations = opts.at("max_iterations").get<long>();
  }
  if (opts.contains("damping")) cfg.solver.damping = number_field(opts, "damping");
  if (opts.contains("cluster_radius")) {
    cfg.solver.cluster_radius = number_field(opts, "cluster_radius");
  }
  if (cfg.solver.num_starts < 1) bad("\"solver.num_starts\" must be >= 1");
}

}  // namespace

RunConfig parse_config(const nlohmann::json& doc, const std::string& command) {
  if (!doc.is_object()) bad("config root must be a JSON object");

  RunConfig cfg;
  cfg.command = command;

  std::set<std::string> allowed = {"game", "graph", "seed", "label"};
  const bool wants_beta = command == "simulate" || command == "gibbs" ||
                          command == "stability" || command == "agents";
  if (wants_beta) allowed.insert("beta");
  if (command == "sweep") allowed.insert("betas");
  if (command == "simulate" || command == "sweep" || command == "agents") {
    allowed.insert("initial");
    allowed.insert("t_end");
    allowed.insert("integrator");
  }
  if (command == "simulate") allowed.insert("reference");
  if (command == "gibbs" || command == "stability") {
    allowed.insert("solver");
    allowed.insert("lambda");
  }
  if (command == "stability") allowed.insert("state");
  if (command == "agents") {
    allowed.insert("players");
    allowed.insert("step");
    allowed.insert("record_dt");
  }
  if (command == "diagnose") {
    allowed = {"input", "reference", "seed", "label", "solver"};
  }
  require_keys(doc, allowed, "config");

  if (command != "diagnose") parse_game(cfg, doc);
  parse_graph(cfg, doc);
  parse_initial(cfg, doc);
  parse_integrator(cfg, doc);
  parse_solver(cfg, doc);

  if (doc.contains("seed")) cfg.seed = doc.at("seed").get<unsigned long long>();
  if (doc.contains("label")) cfg.label = doc.at("label").get<std::string>();
  if (doc.contains("t_end")) {
    cfg.t_end = number_field(doc, "t_end");
    if (cfg.t_end <= 0) bad("field \"t_end\" must be positive");
  }

  if (doc.contains("beta")) {
    cfg.beta = number_field(doc, "beta");
    if (*cfg.beta < 0) bad("field \"beta\" must be >= 0");
  }
  if (wants_beta && !cfg.beta) bad("missing required field \"beta\"");

  if (command == "sweep") {
    if (!doc.contains("betas")) bad("missing required field \"betas\"");
    for (const auto& b : doc.at("betas")) {
      if (!b.is_number() || b.get<double>() < 0) {
        bad("field \"betas\" must contain numbers >= 0");
      }
      cfg.betas.push_back(b.get<double>());
    }
    if (cfg.betas.empty()) bad("field \"betas\" must be nonempty");
  }

  if (doc.contains("lambda")) cfg.compute_lambda = doc.at("lambda").get<bool>();
  if (command == "stability" && doc.contains("state")) {
    cfg.reference = vector_field(doc.at("state"), "state");
  }
  if (command == "simulate" && doc.contains("reference")) {
    cfg.reference = vector_field(doc.at("reference"), "reference");
  }

  if (command == "agents") {
    if (!doc.contains("players")) bad("missing required field \"players\"");
    cfg.players = doc.at("players").get<long>();
    if (cfg.players < 1) bad("field \"players\" must be >= 1");
    if (doc.contains("step")) {
      cfg.agent_step = number_field(doc, "step");
      if (cfg.agent_step < 0) bad("field \"step\" must be >= 0");
    }
    if (doc.contains("record_dt")) {
      cfg.record_dt = number_field(doc, "record_dt");
      if (cfg.record_dt <= 0) bad("field \"record_dt\" must be positive");
    }
  }

  if (command == "diagnose") {
    if (!doc.contains("input")) bad("missing required field \"input\"");
    cfg.input_path = doc.at("input").get<std::string>();
    if (doc.contains("reference")) {
      cfg.reference = vector_field(doc.at("reference"), "reference");
    }
  }

  if (cfg.label.empty()) {
    std::ostringstream os;
    os << (cfg.game_id.empty() ? command : cfg.game_id);
    if (cfg.beta) os << "_beta" << *cfg.beta;
    cfg.label = os.str();
  }
  return cfg;
}

RunConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream is(path);
  if (!is) bad("cannot open config file " + path);
  nlohmann::json doc;
  try {
    is >> doc;
  } catch (const nlohmann::json::exception& e) {
    bad("config is not valid JSON: " + std::string(e.what()));
  }
  try {
    return parse_config(doc, command);
  } catch (const nlohmann::json::exception& e) {
    bad("config field has the wrong type: " + std::string(e.what()));
  }
}

GameModel build_game(const RunConfig& cfg) {
  if (cfg.game_spec.is_string()) return builtin_game(cfg.game_spec.get<std::string>());
  const auto& rows = cfg.game_spec.at("matrix");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rows[i][j].get<double>();
  return GameModel::from_matrix(a);
}

StrategyGraph build_graph(const RunConfig& cfg, const GameModel& game) {
  if (cfg.graph_edges.empty()) {
    std::vector<std::string> labels;
    if (cfg.game_spec.is_string()) labels = builtin_labels(cfg.game_spec.get<std::string>());
    return StrategyGraph::complete(game.size(), std::move(labels));
  }
  if (cfg.graph_n != game.size()) {
    throw Error(ErrorCode::config_error, "\"graph.n\" does not match the game size");
  }
  return StrategyGraph::build(cfg.graph_n, cfg.graph_edges);
}

std::vector<PopulationState> initial_states(const RunConfig& cfg, int n) {
  switch (cfg.initial.kind) {
    case InitialSpec::Kind::uniform:
      return {PopulationState::uniform(n)};
    case InitialSpec::Kind::explicit_state:
      if (cfg.initial.state.size() != n) {
        throw Error(ErrorCode::config_error, "\"initial\" has the wrong length");
      }
      return {PopulationState::validate(cfg.initial.state)};
    case InitialSpec::Kind::random: {
      std::mt19937_64 rng(cfg.seed);
      std::exponential_distribution<double> e1(1.0);
      std::vector<PopulationState> out;
      for (int k = 0; k < cfg.initial.random_count; ++k) {
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r[i] = e1(rng) + 1e-3;
        out.push_back(PopulationState::validate(r / r.sum()));
      }
      return out;
    }
  }
  throw Error(ErrorCode::config_error, "unreachable initial kind");
}

}  // namespace popdyn::cli
