#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"

#include <popdyn/errors.hpp>
#include <popdyn/trajectory_io.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace popdyn;
using namespace popdyn::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / "popdyn_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& doc) {
  auto path = dir / name;
  std::ofstream(path) << doc.dump(2) << "\n";
  return path;
}

std::string config_message(const json& doc, const std::string& command) {
  try {
    parse_config(doc, command);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config_error);
    return e.what();
  }
  FAIL("expected config_error");
  return "";
}

/// Runs a subcommand against a config document, capturing the report.
int run_json(const json& doc, const std::string& command, const fs::path& out,
             std::string* rep = nullptr, const std::string& seed_override = "") {
  auto cfg_path = write_config(out, "config.json", doc);
  std::ostringstream os;
  CommandContext ctx;
  ctx.out_dir = out.string();
  ctx.report = &os;
  int code = run_command(command, cfg_path.string(), ctx, seed_override);
  if (rep) *rep = os.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ostringstream os;
  os << std::ifstream(p).rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config parsing is strict") {
  json base = {{"game", "stag_hunt"}, {"beta", 1.0}};

  SUBCASE("unknown keys are rejected by name") {
    json doc = base;
    doc["bogus"] = 3;
    auto msg = config_message(doc, "simulate");
    CHECK(msg.find("bogus") != std::string::npos);
  }
  SUBCASE("unknown nested keys are rejected") {
    json doc = base;
    doc["integrator"] = {{"abs_tol", 1e-9}, {"typo", 1}};
    CHECK(config_message(doc, "simulate").find("typo") != std::string::npos);
  }
  SUBCASE("missing beta is named") {
    CHECK(config_message({{"game", "stag_hunt"}}, "simulate").find("beta") !=
          std::string::npos);
  }
  SUBCASE("negative beta is named") {
    json doc = base;
    doc["beta"] = -1.0;
    CHECK(config_message(doc, "simulate").find("beta") != std::string::npos);
  }
  SUBCASE("unknown builtin game") {
    CHECK_THROWS_AS(parse_config({{"game", "no_such_game"}, {"beta", 1.0}}, "simulate"),
                    Error);
  }
  SUBCASE("sweep requires a nonempty betas list") {
    CHECK(config_message({{"game", "rsp"}, {"betas", json::array()}}, "sweep")
              .find("betas") != std::string::npos);
  }
  SUBCASE("beta-only keys are rejected for sweep") {
    CHECK(config_message({{"game", "rsp"}, {"betas", {0.1}}, {"beta", 0.1}}, "sweep")
              .find("beta") != std::string::npos);
  }
  SUBCASE("agents requires players") {
    CHECK(config_message(base, "agents").find("players") != std::string::npos);
  }
  SUBCASE("diagnose requires input and rejects simulate keys") {
    CHECK(config_message(json::object(), "diagnose").find("input") != std::string::npos);
    CHECK(config_message({{"input", "x.json"}, {"t_end", 5.0}}, "diagnose")
              .find("t_end") != std::string::npos);
  }
}

TEST_CASE("config defaults and explicit fields") {
  auto cfg = parse_config({{"game", "stag_hunt"}, {"beta", 0.5}}, "simulate");
  CHECK(cfg.label == "stag_hunt_beta0.5");
  CHECK(cfg.t_end == 100.0);
  CHECK(cfg.initial.kind == InitialSpec::Kind::uniform);

  cfg = parse_config({{"game", "rsp"},
                      {"beta", 0.1},
                      {"label", "custom"},
                      {"seed", 42},
                      {"initial", {{"random", 3}}},
                      {"t_end", 7.5}},
                     "simulate");
  CHECK(cfg.label == "custom");
  CHECK(cfg.seed == 42);
  CHECK(cfg.t_end == 7.5);
  auto starts = initial_states(cfg, 3);
  REQUIRE(starts.size() == 3);
  for (const auto& s : starts) CHECK(s.rho().sum() == doctest::Approx(1.0).epsilon(1e-12));

  cfg = parse_config({{"game", {{"matrix", {{0.0, 1.0}, {1.0, 0.0}}}, {"name", "coord"}}},
                      {"beta", 0.0},
                      {"initial", {0.25, 0.75}}},
                     "simulate");
  CHECK(cfg.game_id == "coord");
  auto game = build_game(cfg);
  CHECK(game.size() == 2);
  REQUIRE(initial_states(cfg, 2).size() == 1);
  CHECK(initial_states(cfg, 2).front().rho()[1] == 0.75);
}

TEST_CASE("exit codes follow the 0/1/2 contract") {
  auto out = temp_dir("exit_codes");

  // 0: a clean simulate run
  CHECK(run_json({{"game", "stag_hunt"}, {"beta", 5.0}, {"t_end", 20.0},
                  {"integrator", {{"sample_dt", 0.5}}}},
                 "simulate", out) == 0);
  CHECK(fs::exists(out / "stag_hunt_beta5.csv"));
  CHECK(fs::exists(out / "stag_hunt_beta5.json"));

  // 1: validation failures (bad field, missing input file)
  CHECK(run_json({{"game", "stag_hunt"}, {"beta", -1.0}}, "simulate", out) == 1);
  CHECK(run_json({{"input", (out / "missing.json").string()}}, "diagnose", out) == 1);

  // 2: numerical failure (Gibbs solve cut off before convergence)
  CHECK(run_json({{"game", "stag_hunt"}, {"beta", 5.0},
                  {"solver", {{"max_iterations", 1}, {"num_starts", 4}}}},
                 "stability", out) == 2);
}

TEST_CASE("simulate reports the attractor and annotates diagnostics") {
  auto out = temp_dir("simulate");
  std::string rep;
  REQUIRE(run_json({{"game", "stag_hunt"}, {"beta", 5.0}, {"t_end", 50.0},
                    {"integrator", {{"sample_dt", 0.5}}}},
                   "simulate", out, &rep) == 0);
  CHECK(rep.find("equilibrium near") != std::string::npos);

  auto loaded = read_trajectory_json((out / "stag_hunt_beta5.json").string());
  REQUIRE(loaded.trajectory.size() > 2);
  CHECK(loaded.trajectory.relative_entropy.size() == loaded.trajectory.size());
  CHECK(loaded.trajectory.relative_entropy.front() > 0.0);
}

TEST_CASE("gibbs writes every cluster with its basin") {
  auto out = temp_dir("gibbs");
  std::string rep;
  REQUIRE(run_json({{"game", "example4"}, {"beta", 0.01},
                    {"solver", {{"num_starts", 100}}}, {"lambda", true}},
                   "gibbs", out, &rep) == 0);
  CHECK(rep.find("Gibbs measure") != std::string::npos);

  auto j = json::parse(slurp(out / "example4_beta0.01_gibbs.json"));
  REQUIRE(j.at("measures").size() >= 2);
  int basin_total = 0;
  for (const auto& m : j.at("measures")) {
    basin_total += m.at("basin_count").get<int>();
    CHECK(m.at("residual").get<double>() <= 1e-8);
    CHECK(m.contains("lambda"));
  }
  CHECK(basin_total + j.at("failed_starts").get<int>() == 100);
  // clusters come largest basin first
  CHECK(j.at("measures")[0].at("basin_count").get<int>() >=
        j.at("measures")[1].at("basin_count").get<int>());
}

TEST_CASE("agents runs are reproducible by seed") {
  json doc = {{"game", "stag_hunt"}, {"beta", 5.0}, {"players", 500},
              {"t_end", 5.0}, {"seed", 11}, {"initial", {0.7, 0.3}}};
  auto out_a = temp_dir("agents_a");
  auto out_b = temp_dir("agents_b");
  REQUIRE(run_json(doc, "agents", out_a) == 0);
  REQUIRE(run_json(doc, "agents", out_b) == 0);
  CHECK(slurp(out_a / "stag_hunt_beta5_agents.csv") ==
        slurp(out_b / "stag_hunt_beta5_agents.csv"));

  // a --seed override changes the realization
  auto out_c = temp_dir("agents_c");
  REQUIRE(run_json(doc, "agents", out_c, nullptr, "12") == 0);
  CHECK(slurp(out_a / "stag_hunt_beta5_agents.csv") !=
        slurp(out_c / "stag_hunt_beta5_agents.csv"));
}

TEST_CASE("diagnose round-trips a stored trajectory") {
  auto out = temp_dir("diagnose");
  // short horizon: H underflows 1e-14 by t ~ 4, which would starve the fit
  REQUIRE(run_json({{"game", "stag_hunt"}, {"beta", 5.0}, {"t_end", 1.5},
                    {"initial", {0.9, 0.1}},
                    {"integrator", {{"sample_dt", 0.05}}}},
                   "simulate", out) == 0);

  std::string rep;
  REQUIRE(run_json({{"input", (out / "stag_hunt_beta5.json").string()}},
                   "diagnose", out, &rep) == 0);
  CHECK(rep.find("entropy decay rate") != std::string::npos);

  // recomputed diagnostics match what simulate stored, bit for bit
  auto before = read_trajectory_json((out / "stag_hunt_beta5.json").string());
  auto after = read_trajectory_json((out / "diagnosed.json").string());
  REQUIRE(after.trajectory.size() == before.trajectory.size());
  for (std::size_t k = 0; k < before.trajectory.size(); ++k) {
    CHECK(after.trajectory.relative_entropy[k] == before.trajectory.relative_entropy[k]);
    CHECK(after.trajectory.fisher_information[k] == before.trajectory.fisher_information[k]);
  }
}
