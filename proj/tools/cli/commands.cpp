#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <popdyn/agent_sim.hpp>
#include <popdyn/builtin_games.hpp>
#include <popdyn/diagnostics.hpp>
#include <popdyn/trajectory_io.hpp>

namespace popdyn::cli {

namespace fs = std::filesystem;

namespace {

std::ostream& report(const CommandContext& ctx) {
  return ctx.report ? *ctx.report : std::cout;
}

std::string out_path(const CommandContext& ctx, const std::string& file) {
  fs::create_directories(ctx.out_dir);
  return (fs::path(ctx.out_dir) / file).string();
}

std::string format_state(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << std::setprecision(4) << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ")";
  return os.str();
}

GameModel game_from_spec(const nlohmann::json& spec) {
  RunConfig shim;
  shim.game_spec = spec;
  return build_game(shim);
}

/// Reference measure for H/I diagnostics: configured state, or the solved
/// Gibbs measure closest to `near` (the trajectory's terminal state).
std::optional<PopulationState> pick_reference(const RunConfig& cfg, const GameModel& game,
                                              double beta, const Eigen::VectorXd& near) {
  if (cfg.reference) {
    return PopulationState::validate(*cfg.reference);
  }
  if (!game.is_potential_game() || beta <= 0.0) return std::nullopt;
  auto solved = solve_gibbs(game, beta, cfg.solver);
  if (solved.measures.empty()) return std::nullopt;
  const GibbsMeasure* best = &solved.measures.front();
  for (const auto& m : solved.measures) {
    if ((m.rho_star - near).norm() < (best->rho_star - near).norm()) best = &m;
  }
  return PopulationState::validate(best->rho_star);
}

void describe(const AttractorReport& rep, std::ostream& os) {
  switch (rep.kind) {
    case AttractorKind::equilibrium:
      os << "equilibrium near " << format_state(rep.equilibrium);
      break;
    case AttractorKind::limit_cycle:
      os << "limit_cycle period=" << std::setprecision(4) << rep.period
         << " amplitude=" << format_state(rep.amplitude);
      break;
    default:
      os << "unresolved (tail diameter " << rep.tail_diameter << ", terminal velocity "
         << rep.terminal_velocity << ")";
  }
}

nlohmann::json measure_to_json(const GibbsMeasure& m) {
  nlohmann::json j;
  j["rho_star"] = std::vector<double>(m.rho_star.data(), m.rho_star.data() + m.rho_star.size());
  j["residual"] = m.residual;
  j["normalization"] = m.normalization;
  j["basin_count"] = m.basin_count;
  if (m.lambda) j["lambda"] = *m.lambda;
  return j;
}

}  // namespace

void cmd_simulate(const RunConfig& cfg, const CommandContext& ctx) {
  auto game = build_game(cfg);
  auto g = build_graph(cfg, game);
  auto starts = initial_states(cfg, game.size());
  double beta = *cfg.beta;

  for (std::size_t k = 0; k < starts.size(); ++k) {
    auto traj = integrate(game, g, starts[k], beta, cfg.t_end, cfg.integrator);
    traj.game_id = cfg.game_id;

    auto ref = pick_reference(cfg, game, beta, traj.terminal());
    if (ref) annotate_diagnostics(traj, game, g, *ref);

    std::string stem = cfg.label + (starts.size() > 1 ? "_s" + std::to_string(k) : "");
    write_trajectory_csv(traj, out_path(ctx, stem + ".csv"));
    write_trajectory_json(traj, cfg.game_spec, out_path(ctx, stem + ".json"));

    if (!ctx.quiet) {
      auto rep = classify_attractor(game, g, traj);
      report(ctx) << stem << ": ";
      describe(rep, report(ctx));
      report(ctx) << "\n";
    }
  }
}

void cmd_gibbs(const RunConfig& cfg, const CommandContext& ctx) {
  auto game = build_game(cfg);
  auto g = build_graph(cfg, game);
  double beta = *cfg.beta;

  GibbsSolveOptions opts = cfg.solver;
  opts.seed = cfg.seed;
  auto result = solve_gibbs(game, beta, opts);
  if (cfg.compute_lambda) {
    for (auto& m : result.measures) {
      m.lambda = stability_lambda(game, g, PopulationState::validate(m.rho_star), beta);
    }
  }

  nlohmann::json j;
  j["game"] = cfg.game_spec;
  j["beta"] = beta;
  j["failed_starts"] = result.failed_starts;
  j["measures"] = nlohmann::json::array();
  for (const auto& m : result.measures) j["measures"].push_back(measure_to_json(m));
  std::ofstream(out_path(ctx, cfg.label + "_gibbs.json")) << j.dump(2) << "\n";

  if (!ctx.quiet) {
    report(ctx) << result.measures.size() << " Gibbs measure(s) at beta=" << beta << "\n";
    for (const auto& m : result.measures) {
      report(ctx) << "  " << format_state(m.rho_star) << " basin=" << m.basin_count
                  << " residual=" << m.residual;
      if (m.lambda) report(ctx) << " lambda=" << *m.lambda;
      report(ctx) << "\n";
    }
  }
}

void cmd_stability(const RunConfig& cfg, const CommandContext& ctx) {
  auto game = build_game(cfg);
  auto g = build_graph(cfg, game);
  double beta = *cfg.beta;

  PopulationState state = PopulationState::uniform(game.size());
  if (cfg.reference) {
    state = PopulationState::validate(*cfg.reference);
  } else {
    GibbsSolveOptions opts = cfg.solver;
    opts.seed = cfg.seed;
    auto solved = solve_gibbs(game, beta, opts);
    if (solved.measures.empty()) {
      throw Error(ErrorCode::non_convergence, "no Gibbs measure to analyze");
    }
    state = PopulationState::validate(solved.measures.front().rho_star);
  }

  double lambda = stability_lambda(game, g, state, beta);
  auto jr = jacobian_rhs(game, g, state, beta);

  nlohmann::json j;
  j["game"] = cfg.game_spec;
  j["beta"] = beta;
  j["state"] = std::vector<double>(state.rho().data(), state.rho().data() + state.size());
  j["lambda"] = lambda;
  j["asymptotic_decay_rate"] = 2.0 * lambda;
  j["jacobian_smooth"] = jr.smooth;
  std::ofstream(out_path(ctx, cfg.label + "_stability.json")) << j.dump(2) << "\n";

  if (!ctx.quiet) {
    report(ctx) << "state " << format_state(state.rho()) << ": lambda=" << lambda
                << " (entropy decay rate " << 2.0 * lambda << ")"
                << (lambda > 0 ? ", asymptotically stable" : ", not certified stable")
                << "\n";
  }
}

void cmd_sweep(const RunConfig& cfg, const CommandContext& ctx) {
  auto game = build_game(cfg);
  auto g = build_graph(cfg, game);
  auto starts = initial_states(cfg, game.size());

  auto sweep = sweep_beta(game, g, starts.front(), cfg.betas, cfg.t_end, cfg.integrator);

  std::ofstream os(out_path(ctx, cfg.label + "_sweep.csv"));
  os << std::setprecision(17) << "beta,kind,period,tail_diameter,terminal_velocity\n";
  for (const auto& e : sweep.entries) {
    os << e.beta << ",";
    if (e.error) {
      os << "error,,," << "\n";
      continue;
    }
    os << to_string(e.report.kind) << "," << e.report.period << ","
       << e.report.tail_diameter << "," << e.report.terminal_velocity << "\n";
  }

  if (!ctx.quiet) {
    for (const auto& e : sweep.entries) {
      report(ctx) << "beta=" << e.beta << ": ";
      if (e.error) {
        report(ctx) << "error: " << *e.error << "\n";
        continue;
      }
      describe(e.report, report(ctx));
      report(ctx) << "\n";
    }
    for (auto [a, b] : sweep.flip_brackets) {
      report(ctx) << "classification flips in beta bracket [" << a << ", " << b << "]\n";
    }
    if (sweep.flip_brackets.empty()) report(ctx) << "no classification flip\n";
  }
}

void cmd_agents(const RunConfig& cfg, const CommandContext& ctx) {
  auto game = build_game(cfg);
  auto g = build_graph(cfg, game);
  auto start = initial_states(cfg, game.size()).front();
  double beta = *cfg.beta;

  EnsembleRunOptions ropts;
  ropts.step = cfg.agent_step;
  ropts.record_dt = cfg.record_dt;
  ropts.seed = cfg.seed;
  auto ensemble = AgentEnsemble::from_state(start, cfg.players);
  auto traj = run_ensemble(ensemble, game, g, beta, cfg.t_end, ropts);
  traj.game_id = cfg.game_id;

  write_trajectory_csv(traj, out_path(ctx, cfg.label + "_agents.csv"));
  write_trajectory_json(traj, cfg.game_spec, out_path(ctx, cfg.label + "_agents.json"));

  // mean-field comparison on the same recording grid
  IntegratorOptions iopts = cfg.integrator;
  iopts.sample_dt = cfg.record_dt;
  auto ode = integrate(game, g, start, beta, cfg.t_end, iopts);
  double deviation = 0.0;
  std::size_t m = std::min(ode.size(), traj.size());
  for (std::size_t k = 0; k < m; ++k) {
    deviation = std::max(deviation,
                         (ode.states[k] - traj.states[k]).cwiseAbs().maxCoeff());
  }

  if (!ctx.quiet) {
    report(ctx) << "N=" << cfg.players << " seed=" << cfg.seed
                << ": sup deviation from mean field " << deviation << "\n";
  }
}

void cmd_diagnose(const RunConfig& cfg, const CommandContext& ctx) {
  auto loaded = read_trajectory_json(cfg.input_path);
  Trajectory& traj = loaded.trajectory;
  if (traj.size() < 3) {
    throw Error(ErrorCode::trajectory_too_short, "trajectory has fewer than 3 samples");
  }
  auto game = game_from_spec(loaded.game_spec);
  auto g = StrategyGraph::complete(game.size());

  RunConfig ref_cfg = cfg;
  auto ref = pick_reference(ref_cfg, game, traj.beta, traj.terminal());
  if (!ref) {
    throw Error(ErrorCode::not_potential_game,
                "diagnostics need a potential game with beta > 0 (or an explicit "
                "\"reference\" state)");
  }
  annotate_diagnostics(traj, game, g, *ref);

  double residual = dissipation_check(traj);
  auto fit = decay_rate_fit(traj);

  std::string stem = cfg.label == "diagnose" ? "diagnosed" : cfg.label;
  write_trajectory_csv(traj, out_path(ctx, stem + ".csv"));
  write_trajectory_json(traj, loaded.game_spec, out_path(ctx, stem + ".json"));

  if (!ctx.quiet) {
    report(ctx) << "reference " << format_state(ref->rho()) << "\n"
                << "dissipation residual " << residual << "\n"
                << "entropy decay rate " << fit.rate << " (r^2 " << fit.r_squared
                << ", " << fit.samples << " samples)\n";
  }
}

void cmd_examples(const CommandContext& ctx) {
  auto& os = report(ctx);
  for (const auto& name : builtin_game_names()) {
    auto game = builtin_game(name);
    os << name << " (n=" << game.size()
       << (game.is_potential_game() ? ", potential game" : "") << ")\n";
    if (game.matrix()) {
      const auto& a = *game.matrix();
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        os << "    [";
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
          if (j) os << ", ";
          os << a(i, j);
        }
        os << "]\n";
      }
    }
  }
  os << "congestion (any n, payoff matrix -Identity; use {\"game\": {\"matrix\": ...}})\n";
}

int run_command(const std::string& command, const std::string& config_path,
                const CommandContext& ctx, const std::string& seed_override) {
  try {
    if (command == "examples") {
      cmd_examples(ctx);
      return 0;
    }
    auto cfg = load_config(config_path, command);
    if (!seed_override.empty()) cfg.seed = std::stoull(seed_override);

    if (command == "simulate") {
      cmd_simulate(cfg, ctx);
    } else if (command == "gibbs") {
      cmd_gibbs(cfg, ctx);
    } else if (command == "stability") {
      cmd_stability(cfg, ctx);
    } else if (command == "sweep") {
      cmd_sweep(cfg, ctx);
    } else if (command == "agents") {
      cmd_agents(cfg, ctx);
    } else if (command == "diagnose") {
      cmd_diagnose(cfg, ctx);
    } else {
      std::cerr << "error: unknown command " << command << "\n";
      return 1;
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_validation_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace popdyn::cli
