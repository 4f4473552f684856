#include <CLI11.hpp>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fokker-Planck dynamics for population games on strategy graphs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string seed_override;
  popdyn::cli::CommandContext ctx;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "integrate the flow and classify the attractor"},
      {"gibbs", "solve for Gibbs measures from random starts"},
      {"stability", "stability exponent at a rest point"},
      {"sweep", "classify attractors across a list of beta values"},
      {"agents", "finite-population Markov simulation"},
      {"diagnose", "recompute diagnostics for a stored trajectory"},
      {"examples", "list builtin games with their payoff matrices"},
  };
  for (const auto& [name, desc] : commands) {
    auto* sub = app.add_subcommand(name, desc);
    if (name != "examples") {
      sub->add_option("--config", config_path, "JSON run configuration")
          ->required()
          ->check(CLI::ExistingFile);
    }
    sub->add_option("--out", ctx.out_dir, "output directory (default: .)");
    sub->add_option("--seed", seed_override, "override the config seed");
    sub->add_flag("--quiet", ctx.quiet, "suppress the report on stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems are validation failures
  }

  return popdyn::cli::run_command(app.get_subcommands().front()->get_name(), config_path,
                                  ctx, seed_override);
}
