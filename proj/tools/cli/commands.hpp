#pragma once

#include <iosfwd>
#include <string>

#include "run_config.hpp"

namespace popdyn::cli {

/// Shared command context: output directory, verbosity, report stream.
struct CommandContext {
  std::string out_dir = ".";
  bool quiet = false;
  std::ostream* report = nullptr;  // defaults to std::cout
};

void cmd_simulate(const RunConfig& cfg, const CommandContext& ctx);
void cmd_gibbs(const RunConfig& cfg, const CommandContext& ctx);
void cmd_stability(const RunConfig& cfg, const CommandContext& ctx);
void cmd_sweep(const RunConfig& cfg, const CommandContext& ctx);
void cmd_agents(const RunConfig& cfg, const CommandContext& ctx);
void cmd_diagnose(const RunConfig& cfg, const CommandContext& ctx);
void cmd_examples(const CommandContext& ctx);

/// Full dispatch used by main and the CLI tests: parses the config,
/// runs the command, and maps exceptions to the exit-code contract
/// (0 ok, 1 validation, 2 numerical).
int run_command(const std::string& command, const std::string& config_path,
                const CommandContext& ctx,
                const std::string& seed_override = "");

}  // namespace popdyn::cli
