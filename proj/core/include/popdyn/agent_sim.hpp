#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "popdyn/dynamics.hpp"
#include "popdyn/game_model.hpp"
#include "popdyn/strategy_graph.hpp"

namespace popdyn {

/// Finite population of N players distributed over the strategies.
struct AgentEnsemble {
  std::vector<long> counts;
  long total = 0;
  double time = 0.0;

  static AgentEnsemble from_counts(std::vector<long> counts);
  /// Rounds N * rho to integer counts (largest remainders absorb the
  /// rounding residue).
  static AgentEnsemble from_state(const PopulationState& rho, long n_players);

  Eigen::VectorXd empirical_state() const;
};

/// One revision step of length h: each player on strategy i moves to
/// neighbor j with probability (barF_j - barF_i)_+ h, independently;
/// players within a class are exchangeable, so the class is advanced with
/// one multinomial draw. The noisy payoffs use the empirical state with
/// the log term floored at 1/(2N).
void step_ensemble(AgentEnsemble& e, const GameModel& model, const StrategyGraph& g,
                   NoiseLevel beta, double h, std::mt19937_64& rng);

/// Step length 0.1 / max_i sum_j (barF_j - barF_i)_+ at the current state,
/// capped at `cap`.
double default_step(const AgentEnsemble& e, const GameModel& model,
                    const StrategyGraph& g, NoiseLevel beta, double cap = 0.5);

struct EnsembleRunOptions {
  double step = 0.0;       // 0 = adaptive (default_step each step)
  double record_dt = 0.5;  // empirical state recorded at this spacing
  unsigned long long seed = 0;
};

/// Repeated stepping to t_end with recorded empirical states.
/// Bit-reproducible for a fixed seed.
Trajectory run_ensemble(AgentEnsemble e, const GameModel& model, const StrategyGraph& g,
                        NoiseLevel beta, double t_end, const EnsembleRunOptions& opts);

}  // namespace popdyn
