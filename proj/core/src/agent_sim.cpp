#include "popdyn/agent_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace popdyn {

AgentEnsemble AgentEnsemble::from_counts(std::vector<long> counts) {
  AgentEnsemble e;
  e.total = 0;
  for (long c : counts) {
    if (c < 0) throw Error(ErrorCode::config_error, "negative player count");
    e.total += c;
  }
  if (e.total < 1) throw Error(ErrorCode::config_error, "ensemble needs at least 1 player");
  e.counts = std::move(counts);
  return e;
}

AgentEnsemble AgentEnsemble::from_state(const PopulationState& rho, long n_players) {
  if (n_players < 1) {
    throw Error(ErrorCode::config_error, "ensemble needs at least 1 player");
  }
  const auto n = rho.size();
  std::vector<long> counts(n);
  std::vector<std::pair<double, Eigen::Index>> remainders(n);
  long assigned = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double exact = rho[i] * static_cast<double>(n_players);
    counts[i] = static_cast<long>(std::floor(exact));
    assigned += counts[i];
    remainders[i] = {exact - std::floor(exact), i};
  }
  std::sort(remainders.begin(), remainders.end(), std::greater<>());
  for (long k = 0; k < n_players - assigned; ++k) {
    ++counts[remainders[static_cast<std::size_t>(k) % n].second];
  }
  return from_counts(std::move(counts));
}

Eigen::VectorXd AgentEnsemble::empirical_state() const {
  Eigen::VectorXd rho(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    rho[static_cast<Eigen::Index>(i)] =
        static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return rho;
}

namespace {

Eigen::VectorXd ensemble_noisy_payoff(const AgentEnsemble& e, const GameModel& model,
                                      NoiseLevel beta) {
  // empty strategies would have barF = +inf for beta > 0; the log term is
  // floored at 1/(2N), below the resolution of the empirical measure
  double log_floor = 1.0 / (2.0 * static_cast<double>(e.total));
  return noisy_payoff_floored(model, e.empirical_state(), beta, log_floor);
}

}  // namespace

void step_ensemble(AgentEnsemble& e, const GameModel& model, const StrategyGraph& g,
                   NoiseLevel beta, double h, std::mt19937_64& rng) {
  if (h <= 0.0) throw Error(ErrorCode::config_error, "step must be positive");
  Eigen::VectorXd bar_f = ensemble_noisy_payoff(e, model, beta);

  const int n = g.size();
  for (int i = 0; i < n; ++i) {
    double total_rate = 0.0;
    for (int j : g.neighbors(i)) total_rate += std::max(bar_f[j] - bar_f[i], 0.0);
    if (total_rate * h > 1.0) {
      throw Error(ErrorCode::step_too_large,
                  "switch probabilities exceed 1 for strategy " + std::to_string(i + 1));
    }
  }

  // multinomial draw per strategy class, via sequential binomials
  std::vector<long> moved_in(n, 0);
  std::vector<long> moved_out(n, 0);
  for (int i = 0; i < n; ++i) {
    long remaining = e.counts[i];
    if (remaining == 0) continue;
    double prob_left = 1.0;
    for (int j : g.neighbors(i)) {
      double p = std::max(bar_f[j] - bar_f[i], 0.0) * h;
      if (p <= 0.0 || remaining == 0) continue;
      double conditional = std::min(p / prob_left, 1.0);
      long movers = std::binomial_distribution<long>(remaining, conditional)(rng);
      moved_in[j] += movers;
      moved_out[i] += movers;
      remaining -= movers;
      prob_left -= p;
    }
  }
  for (int i = 0; i < n; ++i) e.counts[i] += moved_in[i] - moved_out[i];
  e.time += h;

  long total = std::accumulate(e.counts.begin(), e.counts.end(), 0L);
  if (total != e.total) {
    throw Error(ErrorCode::invariant_violation, "player count not conserved");
  }
}

double default_step(const AgentEnsemble& e, const GameModel& model,
                    const StrategyGraph& g, NoiseLevel beta, double cap) {
  Eigen::VectorXd bar_f = ensemble_noisy_payoff(e, model, beta);
  double max_rate = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    double total_rate = 0.0;
    for (int j : g.neighbors(i)) total_rate += std::max(bar_f[j] - bar_f[i], 0.0);
    max_rate = std::max(max_rate, total_rate);
  }
  if (max_rate <= 0.0) return cap;
  return std::min(0.1 / max_rate, cap);
}

Trajectory run_ensemble(AgentEnsemble e, const GameModel& model, const StrategyGraph& g,
                        NoiseLevel beta, double t_end, const EnsembleRunOptions& opts) {
  if (t_end <= 0.0) throw Error(ErrorCode::config_error, "t_end must be positive");
  std::mt19937_64 rng(opts.seed);

  Trajectory traj;
  traj.beta = beta.beta;
  traj.ensemble_size = e.total;
  traj.seed = opts.seed;

  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.states.push_back(e.empirical_state());
    traj.relative_entropy.push_back(std::numeric_limits<double>::quiet_NaN());
    traj.fisher_information.push_back(std::numeric_limits<double>::quiet_NaN());
  };
  record(0.0);

  double next_record = opts.record_dt;
  while (e.time < t_end - 1e-12) {
    double h = opts.step > 0.0 ? opts.step : default_step(e, model, g, beta);
    h = std::min({h, t_end - e.time, next_record - e.time});
    step_ensemble(e, model, g, beta, h, rng);
    ++traj.stats.steps_accepted;
    if (e.time >= next_record - 1e-12) {
      record(e.time);
      next_record += opts.record_dt;
    }
  }
  if (traj.times.back() < e.time) record(e.time);
  return traj;
}

}  // namespace popdyn
