#include <benchmark/benchmark.h>

#include <popdyn/agent_sim.hpp>
#include <popdyn/builtin_games.hpp>
#include <popdyn/dynamics.hpp>
#include <popdyn/equilibrium.hpp>

#include <random>

using namespace popdyn;

namespace {

PopulationState interior_state(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exp_dist(1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = exp_dist(rng) + 1e-3;
  return PopulationState::validate(v / v.sum());
}

GameModel congestion(int n) {
  return GameModel::from_matrix(-Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

static void BM_rhs(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto game = congestion(n);
  auto g = StrategyGraph::complete(n);
  Eigen::VectorXd rho = interior_state(n, 1).rho();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rhs(game, g, rho, 0.5));
  }
}
BENCHMARK(BM_rhs)->Arg(3)->Arg(10)->Arg(30)->Arg(100);

static void BM_integrate(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto game = congestion(n);
  auto g = StrategyGraph::complete(n);
  auto rho0 = interior_state(n, 2);
  IntegratorOptions opts;
  opts.sample_dt = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(game, g, rho0, 0.5, 10.0, opts));
  }
}
BENCHMARK(BM_integrate)->Arg(3)->Arg(10)->Arg(30);

static void BM_solve_gibbs(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto game = congestion(n);
  GibbsSolveOptions opts;
  opts.num_starts = 16;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_gibbs(game, 0.5, opts));
  }
}
BENCHMARK(BM_solve_gibbs)->Arg(3)->Arg(10)->Arg(30);

static void BM_stability_lambda(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto game = congestion(n);
  auto g = StrategyGraph::complete(n);
  auto rho = PopulationState::uniform(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stability_lambda(game, g, rho, 0.5));
  }
}
BENCHMARK(BM_stability_lambda)->Arg(3)->Arg(10)->Arg(30);

static void BM_agent_step(benchmark::State& state) {
  long players = state.range(0);
  auto game = builtin_game("stag_hunt");
  auto g = StrategyGraph::complete(2);
  auto ensemble = AgentEnsemble::from_state(
      PopulationState::validate(Eigen::Vector2d(0.7, 0.3)), players);
  EnsembleRunOptions opts;
  opts.step = 0.05;
  opts.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_ensemble(ensemble, game, g, 5.0, 1.0, opts));
  }
}
BENCHMARK(BM_agent_step)->Arg(1000)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
