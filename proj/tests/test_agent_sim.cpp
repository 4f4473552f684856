#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <popdyn/agent_sim.hpp>
#include <popdyn/builtin_games.hpp>
#include <popdyn/dynamics.hpp>

#include <cmath>
#include <random>

#include "test_util.hpp"

using namespace popdyn;

TEST_CASE("ensemble construction") {
  auto e = AgentEnsemble::from_counts({3, 0, 7});
  CHECK(e.total == 10);
  CHECK(e.empirical_state()[2] == doctest::Approx(0.7));
  CHECK_THROWS_AS(AgentEnsemble::from_counts({-1, 2}), Error);
  CHECK_THROWS_AS(AgentEnsemble::from_counts({0, 0}), Error);
}

TEST_CASE("from_state rounds by largest remainder") {
  auto e = AgentEnsemble::from_state(
      PopulationState::validate(Eigen::Vector2d(0.26, 0.74)), 10);
  CHECK(e.counts == std::vector<long>{3, 7});

  std::mt19937_64 rng(83);
  for (int t = 0; t < 50; ++t) {
    int n = 2 + static_cast<int>(rng() % 4);
    long players = 1 + static_cast<long>(rng() % 500);
    auto rho = PopulationState::validate(random_interior_state(rng, n));
    auto ens = AgentEnsemble::from_state(rho, players);
    CHECK(ens.total == players);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(static_cast<double>(ens.counts[i]) - rho[i] * players) < 1.0);
    }
  }
}

namespace {
GameModel constant_payoff_game(double f1, double f2) {
  return GameModel::from_callbacks(
      2, [f1, f2](const Eigen::VectorXd&) { return Eigen::Vector2d(f1, f2); });
}
}  // namespace

TEST_CASE("a class with the best payoff never moves") {
  auto game = constant_payoff_game(1.0, 0.0);
  auto g = StrategyGraph::complete(2);
  auto e = AgentEnsemble::from_counts({500, 500});
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) step_ensemble(e, game, g, 0.0, 0.1, rng);
  CHECK(e.counts[0] + e.counts[1] == 1000);
  CHECK(e.counts[0] >= 500);  // class 1 only ever gains
}

TEST_CASE("switch counts follow the binomial mean") {
  // gap d = 0.3, h = 0.5: each of 100000 players on strategy 1 moves with
  // probability 0.15
  auto game = constant_payoff_game(0.0, 0.3);
  auto g = StrategyGraph::complete(2);
  auto e = AgentEnsemble::from_counts({100000, 0});
  std::mt19937_64 rng(2);
  step_ensemble(e, game, g, 0.0, 0.5, rng);
  double sigma = std::sqrt(100000 * 0.15 * 0.85);
  CHECK(std::abs(static_cast<double>(e.counts[1]) - 15000.0) <= 5.0 * sigma);
}

TEST_CASE("overlong steps are rejected") {
  auto game = constant_payoff_game(0.0, 3.0);
  auto g = StrategyGraph::complete(2);
  auto e = AgentEnsemble::from_counts({10, 10});
  std::mt19937_64 rng(3);
  bool threw = false;
  try {
    step_ensemble(e, game, g, 0.0, 0.5, rng);  // rate 3 * h = 1.5 > 1
  } catch (const Error& err) {
    threw = true;
    CHECK(err.code() == ErrorCode::step_too_large);
  }
  CHECK(threw);
  CHECK_THROWS_AS(step_ensemble(e, game, g, 0.0, -0.1, rng), Error);
}

TEST_CASE("default step is 0.1 over the maximal exit rate, capped") {
  auto g = StrategyGraph::complete(2);
  auto e = AgentEnsemble::from_counts({1, 1});
  CHECK(default_step(e, constant_payoff_game(0.0, 0.4), g, 0.0) ==
        doctest::Approx(0.25));
  // no uphill direction anywhere: fall back to the cap
  CHECK(default_step(e, constant_payoff_game(1.0, 1.0), g, 0.0) == 0.5);
  CHECK(default_step(e, constant_payoff_game(0.0, 0.4), g, 0.0, 0.1) ==
        doctest::Approx(0.1));
}

TEST_CASE("single player occupancy matches the two-state chain") {
  // one player, constant gap: the embedded chain has closed-form switch
  // rates, giving stationary occupancy p21 / (p12 + p21)
  auto game = constant_payoff_game(0.3, 0.0);
  auto g = StrategyGraph::complete(2);
  double beta = 0.5;
  double floor = 0.5;  // 1/(2N) with N = 1
  double rate12 = std::max((0.0 - beta * std::log(floor)) - 0.3, 0.0);
  double rate21 = std::max((0.3 - beta * std::log(floor)) - 0.0, 0.0);
  double pi1 = rate21 / (rate12 + rate21);

  auto e = AgentEnsemble::from_counts({1, 0});
  std::mt19937_64 rng(4);
  long at_one = 0;
  const long steps = 400000;
  for (long k = 0; k < steps; ++k) {
    step_ensemble(e, game, g, beta, 0.5, rng);
    at_one += e.counts[0];
  }
  CHECK(static_cast<double>(at_one) / static_cast<double>(steps) ==
        doctest::Approx(pi1).epsilon(0.015));
}

TEST_CASE("runs are reproducible per seed") {
  auto game = builtin_game("stag_hunt");
  auto g = StrategyGraph::complete(2);
  auto e = AgentEnsemble::from_counts({700, 300});
  EnsembleRunOptions opts;
  opts.seed = 99;
  auto a = run_ensemble(e, game, g, 0.5, 5.0, opts);
  auto b = run_ensemble(e, game, g, 0.5, 5.0, opts);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.times[k] == b.times[k]);
    CHECK((a.states[k] - b.states[k]).cwiseAbs().maxCoeff() == 0.0);
  }
  opts.seed = 100;
  auto c = run_ensemble(e, game, g, 0.5, 5.0, opts);
  double diff = 0.0;
  for (std::size_t k = 0; k < std::min(a.size(), c.size()); ++k) {
    diff = std::max(diff, (a.states[k] - c.states[k]).cwiseAbs().maxCoeff());
  }
  CHECK(diff > 0.0);
}

TEST_CASE("recording lands on the requested grid") {
  auto game = builtin_game("stag_hunt");
  auto g = StrategyGraph::complete(2);
  auto e = AgentEnsemble::from_counts({600, 400});
  EnsembleRunOptions opts;
  opts.record_dt = 0.5;
  auto traj = run_ensemble(e, game, g, 0.5, 4.0, opts);
  REQUIRE(traj.size() == 9);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CHECK(traj.times[k] == doctest::Approx(0.5 * static_cast<double>(k)).epsilon(1e-9));
  }
  CHECK(traj.ensemble_size == 1000);
  CHECK(traj.beta == 0.5);
}

TEST_CASE("large ensembles track the mean-field flow") {
  auto game = builtin_game("stag_hunt");
  auto g = StrategyGraph::complete(2);
  auto start = PopulationState::validate(Eigen::Vector2d(0.7, 0.3));
  double beta = 5.0;
  auto ode = integrate(game, g, start, beta, 10.0);
  EnsembleRunOptions opts;
  opts.seed = 12;
  auto mc = run_ensemble(AgentEnsemble::from_state(start, 2000), game, g, beta, 10.0, opts);
  CHECK((mc.terminal() - ode.terminal()).cwiseAbs().maxCoeff() <= 0.1);
}
