#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <utility>

#include "popdyn/errors.hpp"
#include "popdyn/strategy_graph.hpp"

namespace popdyn {

/// Point of the probability simplex: the population state rho.
class PopulationState {
public:
  /// Validates sum(rho) = 1 within 1e-9 and rho_i >= -1e-12.
  static PopulationState validate(Eigen::VectorXd rho);

  static PopulationState uniform(int n);

  const Eigen::VectorXd& rho() const { return rho_; }
  double operator[](Eigen::Index i) const { return rho_[i]; }
  Eigen::Index size() const { return rho_.size(); }

  /// True if every component is strictly positive.
  bool interior() const { return rho_.minCoeff() > 0.0; }

private:
  explicit PopulationState(Eigen::VectorXd rho) : rho_(std::move(rho)) {}
  Eigen::VectorXd rho_;
};

/// Nonnegative noise strength (payoff units per nat of entropy).
struct NoiseLevel {
  double beta = 0.0;
  NoiseLevel(double b) : beta(b) {  // NOLINT: implicit by design
    if (!(b >= 0.0)) throw Error(ErrorCode::config_error, "beta must be >= 0");
  }
};

using PayoffFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using PotentialFn = std::function<double(const Eigen::VectorXd&)>;

/// Payoff structure of a population game. Immutable and shareable; payoff
/// evaluators must be pure functions of rho.
class GameModel {
public:
  /// Matrix game F(rho) = A rho. A symmetric A yields the potential
  /// (1/2) rho^T A rho and sets the potential-game flag.
  static GameModel from_matrix(Eigen::MatrixXd A);

  /// Matrix game with an explicitly declared potential. The declared
  /// potential must reproduce the payoffs (finite-difference gradient
  /// check at 10 random interior states, tolerance 1e-5); failure is a
  /// construction error.
  static GameModel from_matrix_with_potential(Eigen::MatrixXd A, PotentialFn potential);

  /// General payoff callback, optionally with a declared potential
  /// (checked as above).
  static GameModel from_callbacks(int n, PayoffFn payoff,
                                  std::optional<PotentialFn> potential = std::nullopt);

  int size() const { return n_; }
  bool is_potential_game() const { return potential_.has_value(); }
  const std::optional<Eigen::MatrixXd>& matrix() const { return matrix_; }

  Eigen::VectorXd payoff(const PopulationState& rho) const;
  Eigen::VectorXd payoff_raw(const Eigen::VectorXd& rho) const;

  double potential(const Eigen::VectorXd& rho) const;

private:
  GameModel() = default;
  void check_potential_consistency() const;

  int n_ = 0;
  PayoffFn payoff_;
  std::optional<Eigen::MatrixXd> matrix_;
  std::optional<PotentialFn> potential_;
  bool hessian_is_matrix_ = false;  // Hess F == A (symmetric matrix game)

  friend Eigen::MatrixXd hessian_noisy_potential(const GameModel&, const PopulationState&,
                                                 NoiseLevel);
};

/// bar F_i = F_i(rho) - beta log rho_i. With beta = 0 this is the payoff
/// itself (no log evaluation). Requires an interior state when beta > 0.
Eigen::VectorXd noisy_payoff(const GameModel& model, const PopulationState& rho,
                             NoiseLevel beta);

/// As noisy_payoff, but components of rho below `log_floor` are clamped to
/// it before the log. Used by the integrator (floor 1e-12) and the agent
/// simulator (floor 1/(2N)), where empirical states may touch the boundary.
Eigen::VectorXd noisy_payoff_floored(const GameModel& model, const Eigen::VectorXd& rho,
                                     NoiseLevel beta, double log_floor);

/// Noisy potential bar F(rho) = F(rho) - beta sum_i rho_i log rho_i.
/// Requires a potential game. Zero components contribute 0 to the entropy.
double noisy_potential(const GameModel& model, const PopulationState& rho, NoiseLevel beta);

/// Free energy = -noisy_potential. The quantity that decreases along
/// trajectories of potential games.
double free_energy(const GameModel& model, const PopulationState& rho, NoiseLevel beta);

/// Hess F(rho) - beta diag(1/rho_i). Exact for symmetric matrix games;
/// otherwise central finite differences (step 1e-5) on the potential.
Eigen::MatrixXd hessian_noisy_potential(const GameModel& model, const PopulationState& rho,
                                        NoiseLevel beta);

struct NashCheck {
  bool is_nash = false;
  // (used strategy, better strategy) witnessing the violation
  std::optional<std::pair<int, int>> violation;
};

/// Nash test: every strategy with rho_i > tol earns within tol of the best.
NashCheck is_nash(const GameModel& model, const PopulationState& rho, double tol);

}  // namespace popdyn
