#include "popdyn/game_model.hpp"

#include <cmath>
#include <random>

namespace popdyn {

PopulationState PopulationState::validate(Eigen::VectorXd rho) {
  if (rho.size() < 2) {
    throw Error(ErrorCode::too_few_strategies, "state needs at least 2 components");
  }
  if (!rho.allFinite()) {
    throw Error(ErrorCode::invalid_simplex_point, "state has non-finite components");
  }
  if (std::abs(rho.sum() - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_simplex_point,
                "state mass deviates from 1 by more than 1e-9");
  }
  if (rho.minCoeff() < -1e-12) {
    throw Error(ErrorCode::invalid_simplex_point, "negative component in state");
  }
  return PopulationState(std::move(rho));
}

PopulationState PopulationState::uniform(int n) {
  return validate(Eigen::VectorXd::Constant(n, 1.0 / n));
}

GameModel GameModel::from_matrix(Eigen::MatrixXd A) {
  if (A.rows() != A.cols() || A.rows() < 2) {
    throw Error(ErrorCode::length_mismatch, "payoff matrix must be square, n >= 2");
  }
  GameModel m;
  m.n_ = static_cast<int>(A.rows());
  Eigen::MatrixXd Acopy = A;
  m.payoff_ = [Acopy](const Eigen::VectorXd& rho) { return Acopy * rho; };
  if (A.isApprox(A.transpose(), 1e-12)) {
    m.potential_ = [Acopy](const Eigen::VectorXd& rho) {
      return 0.5 * rho.dot(Acopy * rho);
    };
    m.hessian_is_matrix_ = true;
  }
  m.matrix_ = std::move(A);
  return m;
}

GameModel GameModel::from_matrix_with_potential(Eigen::MatrixXd A, PotentialFn potential) {
  GameModel m = from_matrix(std::move(A));
  m.potential_ = std::move(potential);
  m.hessian_is_matrix_ = false;
  m.check_potential_consistency();
  return m;
}

GameModel GameModel::from_callbacks(int n, PayoffFn payoff,
                                    std::optional<PotentialFn> potential) {
  if (n < 2) {
    throw Error(ErrorCode::too_few_strategies, "a game needs at least 2 strategies");
  }
  GameModel m;
  m.n_ = n;
  m.payoff_ = std::move(payoff);
  m.potential_ = std::move(potential);
  if (m.potential_) m.check_potential_consistency();
  return m;
}

void GameModel::check_potential_consistency() const {
  // dF/drho_i must reproduce F_i at random interior simplex states.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::exponential_distribution<double> exp1(1.0);
  constexpr double kStep = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd rho(n_);
    for (int i = 0; i < n_; ++i) rho[i] = exp1(rng) + 1e-3;
    rho /= rho.sum();
    Eigen::VectorXd f = payoff_(rho);
    for (int i = 0; i < n_; ++i) {
      Eigen::VectorXd hi = rho, lo = rho;
      hi[i] += kStep;
      lo[i] -= kStep;
      double fd = ((*potential_)(hi) - (*potential_)(lo)) / (2 * kStep);
      if (std::abs(fd - f[i]) > 1e-5) {
        throw Error(ErrorCode::potential_gradient_mismatch,
                    "declared potential does not generate the payoffs (strategy " +
                        std::to_string(i + 1) + ")");
      }
    }
  }
}

Eigen::VectorXd GameModel::payoff(const PopulationState& rho) const {
  return payoff_raw(rho.rho());
}

Eigen::VectorXd GameModel::payoff_raw(const Eigen::VectorXd& rho) const {
  if (rho.size() != n_) {
    throw Error(ErrorCode::length_mismatch, "state length must equal n");
  }
  Eigen::VectorXd f = payoff_(rho);
  if (f.size() != n_ || !f.allFinite()) {
    throw Error(ErrorCode::evaluation_error, "payoff evaluator returned invalid values");
  }
  return f;
}

double GameModel::potential(const Eigen::VectorXd& rho) const {
  if (!potential_) {
    throw Error(ErrorCode::not_potential_game, "model has no potential");
  }
  return (*potential_)(rho);
}

Eigen::VectorXd noisy_payoff(const GameModel& model, const PopulationState& rho,
                             NoiseLevel beta) {
  Eigen::VectorXd f = model.payoff(rho);
  if (beta.beta == 0.0) return f;
  if (!rho.interior()) {
    throw Error(ErrorCode::boundary_state,
                "noisy payoff needs an interior state when beta > 0");
  }
  return f - beta.beta * rho.rho().array().log().matrix();
}

Eigen::VectorXd noisy_payoff_floored(const GameModel& model, const Eigen::VectorXd& rho,
                                     NoiseLevel beta, double log_floor) {
  Eigen::VectorXd f = model.payoff_raw(rho);
  if (beta.beta == 0.0) return f;
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    f[i] -= beta.beta * std::log(std::max(rho[i], log_floor));
  }
  return f;
}

double noisy_potential(const GameModel& model, const PopulationState& rho, NoiseLevel beta) {
  double value = model.potential(rho.rho());
  if (beta.beta > 0.0) {
    double entropy_sum = 0.0;  // sum rho_i log rho_i, with 0 log 0 = 0
    for (Eigen::Index i = 0; i < rho.size(); ++i) {
      if (rho[i] > 0.0) entropy_sum += rho[i] * std::log(rho[i]);
    }
    value -= beta.beta * entropy_sum;
  }
  return value;
}

double free_energy(const GameModel& model, const PopulationState& rho, NoiseLevel beta) {
  return -noisy_potential(model, rho, beta);
}

Eigen::MatrixXd hessian_noisy_potential(const GameModel& model, const PopulationState& rho,
                                        NoiseLevel beta) {
  if (!model.is_potential_game()) {
    throw Error(ErrorCode::not_potential_game, "Hessian needs a potential game");
  }
  if (!rho.interior()) {
    throw Error(ErrorCode::boundary_state, "Hessian needs an interior state");
  }
  const int n = model.size();
  Eigen::MatrixXd hess(n, n);
  if (model.hessian_is_matrix_) {
    hess = *model.matrix();
  } else {
    constexpr double kStep = 1e-5;
    const Eigen::VectorXd& x = rho.rho();
    double f0 = model.potential(x);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
        pp[i] += kStep; pp[j] += kStep;
        pm[i] += kStep; pm[j] -= kStep;
        mp[i] -= kStep; mp[j] += kStep;
        mm[i] -= kStep; mm[j] -= kStep;
        double v;
        if (i == j) {
          Eigen::VectorXd hi = x, lo = x;
          hi[i] += kStep;
          lo[i] -= kStep;
          v = (model.potential(hi) - 2 * f0 + model.potential(lo)) / (kStep * kStep);
        } else {
          v = (model.potential(pp) - model.potential(pm) - model.potential(mp) +
               model.potential(mm)) /
              (4 * kStep * kStep);
        }
        hess(i, j) = v;
        hess(j, i) = v;
      }
    }
  }
  if (beta.beta > 0.0) {
    for (int i = 0; i < n; ++i) hess(i, i) -= beta.beta / rho[i];
  }
  return hess;
}

NashCheck is_nash(const GameModel& model, const PopulationState& rho, double tol) {
  Eigen::VectorXd f = model.payoff(rho);
  for (int i = 0; i < model.size(); ++i) {
    if (rho[i] <= tol) continue;
    for (int j = 0; j < model.size(); ++j) {
      if (f[i] < f[j] - tol) {
        return NashCheck{false, std::make_pair(i, j)};
      }
    }
  }
  return NashCheck{true, std::nullopt};
}

}  // namespace popdyn
