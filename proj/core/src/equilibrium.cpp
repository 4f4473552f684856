#include "popdyn/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "popdyn/dynamics.hpp"
#include "popdyn/transport_metric.hpp"

namespace popdyn {

namespace {

// softmax(F/beta) with max shift; also reports K relative to the shift
Eigen::VectorXd gibbs_map_raw(const GameModel& model, const Eigen::VectorXd& rho,
                              double beta, double* normalization = nullptr) {
  Eigen::VectorXd f = model.payoff_raw(rho);
  double shift = f.maxCoeff();
  Eigen::VectorXd g = ((f.array() - shift) / beta).exp();
  double k = g.sum();
  if (normalization) *normalization = k * std::exp(shift / beta);
  return g / k;
}

}  // namespace

PopulationState gibbs_map(const GameModel& model, const PopulationState& rho,
                          NoiseLevel beta) {
  if (beta.beta <= 0.0) {
    throw Error(ErrorCode::unsupported_operation, "Gibbs map is undefined at beta = 0");
  }
  return PopulationState::validate(gibbs_map_raw(model, rho.rho(), beta.beta));
}

GibbsSolveResult solve_gibbs(const GameModel& model, NoiseLevel beta,
                             const GibbsSolveOptions& opts) {
  if (beta.beta <= 0.0) {
    throw Error(ErrorCode::unsupported_operation, "Gibbs solver requires beta > 0");
  }
  if (opts.num_starts < 1) {
    throw Error(ErrorCode::config_error, "num_starts must be >= 1");
  }

  const int n = model.size();
  std::mt19937_64 rng(opts.seed);
  std::exponential_distribution<double> exp1(1.0);

  GibbsSolveResult result;
  for (int start = 0; start < opts.num_starts; ++start) {
    Eigen::VectorXd rho(n);
    for (int i = 0; i < n; ++i) rho[i] = exp1(rng);  // Dirichlet(1,..,1)
    rho /= rho.sum();

    double alpha = opts.damping;
    double prev_residual = std::numeric_limits<double>::infinity();
    double residual = prev_residual;
    double normalization = 0.0;
    bool converged = false;
    for (long iter = 0; iter < opts.max_iterations; ++iter) {
      Eigen::VectorXd mapped = gibbs_map_raw(model, rho, beta.beta, &normalization);
      residual = (mapped - rho).lpNorm<Eigen::Infinity>();
      if (residual > prev_residual) alpha = std::max(alpha / 2, 1e-3);
      prev_residual = residual;
      rho = (1.0 - alpha) * rho + alpha * mapped;
      if (residual < opts.tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      ++result.failed_starts;
      continue;
    }

    bool matched = false;
    for (auto& m : result.measures) {
      if ((m.rho_star - rho).lpNorm<Eigen::Infinity>() < opts.cluster_radius) {
        ++m.basin_count;
        if (residual < m.residual) {
          m.rho_star = rho;
          m.residual = residual;
          m.normalization = normalization;
        }
        matched = true;
        break;
      }
    }
    if (!matched) {
      GibbsMeasure m;
      m.rho_star = rho;
      m.beta = beta.beta;
      m.residual = residual;
      m.normalization = normalization;
      m.basin_count = 1;
      result.measures.push_back(std::move(m));
    }
  }

  std::sort(result.measures.begin(), result.measures.end(),
            [](const GibbsMeasure& a, const GibbsMeasure& b) {
              return a.basin_count > b.basin_count;
            });
  return result;
}

double stability_lambda(const GameModel& model, const StrategyGraph& g,
                        const PopulationState& rho, NoiseLevel beta) {
  Eigen::MatrixXd hess = hessian_noisy_potential(model, rho, beta);
  Eigen::VectorXd bar_f = noisy_payoff(model, rho, beta);
  EdgeWeightSet weights = upwind_weights(g, rho, bar_f);
  Eigen::MatrixXd lap = weighted_laplacian(g, weights);

  const int n = g.size();
  // orthonormal basis of the mean-zero subspace: last n-1 Householder
  // columns of the QR factorization of the all-ones vector
  Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(n, 1, 1.0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd basis = q.rightCols(n - 1);

  // B phi = div(rho grad phi) = -L phi, so the curvature form is
  // -(L phi)^T Hess (L phi); the constraint form is phi^T L phi.
  Eigen::MatrixXd curvature = -(lap * hess * lap);
  Eigen::MatrixXd q_form = basis.transpose() * curvature * basis;
  Eigen::MatrixXd l_form = basis.transpose() * lap * basis;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> l_check(l_form);
  if (l_check.eigenvalues().minCoeff() < 1e-12) {
    throw Error(ErrorCode::degenerate_metric,
                "metric form is degenerate (zero weight across a cut)");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(q_form, l_form);
  return solver.eigenvalues().minCoeff();
}

JacobianResult jacobian_rhs(const GameModel& model, const StrategyGraph& g,
                            const PopulationState& rho, NoiseLevel beta) {
  JacobianResult out;
  Eigen::VectorXd bar_f = noisy_payoff_floored(model, rho.rho(), beta, kStateFloor);
  for (auto [i, j] : g.edges()) {
    if (std::abs(bar_f[i] - bar_f[j]) < 1e-8) {
      out.smooth = false;
      break;
    }
  }

  const int n = model.size();
  constexpr double kStep = 1e-6;
  out.jacobian.resize(n, n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd hi = rho.rho(), lo = rho.rho();
    hi[k] += kStep;
    lo[k] -= kStep;
    out.jacobian.col(k) =
        (rhs(model, g, hi, beta) - rhs(model, g, lo, beta)) / (2 * kStep);
  }
  return out;
}

}  // namespace popdyn
