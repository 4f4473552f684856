#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "popdyn/game_model.hpp"
#include "popdyn/strategy_graph.hpp"

namespace popdyn {

/// A converged fixed point rho*_i = exp(F_i(rho*)/beta) / K.
struct GibbsMeasure {
  Eigen::VectorXd rho_star;
  double beta = 0.0;
  double residual = 0.0;       // sup-norm of rho* - G(rho*)
  double normalization = 0.0;  // K at the solution
  std::optional<double> lambda;
  int basin_count = 0;  // solver starts converging to this cluster
};

/// One application of the Gibbs map G(rho) = softmax(F(rho)/beta),
/// computed with a max shift. Requires beta > 0.
PopulationState gibbs_map(const GameModel& model, const PopulationState& rho, NoiseLevel beta);

struct GibbsSolveOptions {
  int num_starts = 64;
  double tol = 1e-10;
  long max_iterations = 100000;
  double damping = 0.5;          // initial mixing weight on the map
  double cluster_radius = 1e-5;  // sup-norm clustering of converged points
  unsigned long long seed = 0;
};

struct GibbsSolveResult {
  std::vector<GibbsMeasure> measures;  // one per cluster, largest basin first
  int failed_starts = 0;
};

/// Damped fixed-point iteration from Dirichlet(1,..,1) random starts;
/// converged points are clustered and reported once per cluster.
/// Non-convergence of individual starts is counted, not fatal.
GibbsSolveResult solve_gibbs(const GameModel& model, NoiseLevel beta,
                             const GibbsSolveOptions& opts = {});

/// Minimal curvature of the noisy potential along transport directions:
/// the smallest eigenvalue of  -B^T Hess barF B  relative to the metric
/// form, over phi orthogonal to constants, where B phi = div(rho grad phi)
/// with upwind weights at rho. Positive at a Gibbs measure implies
/// asymptotic stability with entropy decay rate 2 lambda.
double stability_lambda(const GameModel& model, const StrategyGraph& g,
                        const PopulationState& rho, NoiseLevel beta);

struct JacobianResult {
  Eigen::MatrixXd jacobian;
  /// False when some edge has |barF_i - barF_j| < 1e-8: the state sits on
  /// (or near) a kink of the flow and the central difference returns the
  /// symmetrized linearization.
  bool smooth = true;
};

/// Central finite-difference Jacobian of the flow's right-hand side
/// (step 1e-6).
JacobianResult jacobian_rhs(const GameModel& model, const StrategyGraph& g,
                            const PopulationState& rho, NoiseLevel beta);

}  // namespace popdyn
