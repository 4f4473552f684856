#pragma once

#include <Eigen/Dense>

#include "popdyn/game_model.hpp"
#include "popdyn/strategy_graph.hpp"

namespace popdyn {

/// Symmetric upwind edge weights g_ij(rho); one value per canonical edge.
class EdgeWeightSet {
public:
  explicit EdgeWeightSet(std::size_t edge_count)
      : values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(edge_count))) {}

  double operator[](std::size_t edge_idx) const {
    return values_[static_cast<Eigen::Index>(edge_idx)];
  }
  double& operator[](std::size_t edge_idx) {
    return values_[static_cast<Eigen::Index>(edge_idx)];
  }
  Eigen::Index size() const { return values_.size(); }

private:
  Eigen::VectorXd values_;
};

/// Half-width of the band around bar F_i == bar F_j mapped to the average
/// branch. Keeps the weights continuous across the switching surface.
inline constexpr double kTieBand = 1e-13;

/// Upwind case table: g_ij = rho_j if barF_j < barF_i, rho_i if
/// barF_j > barF_i, (rho_i + rho_j)/2 at ties.
EdgeWeightSet upwind_weights(const StrategyGraph& g, const PopulationState& rho,
                             const NodeFunction& bar_f);

/// (grad phi, grad phi)_rho = (1/2) sum over both edge directions of
/// (phi_i - phi_j)^2 g_ij. Nonnegative; gauge-invariant in phi.
double inner_product(const StrategyGraph& g, const EdgeWeightSet& weights,
                     const NodeFunction& phi);

/// Weighted graph Laplacian L of the metric: phi^T L phi equals the inner
/// product above. Positive semidefinite with the constants in its kernel.
Eigen::MatrixXd weighted_laplacian(const StrategyGraph& g, const EdgeWeightSet& weights);

}  // namespace popdyn
