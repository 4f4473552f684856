#include "popdyn/transport_metric.hpp"

#include <cmath>

namespace popdyn {

EdgeWeightSet upwind_weights(const StrategyGraph& g, const PopulationState& rho,
                             const NodeFunction& bar_f) {
  if (bar_f.size() != g.size() || rho.size() != g.size()) {
    throw Error(ErrorCode::length_mismatch, "state/payoff length must equal n");
  }
  EdgeWeightSet w(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [i, j] = g.edges()[e];
    double d = bar_f[j] - bar_f[i];
    if (std::abs(d) <= kTieBand) {
      w[e] = 0.5 * (rho[i] + rho[j]);
    } else if (d < 0.0) {
      w[e] = rho[j];
    } else {
      w[e] = rho[i];
    }
  }
  return w;
}

double inner_product(const StrategyGraph& g, const EdgeWeightSet& weights,
                     const NodeFunction& phi) {
  if (phi.size() != g.size()) {
    throw Error(ErrorCode::length_mismatch, "node function length must equal n");
  }
  double sum = 0.0;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [i, j] = g.edges()[e];
    double d = phi[i] - phi[j];
    sum += d * d * weights[e];  // both directions contribute, halved
  }
  return sum;
}

Eigen::MatrixXd weighted_laplacian(const StrategyGraph& g, const EdgeWeightSet& weights) {
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(g.size(), g.size());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [i, j] = g.edges()[e];
    lap(i, i) += weights[e];
    lap(j, j) += weights[e];
    lap(i, j) -= weights[e];
    lap(j, i) -= weights[e];
  }
  return lap;
}

}  // namespace popdyn
