#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "popdyn/errors.hpp"

namespace popdyn {

/// A real-valued function on the strategy set (one value per strategy).
using NodeFunction = Eigen::VectorXd;

class StrategyGraph;

/// Antisymmetric flux on the edges of a strategy graph. One value is
/// stored per canonical edge (i < j); value(i, j) = -value(j, i) holds by
/// construction.
class EdgeFlux {
public:
  explicit EdgeFlux(std::size_t edge_count)
      : values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(edge_count))) {}

  /// Folds a dense n-by-n matrix of directed values into canonical storage.
  /// Off-edge entries are ignored; |m(i,j) + m(j,i)| > 1e-12 is rejected.
  static EdgeFlux from_matrix(const StrategyGraph& g, const Eigen::MatrixXd& m);

  double canonical(std::size_t edge_idx) const {
    return values_[static_cast<Eigen::Index>(edge_idx)];
  }
  double& canonical(std::size_t edge_idx) {
    return values_[static_cast<Eigen::Index>(edge_idx)];
  }
  Eigen::Index size() const { return values_.size(); }

private:
  Eigen::VectorXd values_;  // one per canonical edge, oriented low -> high
};

/// Undirected, connected graph on the strategy set S = {1,..,n}.
///
/// Strategies are 1-indexed in the public construction API (edge lists,
/// labels) to match the usual game-theoretic convention; everything else
/// in the library works with 0-based positions into vectors of length n.
/// Immutable after construction; safe to share across threads.
class StrategyGraph {
public:
  /// Validated construction from a 1-indexed edge list. Duplicate edges
  /// are collapsed. Rejects n < 2, self-loops, out-of-range indices and
  /// disconnected graphs with distinct error codes.
  static StrategyGraph build(int n,
                             const std::vector<std::pair<int, int>>& edges_1based,
                             std::vector<std::string> labels = {});

  /// Complete graph on n >= 2 strategies.
  static StrategyGraph complete(int n, std::vector<std::string> labels = {});

  int size() const { return n_; }
  const std::vector<int>& neighbors(int i) const { return adjacency_[i]; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Canonical index of the undirected edge {i, j}; nullopt if absent.
  std::optional<std::size_t> edge_index(int i, int j) const;

  /// Directed flux component: +canonical for (low, high), negated otherwise.
  double flux_value(const EdgeFlux& m, int i, int j) const;

private:
  StrategyGraph() = default;

  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;      // canonical, first < second
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> edge_lookup_;                // n*n flat, -1 if absent
  std::vector<std::string> labels_;
};

/// Discrete gradient: value(i, j) = phi_i - phi_j on edges.
EdgeFlux gradient(const StrategyGraph& g, const NodeFunction& phi);

/// Discrete divergence: div(m)_i = -sum_{j in N(i)} m_ij. Sums to zero.
NodeFunction divergence(const StrategyGraph& g, const EdgeFlux& m);

}  // namespace popdyn
