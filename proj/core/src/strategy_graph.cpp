#include "popdyn/strategy_graph.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace popdyn {

EdgeFlux EdgeFlux::from_matrix(const StrategyGraph& g, const Eigen::MatrixXd& m) {
  if (m.rows() != g.size() || m.cols() != g.size()) {
    throw Error(ErrorCode::length_mismatch, "flux matrix must be n-by-n");
  }
  EdgeFlux out(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [i, j] = g.edges()[e];
    if (std::abs(m(i, j) + m(j, i)) > 1e-12) {
      throw Error(ErrorCode::antisymmetry_violation,
                  "flux is not antisymmetric on edge (" + std::to_string(i + 1) +
                      "," + std::to_string(j + 1) + ")");
    }
    out.canonical(e) = m(i, j);
  }
  return out;
}

StrategyGraph StrategyGraph::build(int n,
                                   const std::vector<std::pair<int, int>>& edges_1based,
                                   std::vector<std::string> labels) {
  if (n < 2) {
    throw Error(ErrorCode::too_few_strategies, "a game needs at least 2 strategies");
  }
  if (!labels.empty() && static_cast<int>(labels.size()) != n) {
    throw Error(ErrorCode::length_mismatch, "label count must equal n");
  }
  std::set<std::pair<int, int>> canonical;
  for (auto [a, b] : edges_1based) {
    if (a < 1 || a > n || b < 1 || b > n) {
      throw Error(ErrorCode::index_out_of_range,
                  "edge {" + std::to_string(a) + "," + std::to_string(b) +
                      "} out of range [1," + std::to_string(n) + "]");
    }
    if (a == b) {
      throw Error(ErrorCode::self_loop, "self-loop on strategy " + std::to_string(a));
    }
    canonical.emplace(std::min(a, b) - 1, std::max(a, b) - 1);
  }

  StrategyGraph g;
  g.n_ = n;
  g.labels_ = std::move(labels);
  g.edges_.assign(canonical.begin(), canonical.end());
  g.adjacency_.assign(n, {});
  g.edge_lookup_.assign(static_cast<std::size_t>(n) * n, -1);
  for (std::size_t e = 0; e < g.edges_.size(); ++e) {
    auto [i, j] = g.edges_[e];
    g.adjacency_[i].push_back(j);
    g.adjacency_[j].push_back(i);
    g.edge_lookup_[static_cast<std::size_t>(i) * n + j] = static_cast<int>(e);
    g.edge_lookup_[static_cast<std::size_t>(j) * n + i] = static_cast<int>(e);
  }
  for (auto& nbrs : g.adjacency_) std::sort(nbrs.begin(), nbrs.end());

  // connectivity: BFS from node 0 must reach everything
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : g.adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        q.push(w);
      }
    }
  }
  if (reached != n) {
    throw Error(ErrorCode::disconnected_graph,
                "strategy graph is disconnected (" + std::to_string(n - reached) +
                    " unreachable strategies)");
  }
  return g;
}

StrategyGraph StrategyGraph::complete(int n, std::vector<std::string> labels) {
  if (n < 2) {
    throw Error(ErrorCode::too_few_strategies, "a game needs at least 2 strategies");
  }
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) edges.emplace_back(i, j);
  return build(n, edges, std::move(labels));
}

std::optional<std::size_t> StrategyGraph::edge_index(int i, int j) const {
  int idx = edge_lookup_[static_cast<std::size_t>(i) * n_ + j];
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

double StrategyGraph::flux_value(const EdgeFlux& m, int i, int j) const {
  auto e = edge_index(i, j);
  if (!e) {
    throw Error(ErrorCode::index_out_of_range,
                "no edge between strategies " + std::to_string(i + 1) + " and " +
                    std::to_string(j + 1));
  }
  return i < j ? m.canonical(*e) : -m.canonical(*e);
}

EdgeFlux gradient(const StrategyGraph& g, const NodeFunction& phi) {
  if (phi.size() != g.size()) {
    throw Error(ErrorCode::length_mismatch, "node function length must equal n");
  }
  EdgeFlux out(g.edge_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [i, j] = g.edges()[e];
    out.canonical(e) = phi[i] - phi[j];
  }
  return out;
}

NodeFunction divergence(const StrategyGraph& g, const EdgeFlux& m) {
  if (m.size() != static_cast<Eigen::Index>(g.edge_count())) {
    throw Error(ErrorCode::length_mismatch, "flux length must equal edge count");
  }
  NodeFunction out = NodeFunction::Zero(g.size());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    auto [i, j] = g.edges()[e];
    // div(m)_i = -sum_j m_ij; the canonical value is m_ij for i < j
    out[i] -= m.canonical(e);
    out[j] += m.canonical(e);
  }
  return out;
}

}  // namespace popdyn
