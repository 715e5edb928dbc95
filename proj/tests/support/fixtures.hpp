#pragma once

// Random test graphs drawn with the standard library engine, kept as raw edge
// tuples so the oracles and the library see the same data independently.

#include "oracles.hpp"

#include "threatnet/graph.hpp"

#include <random>
#include <vector>

namespace fixture {

struct RawGraph {
  std::size_t n = 0;
  std::vector<oracle::WeightedEdge> edges;

  Eigen::MatrixXd dense() const { return oracle::dense_adjacency(n, edges); }

  threatnet::Graph graph() const {
    std::vector<threatnet::EdgeRecord> rows;
    for (const auto& e : edges) rows.push_back({e.u, e.v, e.w, {}, {}});
    return threatnet::build_graph(n, rows);
  }
};

inline bool connected(const RawGraph& g) {
  const auto d = oracle::bfs(g.dense(), 0);
  for (int x : d) {
    if (x < 0) return false;
  }
  return true;
}

/// Connected G(n, p), optionally with weights in [0.5, 2).
inline RawGraph random_connected(std::mt19937_64& re, std::size_t n, double p, bool weighted = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    RawGraph g{n, {}};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (u(re) < p) g.edges.push_back({i, j, weighted ? 0.5 + 1.5 * u(re) : 1.0});
      }
    }
    if (connected(g)) return g;
  }
}

inline RawGraph path(std::size_t n) {
  RawGraph g{n, {}};
  for (std::size_t i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 1.0});
  return g;
}

inline RawGraph complete(std::size_t n) {
  RawGraph g{n, {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) g.edges.push_back({i, j, 1.0});
  }
  return g;
}

inline RawGraph star(std::size_t leaves) {
  RawGraph g{leaves + 1, {}};
  for (std::size_t i = 1; i <= leaves; ++i) g.edges.push_back({0, i, 1.0});
  return g;
}

inline std::vector<double> to_vector(const Eigen::VectorXd& x) { return {x.begin(), x.end()}; }

}  // namespace fixture
