#pragma once

#include <Eigen/SparseCore>

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace threatnet {

using Vertex = std::size_t;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// One row of an edge list: an interaction between src and dst, optionally
/// time-stamped at each endpoint.
struct EdgeRecord {
  Vertex src = 0;
  Vertex dst = 0;
  double weight = 1.0;
  std::optional<double> t_src;
  std::optional<double> t_dst;
};

/// A validated interaction as stored by the graph. Kept unmerged so that
/// space-time assembly sees every time stamp.
struct Link {
  Vertex u = 0;
  Vertex v = 0;
  double weight = 1.0;
  std::optional<std::pair<double, double>> times;  // (t_u, t_v)

  bool timed() const noexcept { return times.has_value(); }
};

/// A merged edge of the adjacency structure (u < v for undirected graphs).
struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  double weight = 0.0;
};

struct GraphOptions {
  bool directed = false;
  bool allow_self_loops = false;
};

struct BuildReport {
  std::size_t merged_duplicates = 0;
};

/// Immutable sparse weighted graph.
///
/// Undirected graphs store each unordered pair once in edges(); the adjacency
/// view is symmetric. Duplicate rows of the input merge by weight summation.
class Graph {
 public:
  Graph() = default;

  std::size_t order() const noexcept { return n_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool directed() const noexcept { return directed_; }
  bool has_timestamps() const noexcept { return timed_links_ > 0; }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<Link>& links() const noexcept { return links_; }

  /// A with a_uv = merged weight of (u,v); rows are compressed CSR.
  const SparseMatrix& adjacency() const noexcept { return adjacency_; }
  /// d = A * 1 (weighted out-degree).
  std::span<const double> degrees() const noexcept { return degrees_; }
  /// Number of distinct neighbours of v.
  std::size_t hop_degree(Vertex v) const;

  std::span<const int> neighbors(Vertex v) const;
  std::span<const double> neighbor_weights(Vertex v) const;

  friend Graph build_graph(std::size_t n, std::span<const EdgeRecord> records,
                           const GraphOptions& options, BuildReport* report);

 private:
  std::size_t n_ = 0;
  bool directed_ = false;
  std::size_t timed_links_ = 0;
  std::vector<Edge> edges_;
  std::vector<Link> links_;
  SparseMatrix adjacency_;
  std::vector<double> degrees_;
};

/// Validates and assembles a graph on vertices [0, n).
/// Throws InputError on n == 0, out-of-range indices, negative or non-finite
/// weights, disallowed self-loops, or half-specified time stamps.
Graph build_graph(std::size_t n, std::span<const EdgeRecord> records,
                  const GraphOptions& options = {}, BuildReport* report = nullptr);

/// Component label per vertex (weak connectivity), labels dense from 0 in
/// order of first vertex.
std::vector<std::size_t> connected_components(const Graph& g);

/// Connected for undirected graphs, strongly connected for directed ones.
bool is_connected(const Graph& g);

/// Hop distances from a source set by BFS; unreachable vertices get -1.
std::vector<int> hop_distances(const Graph& g, std::span<const Vertex> sources);

/// Largest hop distance over all pairs (graph diameter). Requires connectivity.
int diameter(const Graph& g);

/// Subgraph induced by `keep` (sorted, distinct). New vertex i corresponds to
/// keep[i]; links with both endpoints kept are carried over with their times.
Graph induced_subgraph(const Graph& g, std::span<const Vertex> keep);

/// Vertices of the largest weakly connected component, ascending.
std::vector<Vertex> largest_component(const Graph& g);

/// Same topology with every weight multiplied by `factor` (> 0).
Graph scaled(const Graph& g, double factor);

}  // namespace threatnet
