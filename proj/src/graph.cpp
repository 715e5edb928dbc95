#include "threatnet/graph.hpp"

#include "threatnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

namespace threatnet {

namespace {

void check_vertex(Vertex v, std::size_t n, std::size_t row) {
  if (v >= n) {
    throw InputError("edge " + std::to_string(row) + ": vertex index " + std::to_string(v) +
                     " out of range [0, " + std::to_string(n) + ")");
  }
}

std::vector<int> bfs_from(const SparseMatrix& adj, std::span<const Vertex> sources) {
  const auto n = static_cast<std::size_t>(adj.rows());
  std::vector<int> dist(n, -1);
  std::deque<Vertex> queue;
  for (Vertex s : sources) {
    if (dist[s] < 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  const int* outer = adj.outerIndexPtr();
  const int* inner = adj.innerIndexPtr();
  while (!queue.empty()) {
    const Vertex x = queue.front();
    queue.pop_front();
    for (int k = outer[x]; k < outer[x + 1]; ++k) {
      const auto y = static_cast<Vertex>(inner[k]);
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    }
  }
  return dist;
}

}  // namespace

std::size_t Graph::hop_degree(Vertex v) const { return neighbors(v).size(); }

std::span<const int> Graph::neighbors(Vertex v) const {
  const int* outer = adjacency_.outerIndexPtr();
  return {adjacency_.innerIndexPtr() + outer[v],
          static_cast<std::size_t>(outer[v + 1] - outer[v])};
}

std::span<const double> Graph::neighbor_weights(Vertex v) const {
  const int* outer = adjacency_.outerIndexPtr();
  return {adjacency_.valuePtr() + outer[v], static_cast<std::size_t>(outer[v + 1] - outer[v])};
}

Graph build_graph(std::size_t n, std::span<const EdgeRecord> records, const GraphOptions& options,
                  BuildReport* report) {
  if (n == 0) throw InputError("empty graph");

  Graph g;
  g.n_ = n;
  g.directed_ = options.directed;
  g.links_.reserve(records.size());

  for (std::size_t row = 0; row < records.size(); ++row) {
    const EdgeRecord& r = records[row];
    check_vertex(r.src, n, row);
    check_vertex(r.dst, n, row);
    if (!std::isfinite(r.weight) || r.weight < 0.0) {
      throw InputError("edge " + std::to_string(row) + ": negative weight");
    }
    if (r.src == r.dst && !options.allow_self_loops) {
      throw InputError("edge " + std::to_string(row) + ": self-loop at vertex " +
                       std::to_string(r.src));
    }
    if (r.t_src.has_value() != r.t_dst.has_value()) {
      throw InputError("edge " + std::to_string(row) + ": time stamps must be given for both ends");
    }
    Link link{r.src, r.dst, r.weight, std::nullopt};
    if (r.t_src) {
      if (!std::isfinite(*r.t_src) || !std::isfinite(*r.t_dst)) {
        throw InputError("edge " + std::to_string(row) + ": non-finite time stamp");
      }
      link.times = std::pair{*r.t_src, *r.t_dst};
      ++g.timed_links_;
    }
    g.links_.push_back(link);
  }

  // Merge by (u, v) key; undirected keys are unordered pairs.
  std::vector<Edge> keyed;
  keyed.reserve(g.links_.size());
  for (const Link& l : g.links_) {
    Vertex u = l.u;
    Vertex v = l.v;
    if (!options.directed && u > v) std::swap(u, v);
    keyed.push_back({u, v, l.weight});
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  std::size_t merged = 0;
  for (const Edge& e : keyed) {
    if (!g.edges_.empty() && g.edges_.back().u == e.u && g.edges_.back().v == e.v) {
      g.edges_.back().weight += e.weight;
      ++merged;
    } else {
      g.edges_.push_back(e);
    }
  }
  if (report) report->merged_duplicates = merged;

  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(2 * g.edges_.size());
  for (const Edge& e : g.edges_) {
    triplets.emplace_back(static_cast<int>(e.u), static_cast<int>(e.v), e.weight);
    if (!options.directed && e.u != e.v) {
      triplets.emplace_back(static_cast<int>(e.v), static_cast<int>(e.u), e.weight);
    }
  }
  g.adjacency_.resize(static_cast<int>(n), static_cast<int>(n));
  g.adjacency_.setFromTriplets(triplets.begin(), triplets.end());
  g.adjacency_.makeCompressed();

  g.degrees_.assign(n, 0.0);
  for (Vertex v = 0; v < n; ++v) {
    double d = 0.0;
    for (double w : g.neighbor_weights(v)) d += w;
    g.degrees_[v] = d;
  }
  return g;
}

std::vector<std::size_t> connected_components(const Graph& g) {
  const std::size_t n = g.order();
  // Weak connectivity: walk A + A^T.
  SparseMatrix sym = g.adjacency();
  if (g.directed()) {
    SparseMatrix t = g.adjacency().transpose();
    sym = sym + t;
    sym.makeCompressed();
  }
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(n, unset);
  std::size_t next = 0;
  for (Vertex s = 0; s < n; ++s) {
    if (label[s] != unset) continue;
    const Vertex src[] = {s};
    const auto dist = bfs_from(sym, src);
    for (Vertex v = 0; v < n; ++v) {
      if (dist[v] >= 0) label[v] = next;
    }
    ++next;
  }
  return label;
}

bool is_connected(const Graph& g) {
  const Vertex src[] = {0};
  const auto fwd = bfs_from(g.adjacency(), src);
  if (std::any_of(fwd.begin(), fwd.end(), [](int d) { return d < 0; })) return false;
  if (!g.directed()) return true;
  SparseMatrix rev = g.adjacency().transpose();
  rev.makeCompressed();
  const auto back = bfs_from(rev, src);
  return std::none_of(back.begin(), back.end(), [](int d) { return d < 0; });
}

std::vector<int> hop_distances(const Graph& g, std::span<const Vertex> sources) {
  for (Vertex s : sources) {
    if (s >= g.order()) throw InputError("source vertex out of range");
  }
  return bfs_from(g.adjacency(), sources);
}

int diameter(const Graph& g) {
  int best = 0;
  for (Vertex s = 0; s < g.order(); ++s) {
    const Vertex src[] = {s};
    for (int d : bfs_from(g.adjacency(), src)) {
      if (d < 0) throw InputError("diameter of a disconnected graph");
      best = std::max(best, d);
    }
  }
  return best;
}

Graph induced_subgraph(const Graph& g, std::span<const Vertex> keep) {
  constexpr auto absent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(g.order(), absent);
  for (std::size_t i = 0; i < keep.size(); ++i) index.at(keep[i]) = i;
  std::vector<EdgeRecord> rows;
  for (const Link& l : g.links()) {
    if (index[l.u] == absent || index[l.v] == absent) continue;
    EdgeRecord r{index[l.u], index[l.v], l.weight, std::nullopt, std::nullopt};
    if (l.times) {
      r.t_src = l.times->first;
      r.t_dst = l.times->second;
    }
    rows.push_back(r);
  }
  return build_graph(keep.size(), rows, {g.directed(), true});
}

std::vector<Vertex> largest_component(const Graph& g) {
  const auto label = connected_components(g);
  const std::size_t count = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
  std::vector<std::size_t> sizes(count, 0);
  for (std::size_t l : label) ++sizes[l];
  const auto best =
      static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<Vertex> out;
  for (Vertex v = 0; v < g.order(); ++v) {
    if (label[v] == best) out.push_back(v);
  }
  return out;
}

Graph scaled(const Graph& g, double factor) {
  if (!(factor > 0.0)) throw InputError("scale factor must be positive");
  std::vector<EdgeRecord> rows;
  rows.reserve(g.links().size());
  for (const Link& l : g.links()) {
    EdgeRecord r{l.u, l.v, l.weight * factor, std::nullopt, std::nullopt};
    if (l.times) {
      r.t_src = l.times->first;
      r.t_dst = l.times->second;
    }
    rows.push_back(r);
  }
  return build_graph(g.order(), rows, {g.directed(), true});
}

}  // namespace threatnet
