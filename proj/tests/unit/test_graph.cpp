#include "fixtures.hpp"

#include "threatnet/error.hpp"
#include "threatnet/graph.hpp"
#include "threatnet/laplacian.hpp"

#include <doctest.h>

using namespace threatnet;

TEST_CASE("path graph from an undirected edge list") {
  const std::vector<EdgeRecord> rows{{0, 1, 1.0, {}, {}}, {1, 2, 1.0, {}, {}}};
  const Graph g = build_graph(3, rows);
  CHECK(g.order() == 3);
  CHECK(g.size() == 2);
  CHECK_FALSE(g.directed());
  const auto d = g.degrees();
  CHECK(d[0] == 1.0);
  CHECK(d[1] == 2.0);
  CHECK(d[2] == 1.0);
  const SparseMatrix a = g.adjacency();
  CHECK((SparseMatrix(a.transpose()) - a).norm() == 0.0);
}

TEST_CASE("empty graph is rejected") {
  CHECK_THROWS_WITH_AS(build_graph(0, {}), "empty graph", InputError);
}

TEST_CASE("invalid edge rows are rejected") {
  const auto build = [](EdgeRecord r) {
    const std::vector<EdgeRecord> rows{r};
    return build_graph(3, rows);
  };
  CHECK_THROWS_AS(build({0, 3, 1.0, {}, {}}), InputError);
  CHECK_THROWS_AS(build({0, 1, -1.0, {}, {}}), InputError);
  CHECK_THROWS_AS(build({1, 1, 1.0, {}, {}}), InputError);
  CHECK_THROWS_AS(build({0, 1, 1.0, 0.5, {}}), InputError);
  CHECK_NOTHROW(build({0, 1, 0.0, {}, {}}));
  const std::vector<EdgeRecord> loop{{1, 1, 1.0, {}, {}}};
  CHECK_NOTHROW(build_graph(3, loop, {false, true}));
}

TEST_CASE("duplicate edges merge by weight and keep every link") {
  const std::vector<EdgeRecord> rows{{0, 1, 1.0, 0.1, 0.2}, {1, 0, 2.0, 0.3, 0.4}, {1, 2, 1.0, {}, {}}};
  BuildReport report;
  const Graph g = build_graph(3, rows, {}, &report);
  CHECK(report.merged_duplicates == 1);
  CHECK(g.size() == 2);
  CHECK(g.links().size() == 3);
  CHECK(g.adjacency().coeff(0, 1) == 3.0);
  CHECK(g.adjacency().coeff(1, 0) == 3.0);
  CHECK(g.has_timestamps());
  CHECK(g.hop_degree(1) == 2);
}

TEST_CASE("directed incidence matrix") {
  const std::vector<EdgeRecord> rows{{0, 1, 1.0, {}, {}}};
  const Graph g = build_graph(2, rows, {true, false});
  CHECK(g.directed());
  const SparseMatrix b = incidence_matrix(g);
  CHECK(b.rows() == 2);
  CHECK(b.cols() == 1);
  CHECK(b.coeff(0, 0) == -1.0);
  CHECK(b.coeff(1, 0) == 1.0);
  CHECK(g.adjacency().coeff(0, 1) == 1.0);
  CHECK(g.adjacency().coeff(1, 0) == 0.0);
  CHECK_FALSE(is_connected(g));
}

TEST_CASE("hop distances and components agree with breadth-first search") {
  std::mt19937_64 re(11);
  for (int trial = 0; trial < 20; ++trial) {
    fixture::RawGraph raw{30, {}};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < raw.n; ++i) {
      for (std::size_t j = i + 1; j < raw.n; ++j) {
        if (u(re) < 0.06) raw.edges.push_back({i, j, 1.0});
      }
    }
    const Graph g = raw.graph();
    const Eigen::MatrixXd a = raw.dense();
    const std::vector<Vertex> src{3};
    CHECK(hop_distances(g, src) == oracle::bfs(a, 3));

    const auto labels = connected_components(g);
    for (std::size_t v = 0; v < raw.n; ++v) {
      const auto d = oracle::bfs(a, v);
      for (std::size_t w = 0; w < raw.n; ++w) CHECK((labels[v] == labels[w]) == (d[w] >= 0));
    }
    const auto lcc = largest_component(g);
    const Graph sub = induced_subgraph(g, lcc);
    CHECK(sub.order() == lcc.size());
    CHECK(is_connected(sub));
  }
}

TEST_CASE("diameter and induced subgraph") {
  const Graph p = fixture::path(5).graph();
  CHECK(diameter(p) == 4);
  const std::vector<Vertex> keep{1, 2, 3};
  const Graph sub = induced_subgraph(p, keep);
  CHECK(sub.order() == 3);
  CHECK(sub.size() == 2);
  CHECK(diameter(sub) == 2);
  const std::vector<EdgeRecord> rows{{0, 1, 1.0, {}, {}}, {2, 3, 1.0, {}, {}}};
  CHECK_THROWS_AS(diameter(build_graph(4, rows)), InputError);
  const Graph s = scaled(p, 2.0);
  CHECK(s.degrees()[1] == 4.0);
}
