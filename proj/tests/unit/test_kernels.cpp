#include "fixtures.hpp"

#include "threatnet/kernels.hpp"
#include "threatnet/laplacian.hpp"

#include <doctest.h>

using namespace threatnet;

TEST_CASE("sweep kernels agree bitwise") {
  std::mt19937_64 re(71);
  const auto raw = fixture::random_connected(re, 300, 0.02, true);
  const SparseMatrix p = transition_matrix(raw.graph());
  const auto v = kernels::view(p);
  std::vector<double> b(300, 0.0);
  std::vector<double> x(300);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& xi : x) xi = u(re);
  b[0] = 0.3;
  std::vector<double> y1(300);
  std::vector<double> y2(300);
  const double d1 = kernels::fixed_point_sweep_serial(v, b, x, y1);
  const double d2 = kernels::fixed_point_sweep_parallel(v, b, x, y2);
  CHECK(y1 == y2);
  CHECK(d1 == d2);
  const Eigen::Map<const Eigen::VectorXd> xm(x.data(), 300);
  const Eigen::VectorXd ref = p * xm;
  for (int i = 0; i < 300; ++i) CHECK(y1[static_cast<std::size_t>(i)] == doctest::Approx(ref[i] + b[static_cast<std::size_t>(i)]));
}

TEST_CASE("path length kernels agree with breadth-first search") {
  std::mt19937_64 re(72);
  const auto raw = fixture::random_connected(re, 80, 0.06);
  const Graph g = raw.graph();
  const auto v = kernels::view(g.adjacency());
  const auto s = kernels::path_length_sums_serial(v);
  const auto q = kernels::path_length_sums_parallel(v);
  CHECK(s.total == q.total);
  CHECK(s.pairs == q.pairs);
  CHECK(s.pairs == 80 * 79 / 2);
  CHECK(static_cast<double>(s.total) / static_cast<double>(s.pairs) ==
        doctest::Approx(oracle::mean_path_length(raw.dense())).epsilon(1e-14));
}

TEST_CASE("walk kernels agree bitwise") {
  // Two transient states feeding one absorbing state each.
  kernels::WalkTable t;
  t.transient = 2;
  t.absorbing = 2;
  t.outer = {0, 2, 4};
  t.target = {1, 2, 0, 3};
  t.cumulative = {0.5, 1.0, 0.25, 1.0};
  t.labels = {10, 11};
  const std::vector<double> values{1.0, 0.0};
  const auto a = kernels::random_walks_serial(t, values, 20000, 8, 100000);
  const auto b = kernels::random_walks_parallel(t, values, 20000, 8, 100000);
  CHECK(a.mean == b.mean);
  CHECK(a.second_moment == b.second_moment);
  // x0 = 0.5 x1 + 0.5, x1 = 0.25 x0: x0 = 4/7, x1 = 1/7.
  CHECK(std::abs(a.mean[0] - 4.0 / 7.0) <= 4.0 * std::sqrt(0.25 / 20000));
  CHECK(std::abs(a.mean[1] - 1.0 / 7.0) <= 4.0 * std::sqrt(0.25 / 20000));
}
