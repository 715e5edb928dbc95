#include "fixtures.hpp"

#include "threatnet/error.hpp"
#include "threatnet/generators.hpp"
#include "threatnet/priors.hpp"

#include <doctest.h>

#include <cmath>

using namespace threatnet;

TEST_CASE("dwtp on the path is the inverse degree") {
  const Graph g = fixture::path(3).graph();
  const auto psi = compute_prior(g, {PriorKind::dwtp}).psi;
  CHECK(psi == std::vector<double>{1.0, 0.5, 1.0});
}

TEST_CASE("lwtp on a complete graph is one half") {
  const Graph g = fixture::complete(6).graph();
  const Prior p = compute_prior(g, {PriorKind::lwtp});
  CHECK(p.path_length == 1.0);
  CHECK_FALSE(p.approximate_path_length);
  for (double x : p.psi) CHECK(x == 0.5);
}

TEST_CASE("lwtp falls back to the random-graph closed form for large graphs") {
  // l(G) = (ln n - Euler's constant) / ln ln n + 1/2 at n = 1000.
  const double ln = std::log(1000.0);
  const double expected = (ln - 0.5772156649015329) / std::log(ln) + 0.5;
  CHECK(er_average_path_length(1000) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(3.7755).epsilon(1e-4));

  const double p = std::log(1000.0) / 1000.0;
  const Graph g = erdos_renyi(1000, p, 17, false);
  PriorSpec spec{PriorKind::lwtp};
  spec.exact_path_length_limit = 500;
  const Prior prior = compute_prior(g, spec);
  CHECK(prior.approximate_path_length);
  CHECK(prior.path_length == er_average_path_length(1000));
  CHECK(prior.psi[0] == doctest::Approx(std::exp2(-1.0 / expected)));
}

TEST_CASE("average path length agrees with breadth-first search") {
  CHECK(average_path_length(fixture::path(3).graph()) == doctest::Approx(4.0 / 3.0));
  CHECK(average_path_length(fixture::complete(4).graph()) == 1.0);
  CHECK(average_path_length(fixture::star(3).graph()) == 1.5);
  std::mt19937_64 re(5);
  for (int i = 0; i < 10; ++i) {
    const auto raw = fixture::random_connected(re, 40, 0.08);
    CHECK(average_path_length(raw.graph()) == doctest::Approx(oracle::mean_path_length(raw.dense())).epsilon(1e-14));
  }
  const std::vector<EdgeRecord> rows{{0, 1, 1.0, {}, {}}};
  CHECK_THROWS_AS(average_path_length(build_graph(3, rows)), InputError);
}

TEST_CASE("bfs prior is the inverse hop distance to the nearest cue") {
  const Graph g = fixture::path(5).graph();
  const auto psi = compute_prior(g, {PriorKind::bfs}, ObservationSet::single(0)).psi;
  CHECK(psi == std::vector<double>{1.0, 1.0, 0.5, 1.0 / 3.0, 0.25});
  const ObservationSet two({{0, std::nullopt, 1.0}, {4, std::nullopt, 1.0}});
  CHECK(compute_prior(g, {PriorKind::bfs}, two).psi == std::vector<double>{1.0, 1.0, 0.5, 1.0, 1.0});
  const std::vector<EdgeRecord> rows{{0, 1, 1.0, {}, {}}};
  CHECK_THROWS_AS(compute_prior(build_graph(3, rows), {PriorKind::bfs}, ObservationSet::single(0)), InputError);
}

TEST_CASE("priors stay in (0, 1]") {
  std::mt19937_64 re(6);
  for (int i = 0; i < 10; ++i) {
    const Graph g = fixture::random_connected(re, 30, 0.2, true).graph();
    for (auto kind : {PriorKind::dwtp, PriorKind::lwtp, PriorKind::bfs, PriorKind::uniform}) {
      PriorSpec spec{kind};
      spec.uniform_value = 0.3;
      for (double x : compute_prior(g, spec, ObservationSet::single(0)).psi) {
        CHECK(x > 0.0);
        CHECK(x <= 1.0);
      }
    }
  }
  // Heavy weights push 1/d below the floor.
  const std::vector<EdgeRecord> rows{{0, 1, 1e9, {}, {}}};
  CHECK(compute_prior(build_graph(2, rows), {PriorKind::dwtp}).psi[0] == kPsiFloor);
}

TEST_CASE("prior parsing") {
  CHECK(parse_prior("dwtp").kind == PriorKind::dwtp);
  CHECK(parse_prior("bfs").kind == PriorKind::bfs);
  CHECK(parse_prior("uniform").uniform_value == 1.0);
  CHECK(parse_prior("uniform:0.25").uniform_value == 0.25);
  CHECK(to_string(parse_prior("lwtp")) == "lwtp");
  CHECK_THROWS_AS(parse_prior("uniform:0"), InputError);
  CHECK_THROWS_AS(parse_prior("uniform:x"), InputError);
  CHECK_THROWS_AS(parse_prior("pagerank"), InputError);
}
