#include "fixtures.hpp"

#include "threatnet/absorbing_chain.hpp"
#include "threatnet/error.hpp"
#include "threatnet/harmonic.hpp"
#include "threatnet/priors.hpp"

#include <doctest.h>

#include <cmath>

using namespace threatnet;

TEST_CASE("one interior vertex with psi = 1/2 next to the cue") {
  const Graph g = fixture::path(2).graph();
  const std::vector<double> psi{0.5, 1.0};
  const AbsorbingChain chain = build_absorbing_chain(g, psi, ObservationSet::single(1, 1.0));
  Eigen::MatrixXd t(3, 3);
  t << 0, 0.5, 0.5, 0, 1, 0, 0, 0, 1;
  CHECK((chain.dense_transition() - t).norm() == 0.0);
  // Neumann series (I + G + G^2 + ...) R with G = 0 leaves R itself.
  CHECK(chain.hitting_matrix()(0, 0) == 0.5);
  Eigen::MatrixXd e(3, 2);
  e << 0.5, 0.5, 1, 0, 0, 1;
  CHECK((chain.invariant_subspace() - e).norm() <= 1e-15);
}

TEST_CASE("rows are stochastic and E is an invariant subspace of rank r") {
  std::mt19937_64 re(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const auto raw = fixture::random_connected(re, 18, 0.25, true);
    std::vector<double> psi(raw.n);
    for (auto& x : psi) x = 0.05 + 0.95 * u(re);
    psi[3] = 1.0;
    const ObservationSet obs({{0, std::nullopt, 1.0}, {5, std::nullopt, 0.4}});
    const AbsorbingChain chain = build_absorbing_chain(raw.graph(), psi, obs);
    CHECK(chain.row_sum_defect() == 0.0);
    const Eigen::MatrixXd t = chain.dense_transition();
    const Eigen::MatrixXd e = chain.invariant_subspace();
    CHECK((t * e - e).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(e).rank() == 3);
    CHECK((t.rowwise().sum() - Eigen::VectorXd::Ones(t.rows())).lpNorm<Eigen::Infinity>() <= 1e-15);
  }
}

TEST_CASE("hitting probabilities reproduce the harmonic solution") {
  std::mt19937_64 re(32);
  for (int i = 0; i < 10; ++i) {
    const auto raw = fixture::random_connected(re, 25, 0.2);
    const Graph g = raw.graph();
    const auto obs = ObservationSet::single(4, 1.0);
    const auto psi = compute_prior(g, {PriorKind::dwtp}, obs).psi;
    const AbsorbingChain chain = build_absorbing_chain(g, psi, obs);
    const Eigen::MatrixXd u = chain.hitting_matrix();
    const Eigen::VectorXd ref = oracle::dense_harmonic(raw.dense(), psi, {4}, {1.0});
    for (std::size_t k = 0; k < chain.interior.size(); ++k) {
      CHECK(std::abs(u(static_cast<Eigen::Index>(k), 0) - ref[static_cast<Eigen::Index>(chain.interior[k])]) <= 1e-12);
    }
  }
}

TEST_CASE("Monte Carlo walks on the path graph") {
  const Graph g = fixture::path(3).graph();
  const auto obs = ObservationSet::single(2, 1.0);
  const auto psi = compute_prior(g, {PriorKind::dwtp}, obs).psi;
  const AbsorbingChain chain = build_absorbing_chain(g, psi, obs);
  MonteCarloOptions mc;
  mc.walks_per_vertex = 1000000;
  mc.seed = 2024;
  const auto est = monte_carlo_threat(chain, mc);
  const double band = 3.0 * std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / 1e6);
  CHECK(std::abs(est.theta[0] - 1.0 / 3.0) <= band);
  CHECK(std::abs(est.theta[1] - 1.0 / 3.0) <= band);
  CHECK(est.theta[2] == 1.0);
  CHECK(est.std_error[2] == 0.0);
  CHECK(est.capped == 0);
}

TEST_CASE("walks without absorption mass end on the boundary") {
  std::mt19937_64 re(33);
  const auto raw = fixture::random_connected(re, 15, 0.3);
  const std::vector<double> ones(raw.n, 1.0);
  const AbsorbingChain chain = build_absorbing_chain(raw.graph(), ones, ObservationSet::single(2, 0.35));
  MonteCarloOptions mc;
  mc.walks_per_vertex = 50;
  mc.seed = 1;
  const auto est = monte_carlo_threat(chain, mc);
  for (double x : est.theta) CHECK(x == doctest::Approx(0.35).epsilon(1e-14));
}

TEST_CASE("walk estimates do not depend on the thread schedule") {
  std::mt19937_64 re(34);
  const auto raw = fixture::random_connected(re, 60, 0.08);
  const Graph g = raw.graph();
  const auto obs = ObservationSet::single(0, 1.0);
  const auto psi = compute_prior(g, {PriorKind::dwtp}, obs).psi;
  const AbsorbingChain chain = build_absorbing_chain(g, psi, obs);
  MonteCarloOptions a;
  a.walks_per_vertex = 2000;
  a.seed = 9;
  a.parallel = false;
  MonteCarloOptions b = a;
  b.parallel = true;
  const auto x = monte_carlo_threat(chain, a);
  const auto y = monte_carlo_threat(chain, b);
  CHECK(x.theta == y.theta);
  CHECK(x.std_error == y.std_error);
}

TEST_CASE("bad chain input") {
  const Graph g = fixture::path(3).graph();
  CHECK_THROWS_AS(build_absorbing_chain(g, std::vector<double>{1.0, 0.0, 1.0}, ObservationSet::single(0)), InputError);
  CHECK_THROWS_AS(build_absorbing_chain(g, std::vector<double>(3, 1.0), ObservationSet{}), InputError);
  const AbsorbingChain chain = build_absorbing_chain(g, std::vector<double>(3, 1.0), ObservationSet::single(0));
  MonteCarloOptions mc;
  mc.walks_per_vertex = 0;
  CHECK_THROWS_AS(monte_carlo_threat(chain, mc), InputError);
}
