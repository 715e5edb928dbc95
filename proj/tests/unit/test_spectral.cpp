#include "fixtures.hpp"

#include "threatnet/eigensolver.hpp"
#include "threatnet/error.hpp"
#include "threatnet/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace threatnet;

namespace {

Eigen::MatrixXd dense_modularity(const Eigen::MatrixXd& a) {
  const Eigen::VectorXd d = a.rowwise().sum();
  return a - d * d.transpose() / d.sum();
}

}  // namespace

TEST_CASE("Fiedler values of small graphs") {
  CHECK(fiedler(fixture::path(3).graph()).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fiedler(fixture::complete(4).graph()).value == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(fiedler(fixture::complete(5).graph()).value == doctest::Approx(5.0).epsilon(1e-12));
  const auto f = fiedler(fixture::path(3).graph());
  CHECK(f.connected);
  CHECK(f.vector.norm() == doctest::Approx(1.0));
  // Path eigenvector (1, 0, -1)/sqrt 2 up to sign.
  CHECK(std::abs(f.vector[1]) <= 1e-12);
  CHECK(std::abs(f.vector[0] + f.vector[2]) <= 1e-12);
}

TEST_CASE("two disjoint edges have a zero Fiedler value") {
  const std::vector<EdgeRecord> rows{{0, 1, 1.0, {}, {}}, {2, 3, 1.0, {}, {}}};
  const auto f = fiedler(build_graph(4, rows));
  CHECK(std::abs(f.value) <= 1e-12);
  CHECK_FALSE(f.connected);
  CHECK_THROWS_AS(spectral_scores(build_graph(4, rows)), InputError);
}

TEST_CASE("Fiedler value matches the dense Kirchhoff spectrum") {
  std::mt19937_64 re(51);
  for (int i = 0; i < 20; ++i) {
    const auto raw = fixture::random_connected(re, 40, 0.1, true);
    const auto f = fiedler(raw.graph());
    CHECK(f.value == doctest::Approx(oracle::kirchhoff_spectrum(raw.dense())[1]).epsilon(1e-10));
  }
}

TEST_CASE("modularity matrix of K2") {
  const ModularityOperator m(fixture::complete(2).graph());
  Eigen::MatrixXd expected(2, 2);
  expected << -0.5, 0.5, 0.5, -0.5;
  CHECK((m.dense() - expected).norm() <= 1e-15);
  const EigenPair p = modularity_eigenpair(fixture::complete(2).graph());
  CHECK(p.value == doctest::Approx(0.0).epsilon(1e-12));
  // λ = 0 eigenvector is proportional to (1, 1); the other one (1, -1) has λ = -1.
  const EigenPair q = modularity_eigenpair(fixture::complete(2).graph(), 1);
  CHECK(q.value == doctest::Approx(-1.0));
  CHECK(std::abs(q.vector[0] + q.vector[1]) <= 1e-12);
}

TEST_CASE("modularity rows sum to zero and the operator matches the dense form") {
  std::mt19937_64 re(52);
  const auto raw = fixture::random_connected(re, 30, 0.2, true);
  const ModularityOperator m(raw.graph());
  const Eigen::MatrixXd ref = dense_modularity(raw.dense());
  CHECK((m.dense() - ref).lpNorm<Eigen::Infinity>() <= 1e-13);
  Eigen::VectorXd y;
  m.apply(Eigen::VectorXd::Ones(30), y);
  CHECK(y.lpNorm<Eigen::Infinity>() <= 1e-12);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(30, -1.0, 2.0);
  m.apply(x, y);
  CHECK((y - ref * x).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("Lanczos path agrees with dense eigensolvers above the size limit") {
  std::mt19937_64 re(53);
  const auto raw = fixture::random_connected(re, kDenseEigenLimit + 44, 0.03);
  const Graph g = raw.graph();
  const Eigen::MatrixXd a = raw.dense();

  const auto f = fiedler(g);
  const Eigen::VectorXd qs = oracle::kirchhoff_spectrum(a);
  CHECK(f.value == doctest::Approx(qs[1]).epsilon(1e-8));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_modularity(a));
  const auto n = es.eigenvalues().size();
  for (std::size_t k = 0; k < 2; ++k) {
    const EigenPair p = modularity_eigenpair(g, k);
    const auto col = n - 1 - static_cast<Eigen::Index>(k);
    CHECK(p.value == doctest::Approx(es.eigenvalues()[col]).epsilon(1e-8));
    CHECK(std::abs(p.vector.dot(es.eigenvectors().col(col))) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("sign convention makes the largest entry positive") {
  Eigen::VectorXd x(3);
  x << 0.2, -0.9, 0.1;
  fix_sign(x);
  CHECK(x[1] == 0.9);
  CHECK(x[0] == -0.2);
  const auto s = spectral_scores(fixture::star(4).graph(), parse_spectral("fiedler"));
  double top = 0.0;
  for (double v : s) {
    if (std::abs(v) > std::abs(top)) top = v;
  }
  CHECK(top > 0.0);
}

TEST_CASE("spectral detector parsing") {
  CHECK(parse_spectral("modularity").kind == SpectralKind::principal_modularity);
  CHECK(parse_spectral("fiedler").kind == SpectralKind::fiedler);
  const auto s = parse_spectral("modularity:2");
  CHECK(s.kind == SpectralKind::modularity_eigvec);
  CHECK(s.index == 2);
  CHECK_THROWS_AS(parse_spectral("modularity:x"), InputError);
  CHECK_THROWS_AS(parse_spectral("pagerank"), InputError);
  CHECK_THROWS_AS(modularity_eigenpair(fixture::complete(3).graph(), 3), InputError);
}
