#include "threatnet/spectral.hpp"

#include "threatnet/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace threatnet {

namespace {

SparseMatrix symmetric_adjacency(const Graph& g) {
  if (!g.directed()) return g.adjacency();
  SparseMatrix t = g.adjacency().transpose();
  SparseMatrix s = 0.5 * (g.adjacency() + t);
  s.makeCompressed();
  return s;
}

bool weakly_connected(const Graph& g) {
  const auto labels = connected_components(g);
  return std::all_of(labels.begin(), labels.end(), [](std::size_t c) { return c == 0; });
}

}  // namespace

FiedlerResult fiedler(const Graph& g) {
  const std::size_t n = g.order();
  if (n < 2) throw InputError("Fiedler pair needs at least two vertices");
  const SparseMatrix a = symmetric_adjacency(g);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (int r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) d[r] += it.value();
  }

  FiedlerResult out;
  out.connected = weakly_connected(g);
  if (n < kDenseEigenLimit) {
    Eigen::MatrixXd q = -Eigen::MatrixXd(a);
    q.diagonal() += d;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed", 0.0);
    out.value = es.eigenvalues()[1];
    out.vector = es.eigenvectors().col(1);
  } else {
    const LinearOperator op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
      y = d.cwiseProduct(x) - a * x;
    };
    const Eigen::VectorXd ones =
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / std::sqrt(static_cast<double>(n)));
    const Eigen::VectorXd deflate[] = {ones};
    auto pair = lanczos(op, n, Spectrum::smallest, deflate);
    out.value = pair.value;
    out.vector = std::move(pair.vector);
  }
  if (std::abs(out.value) < 1e-10) out.connected = false;
  fix_sign(out.vector);
  return out;
}

ModularityOperator::ModularityOperator(const Graph& g) : adjacency_(symmetric_adjacency(g)) {
  degrees_ = Eigen::VectorXd::Zero(adjacency_.rows());
  for (int r = 0; r < adjacency_.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(adjacency_, r); it; ++it) degrees_[r] += it.value();
  }
  volume_ = degrees_.sum();
  if (!(volume_ > 0.0)) throw InputError("modularity of a graph without edges");
}

void ModularityOperator::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y = adjacency_ * x;
  y -= degrees_ * (degrees_.dot(x) / volume_);
}

Eigen::MatrixXd ModularityOperator::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd(adjacency_);
  m -= degrees_ * degrees_.transpose() / volume_;
  return m;
}

EigenPair modularity_eigenpair(const Graph& g, std::size_t k) {
  const ModularityOperator m(g);
  const std::size_t n = m.order();
  if (k >= n) throw InputError("modularity eigenvector index out of range");
  EigenPair out;
  if (n < kDenseEigenLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.dense());
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed", 0.0);
    const auto col = static_cast<Eigen::Index>(n - 1 - k);
    out.value = es.eigenvalues()[col];
    out.vector = es.eigenvectors().col(col);
    Eigen::VectorXd mx;
    m.apply(out.vector, mx);
    out.residual = (mx - out.value * out.vector).norm();
  } else {
    const LinearOperator op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { m.apply(x, y); };
    std::vector<Eigen::VectorXd> found;
    for (std::size_t i = 0; i <= k; ++i) {
      out = lanczos(op, n, Spectrum::largest, found);
      found.push_back(out.vector);
    }
  }
  fix_sign(out.vector);
  return out;
}

SpectralSpec parse_spectral(std::string_view text) {
  SpectralSpec spec;
  if (text == "modularity" || text == "principal-modularity") {
    spec.kind = SpectralKind::principal_modularity;
  } else if (text == "fiedler") {
    spec.kind = SpectralKind::fiedler;
  } else if (text.starts_with("modularity:")) {
    spec.kind = SpectralKind::modularity_eigvec;
    const auto digits = text.substr(11);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), spec.index);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      throw InputError("bad eigenvector index: " + std::string(digits));
    }
  } else {
    throw InputError("unknown spectral detector: " + std::string(text));
  }
  return spec;
}

std::vector<double> spectral_scores(const Graph& g, const SpectralSpec& spec) {
  if (!weakly_connected(g)) throw InputError("disconnected graph: spectral scores need connectivity");
  Eigen::VectorXd x;
  switch (spec.kind) {
    case SpectralKind::principal_modularity: x = modularity_eigenpair(g, 0).vector; break;
    case SpectralKind::modularity_eigvec: x = modularity_eigenpair(g, spec.index).vector; break;
    case SpectralKind::fiedler: x = fiedler(g).vector; break;
  }
  return {x.begin(), x.end()};
}

}  // namespace threatnet
