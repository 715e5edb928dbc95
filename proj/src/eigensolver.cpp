#include "threatnet/eigensolver.hpp"

#include "threatnet/error.hpp"
#include "threatnet/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace threatnet {

namespace {

void project_out(Eigen::VectorXd& w, std::span<const Eigen::VectorXd> basis) {
  for (const auto& q : basis) w -= q.dot(w) * q;
}

}  // namespace

void fix_sign(Eigen::VectorXd& x) {
  Eigen::Index best = 0;
  double mag = -1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > mag) {
      mag = std::abs(x[i]);
      best = i;
    }
  }
  if (x.size() > 0 && x[best] < 0.0) x = -x;
}

EigenPair lanczos(const LinearOperator& op, std::size_t n, Spectrum which,
                  std::span<const Eigen::VectorXd> deflate, const LanczosOptions& options) {
  if (n == 0) throw InputError("eigensolver on an empty operator");
  if (deflate.size() >= n) throw InputError("deflation leaves no space to search");
  const auto dim = static_cast<Eigen::Index>(n);
  const std::size_t avail = n - deflate.size();
  const std::size_t m = std::max<std::size_t>(2, std::min(options.basis, avail));

  Eigen::VectorXd v(dim);
  auto rng = stream(options.seed, Stream::eigen, n);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.uniform() - 0.5;
  project_out(v, deflate);
  v.normalize();

  Eigen::MatrixXd basis(dim, static_cast<Eigen::Index>(m) + 1);
  std::vector<double> alpha(m);
  std::vector<double> beta(m);
  Eigen::VectorXd w(dim);
  Eigen::VectorXd ax(dim);
  double last_residual = std::numeric_limits<double>::infinity();
  std::size_t total = 0;

  for (std::size_t cycle = 0; cycle <= options.max_restarts; ++cycle) {
    basis.col(0) = v;
    std::size_t k = 0;
    bool exhausted = false;
    double scale = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      op(basis.col(jj), w);
      ++total;
      alpha[j] = basis.col(jj).dot(w);
      scale = std::max(scale, std::abs(alpha[j]));
      // Full reorthogonalisation, applied twice for stability.
      for (int pass = 0; pass < 2; ++pass) {
        const auto q = basis.leftCols(jj + 1);
        w -= q * (q.transpose() * w);
        project_out(w, deflate);
      }
      beta[j] = w.norm();
      scale = std::max(scale, beta[j]);
      k = j + 1;
      if (beta[j] <= 1e-13 * std::max(scale, 1e-300) || k == avail) {
        exhausted = true;  // invariant subspace: Ritz values are exact
        break;
      }
      if (j + 1 < m) basis.col(jj + 1) = w / beta[j];
    }

    const auto kk = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(kk, kk);
    for (Eigen::Index i = 0; i < kk; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < kk) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(t);
    const Eigen::Index pick = which == Spectrum::largest ? kk - 1 : 0;
    const double theta = tri.eigenvalues()[pick];
    Eigen::VectorXd x = basis.leftCols(kk) * tri.eigenvectors().col(pick);
    project_out(x, deflate);
    x.normalize();

    op(x, ax);
    ++total;
    const double residual = (ax - theta * x).norm();
    last_residual = residual;
    if (residual <= options.tol * std::max(1.0, std::abs(theta)) || (exhausted && residual <= 1e-8)) {
      return {theta, x, residual, total};
    }
    v = x;
  }
  throw NumericalError("Lanczos did not converge: residual " + std::to_string(last_residual),
                       last_residual);
}

}  // namespace threatnet
