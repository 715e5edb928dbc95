#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>

namespace threatnet {

/// y = Op x for a symmetric operator.
using LinearOperator = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

enum class Spectrum { largest, smallest };

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;  // unit norm
  double residual = 0.0;   // ||Op x - value x||
  std::size_t iterations = 0;
};

struct LanczosOptions {
  std::size_t basis = 160;       // Krylov dimension per cycle
  std::size_t max_restarts = 400;
  double tol = 1e-10;            // residual bound relative to max(1, |value|)
  std::uint64_t seed = 0;        // start vector key
};

/// Extreme eigenpair of a symmetric operator on the orthogonal complement of
/// `deflate` (orthonormal columns). Lanczos with full reorthogonalisation and
/// explicit restarts from the current Ritz vector. Throws NumericalError with
/// the last residual if it does not converge.
EigenPair lanczos(const LinearOperator& op, std::size_t n, Spectrum which,
                  std::span<const Eigen::VectorXd> deflate = {}, const LanczosOptions& options = {});

/// Flips x so that its largest-magnitude entry (first one on ties) is positive.
void fix_sign(Eigen::VectorXd& x);

}  // namespace threatnet
