#pragma once

#include "threatnet/eigensolver.hpp"
#include "threatnet/graph.hpp"

#include <string_view>
#include <vector>

namespace threatnet {

/// Below this order eigenproblems are solved densely.
inline constexpr std::size_t kDenseEigenLimit = 256;

struct FiedlerResult {
  double value = 0.0;      // λ1(Q), second-smallest Kirchhoff eigenvalue
  Eigen::VectorXd vector;  // unit norm, sign fixed
  bool connected = true;
};

/// Second-smallest eigenpair of Q = D - A (constant vector deflated).
/// Directed graphs use the symmetrised weights (A + A^T) / 2.
FiedlerResult fiedler(const Graph& g);

/// M = A - d d^T / V applied implicitly (sparse plus rank one).
class ModularityOperator {
 public:
  explicit ModularityOperator(const Graph& g);

  std::size_t order() const noexcept { return static_cast<std::size_t>(degrees_.size()); }
  double volume() const noexcept { return volume_; }
  const Eigen::VectorXd& degrees() const noexcept { return degrees_; }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::MatrixXd dense() const;

 private:
  SparseMatrix adjacency_;
  Eigen::VectorXd degrees_;
  double volume_ = 0.0;
};

enum class SpectralKind {
  principal_modularity,  // leading eigenvector of M
  fiedler,               // Fiedler vector of Q
  modularity_eigvec,     // k-th largest eigenvector of M (k = 0 is principal)
};

struct SpectralSpec {
  SpectralKind kind = SpectralKind::principal_modularity;
  std::size_t index = 0;
};

/// "modularity", "fiedler" or "modularity:<k>".
SpectralSpec parse_spectral(std::string_view text);

/// Per-vertex scores from the chosen eigenvector, sign fixed so the largest
/// magnitude entry is positive. Requires a connected graph. Ignores cues.
std::vector<double> spectral_scores(const Graph& g, const SpectralSpec& spec = {});

/// Eigenpair k (descending) of the modularity matrix.
EigenPair modularity_eigenpair(const Graph& g, std::size_t k = 0);

}  // namespace threatnet
