#pragma once

// Reference computations for the tests. Everything here works from raw edge
// tuples and dense linear algebra; nothing calls into the library under test.

#include <Eigen/Dense>

#include <cstddef>
#include <tuple>
#include <vector>

namespace oracle {

struct WeightedEdge {
  std::size_t u;
  std::size_t v;
  double w;
};

/// Symmetric dense adjacency; parallel edges add up.
Eigen::MatrixXd dense_adjacency(std::size_t n, const std::vector<WeightedEdge>& edges);

/// x with x_b fixed on `boundary` and x_i = sum_j psi_i a_ij / d_i x_j elsewhere,
/// by a dense LU solve of the interior block.
Eigen::VectorXd dense_harmonic(const Eigen::MatrixXd& a, const std::vector<double>& psi,
                               const std::vector<std::size_t>& boundary,
                               const std::vector<double>& values);

/// Same equations for an arbitrary dense substochastic matrix P.
Eigen::VectorXd dense_boundary_solve(const Eigen::MatrixXd& p, const std::vector<std::size_t>& boundary,
                                     const std::vector<double>& values);

/// Hop distances from `source` by breadth-first search on a dense adjacency; -1 if unreachable.
std::vector<int> bfs(const Eigen::MatrixXd& a, std::size_t source);

/// Mean hop distance over unordered pairs.
double mean_path_length(const Eigen::MatrixXd& a);

/// Eigenvalues of D - A in ascending order.
Eigen::VectorXd kirchhoff_spectrum(const Eigen::MatrixXd& a);

struct RocOracle {
  std::vector<double> pfa;
  std::vector<double> pd;
};

/// One point per distinct score (descending), plus the origin.
RocOracle brute_roc(const std::vector<double>& scores, const std::vector<int>& truth);

/// P(score_fg > score_bg) + 0.5 P(tie), by counting all pairs.
double mann_whitney_auc(const std::vector<double>& scores, const std::vector<int>& truth);

/// Largest vertical gap between points and the upper envelope of all chords
/// between point pairs. Cubic; for small curves only.
double brute_convexity_defect(const std::vector<double>& pfa, const std::vector<double>& pd);

/// Maximum-likelihood exponent of a power-law tail above xmin for integer
/// data (continuous approximation with the usual half-unit shift).
double power_law_mle(const std::vector<double>& values, double xmin);

}  // namespace oracle
