#pragma once

#include "threatnet/graph.hpp"
#include "threatnet/kernels.hpp"
#include "threatnet/observation.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace threatnet {

/// Absorbing Markov chain of threat propagation. State order:
/// interior vertices, observed vertices, then the non-threat state.
///
///   T = [ G  H  1-ψ ]
///       [ 0  I  0   ]
///       [ 0  0  1   ]
///
/// The absorption column is stored as 1 - (row sum of G and H), summed left
/// to right in state order, so every row of T sums to exactly 1.
struct AbsorbingChain {
  std::vector<Vertex> interior;
  std::vector<Vertex> boundary;
  std::vector<double> boundary_values;
  SparseMatrix g;               // interior x interior
  SparseMatrix h;               // interior x boundary
  std::vector<double> absorb;   // per interior state, mass to the non-threat state

  std::size_t transient() const noexcept { return interior.size(); }
  /// Absorbing states: observed vertices plus non-threat.
  std::size_t absorbing() const noexcept { return boundary.size() + 1; }
  std::size_t states() const noexcept { return transient() + absorbing(); }

  /// Dense (N+1) x (N+1) transition matrix in state order. Intended for small chains.
  Eigen::MatrixXd dense_transition() const;
  /// U = (I - G)^{-1} H, the hitting probabilities of the observed states.
  Eigen::MatrixXd hitting_matrix() const;
  /// E = [(I - G)^{-1} R ; I_r] with R = [H, absorb]; satisfies T E = E.
  Eigen::MatrixXd invariant_subspace() const;
  /// max_s |sum_j T_sj - 1| with each row summed left to right.
  double row_sum_defect() const;
  /// Sampling table for the walk kernels; labels are the vertex ids.
  kernels::WalkTable walk_table() const;
};

AbsorbingChain build_absorbing_chain(const Graph& g, std::span<const double> psi,
                                     const ObservationSet& obs);

struct MonteCarloOptions {
  std::size_t walks_per_vertex = 10000;
  std::uint64_t seed = 0;
  std::uint64_t step_cap = 1000000;
  bool parallel = true;
};

struct MonteCarloThreat {
  std::vector<double> theta;      // per vertex; observed vertices carry their value
  std::vector<double> std_error;  // per vertex standard error of the mean (0 when observed)
  std::uint64_t capped = 0;       // walks stopped at the step cap, counted as non-threat
};

/// ϑ̂_v = mean over K walks from v of the value of the absorbing state reached.
MonteCarloThreat monte_carlo_threat(const AbsorbingChain& chain, const MonteCarloOptions& options);

}  // namespace threatnet
