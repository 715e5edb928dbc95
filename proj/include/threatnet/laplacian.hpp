#pragma once

#include "threatnet/graph.hpp"

#include <span>

namespace threatnet {

enum class LaplacianKind {
  kirchhoff,          // Q = D - A
  normalized,         // L = D^{-1/2} Q D^{-1/2}
  generalized,        // Ł = I - D^{-1} A
  generalized_prior,  // Ł^ψ = I - Ψ D^{-1} A
};

struct LaplacianView {
  LaplacianKind kind = LaplacianKind::kirchhoff;
  SparseMatrix matrix;
};

/// Row-normalised transition matrix T = D^{-1} A. Throws on zero degree.
SparseMatrix transition_matrix(const Graph& g);

/// Builds the requested Laplacian. `psi` is required (length n, entries in
/// (0,1]) for generalized_prior and ignored otherwise. Normalized and
/// generalized kinds throw InputError("zero degree ...") on isolated vertices.
LaplacianView laplacian(const Graph& g, LaplacianKind kind, std::span<const double> psi = {});

/// Signed incidence matrix B (#V x #E): +1 at the terminal vertex and -1 at the
/// initial vertex of each merged edge. Undirected edges are oriented u -> v with
/// u < v. For unweighted graphs Q = B B^T.
SparseMatrix incidence_matrix(const Graph& g);

}  // namespace threatnet
