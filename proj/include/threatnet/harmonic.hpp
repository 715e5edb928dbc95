#pragma once

#include "threatnet/graph.hpp"
#include "threatnet/observation.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace threatnet {

enum class SolveMethod {
  iteration,  // repeated first-step iteration x <- G x + H b from x = 0
  bicgstab,   // Krylov (biconjugate gradient stabilised), Jacobi-preconditioned
  direct,     // sparse LU
};

SolveMethod parse_solve_method(std::string_view text);

struct SolverOptions {
  SolveMethod method = SolveMethod::iteration;
  double tol = 1e-10;
  /// 0 selects max(10 * states, 10000).
  std::size_t max_iter = 0;
  /// Use the OpenMP sweep kernel (ignored inside an active parallel region).
  bool parallel = true;
};

struct SolveReport {
  std::size_t iterations = 0;
  double residual = 0.0;   // ||(I - G) x - H b||_inf before clamping
  std::size_t clamped = 0; // entries moved by more than kClampWarn when clamping to [0,1]
  double max_clamp = 0.0;
};

/// Clamping beyond this magnitude is reported (signals ill-conditioning).
inline constexpr double kClampWarn = 1e-6;

struct ThreatVector {
  std::vector<double> theta;
  SolveReport report;
};

/// Solves the absorbing boundary-value problem on an arbitrary substochastic
/// transition matrix P (compressed, row-major): boundary states keep their
/// given values, interior states satisfy x_i = sum_j P_ij x_j. Rows of P
/// belonging to boundary states are ignored. Throws NumericalError carrying
/// the last residual when the method does not reach `tol`.
ThreatVector solve_boundary_problem(const SparseMatrix& transition,
                                    std::span<const std::size_t> boundary,
                                    std::span<const double> boundary_values,
                                    const SolverOptions& options = {});

/// Ψ D^{-1} A for per-vertex ψ in (0, 1].
SparseMatrix propagation_matrix(const Graph& g, std::span<const double> psi);

/// Interior/boundary partition of the generalized Laplacian Ł^ψ with the
/// boundary permuted to trailing positions.
struct HarmonicSystem {
  std::vector<Vertex> interior;
  std::vector<Vertex> boundary;
  SparseMatrix l_ii;  // (I - ΨD^{-1}A) restricted to interior rows/cols
  SparseMatrix l_ib;  // interior rows, boundary cols
  std::vector<double> boundary_values;
};

HarmonicSystem build_harmonic_system(const Graph& g, std::span<const double> psi,
                                     const ObservationSet& obs);

/// Harmonic threat: ϑ_b given, ϑ_i = -(Ł^ψ_ii)^{-1} Ł^ψ_ib ϑ_b.
/// Requires a connected (strongly connected if directed) graph.
ThreatVector solve_harmonic(const Graph& g, std::span<const double> psi,
                            const ObservationSet& obs, const SolverOptions& options = {});

}  // namespace threatnet
