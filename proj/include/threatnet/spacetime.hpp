#pragma once

#include "threatnet/graph.hpp"
#include "threatnet/harmonic.hpp"
#include "threatnet/observation.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace threatnet {

/// Uniform time bins; bin k covers [t0 + k dt, t0 + (k+1) dt).
struct TimeGrid {
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t bins = 1;

  /// Bin containing t (equivalently, the nearest bin centre). The right edge
  /// of the last bin is included. Throws InputError outside the grid.
  std::size_t bin_of(double t) const;
  double center(std::size_t k) const { return t0 + (static_cast<double>(k) + 0.5) * dt; }
  double end() const { return t0 + static_cast<double>(bins) * dt; }
};

/// Smallest grid of width `dt` starting at t_min that covers t_max.
TimeGrid make_grid(double t_min, double t_max, double dt);

enum class TemporalMode {
  kernel,   // e^{-λ|Δt|} column at the partner's interaction time
  instant,  // identity block: threat moves at the same bin
  clique,   // (1/#T) 1 1^T: time plays no role
};

TemporalMode parse_temporal_mode(std::string_view text);

struct SpaceTimeOptions {
  TemporalMode default_mode = TemporalMode::kernel;
  /// Optional per-link override, indexed like Graph::links().
  std::vector<TemporalMode> link_modes;
  /// Kernel entries below this value are dropped (not renormalised).
  double truncation = 1e-4;
  bool parallel = true;
};

/// Space-time graph on (vertex, bin) pairs; state index v * bins + k.
struct SpaceTimeSystem {
  std::size_t vertices = 0;
  TimeGrid grid;
  std::vector<double> rates;           // λ_v
  std::vector<double> spatial_degree;  // d_v: interaction count (sum of link weights)
  SparseMatrix adjacency;              // A_st, rows are receiving states

  std::size_t bins() const noexcept { return grid.bins; }
  std::size_t states() const noexcept { return vertices * grid.bins; }
  std::size_t index(Vertex v, std::size_t k) const noexcept { return v * grid.bins + k; }
  /// W = A_st 1 (per state).
  std::vector<double> row_weights() const;
};

/// K(t) = e^{-λ|t|}.
double temporal_kernel(double rate, double lag);

/// Assembles A_st. Every interaction τ = (u, v, t_u, t_v, w) adds
/// w K_v(t_k - t_v) at row (v, k), column (u, bin(t_u)) and the mirror entry
/// for u (kernel mode); identity or uniform blocks for instant/clique modes.
/// `rates` has length 1 (shared λ) or n.
SpaceTimeSystem assemble_spacetime(const Graph& g, const TimeGrid& grid,
                                   std::span<const double> rates,
                                   const SpaceTimeOptions& options = {});

struct CoordinationPrior {
  std::vector<double> psi;       // per state, in [0, 1]
  std::size_t clamped = 0;       // states where W / d exceeded 1
};

/// ψ_v(t_k) = W(v,k) / d_v, clamped to 1. Throws on isolated vertices.
CoordinationPrior coordination_prior(const SpaceTimeSystem& sys);

enum class SpaceTimeVariant {
  weighted,          // ϑ = Ψ W^{-1} A ϑ
  coordinated,       // ϑ = D^{-1} A ϑ (ψ = W/d clamped to 1)
  coordinated_prior, // ϑ = Ψ' D^{-1} A ϑ with a spatial prior ψ'
};

SpaceTimeVariant parse_spacetime_variant(std::string_view text);

struct SpaceTimeSolveOptions {
  SpaceTimeVariant variant = SpaceTimeVariant::coordinated;
  /// weighted: per-state (length states) or per-vertex (length n) Ψ; empty = 1.
  /// coordinated_prior: per-vertex ψ' (required).
  std::vector<double> psi;
  SolverOptions solver;
};

struct SpaceTimeThreat {
  std::size_t vertices = 0;
  std::size_t bins = 0;
  std::vector<double> theta;  // per state
  SolveReport report;

  double at(Vertex v, std::size_t k) const { return theta[v * bins + k]; }
};

/// Transition matrix of the chosen variant. Rows whose weight is zero stay
/// empty, so those states are absorbed at zero threat.
SparseMatrix spacetime_transition(const SpaceTimeSystem& sys, const SpaceTimeSolveOptions& options);

/// Maps observations to boundary states: timed cues go to their bin, untimed
/// cues are broadcast to every bin of the vertex.
void spacetime_boundary(const SpaceTimeSystem& sys, const ObservationSet& obs,
                        std::vector<std::size_t>& states, std::vector<double>& values);

SpaceTimeThreat solve_spacetime(const SpaceTimeSystem& sys, const ObservationSet& obs,
                                const SpaceTimeSolveOptions& options = {});

enum class Reducer { max, mean };
Reducer parse_reducer(std::string_view text);

std::vector<double> reduce_to_vertex_scores(const SpaceTimeThreat& st, Reducer reducer = Reducer::max);

/// ln 2 / median gap between consecutive interaction times at a vertex, pooled
/// over vertices. Throws when the data have no positive gap.
double default_rate(const Graph& g);

/// Grid covering all link times with dt = 0.02 / λ.
TimeGrid default_grid(const Graph& g, double rate);

}  // namespace threatnet
