#pragma once

// Data-parallel inner loops. Each kernel has a serial reference and an OpenMP
// version; the two are bitwise identical for any thread count because every
// output element is computed by exactly one iteration in a fixed order, and
// every reduction is exact (max or integer sums).

#include "threatnet/graph.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace threatnet::kernels {

struct CsrView {
  std::span<const int> outer;
  std::span<const int> inner;
  std::span<const double> values;

  std::size_t rows() const noexcept { return outer.empty() ? 0 : outer.size() - 1; }
};

/// Requires a compressed row-major matrix.
CsrView view(const SparseMatrix& m);

/// y = P x + b. Returns max_i |y_i - x_i|, i.e. the residual of x.
double fixed_point_sweep_serial(CsrView p, std::span<const double> b, std::span<const double> x,
                                std::span<double> y);
double fixed_point_sweep_parallel(CsrView p, std::span<const double> b, std::span<const double> x,
                                  std::span<double> y);

struct PathLengthSums {
  std::uint64_t total = 0;  // sum of hop distances over unordered reachable pairs
  std::uint64_t pairs = 0;  // number of unordered reachable pairs
  bool connected = true;
};

/// All-pairs BFS over a symmetric adjacency structure.
PathLengthSums path_length_sums_serial(CsrView adjacency);
PathLengthSums path_length_sums_parallel(CsrView adjacency);

/// Sampling table of an absorbing chain. States [0, transient) are transient;
/// states >= transient are absorbing. Row s lists successor states with
/// cumulative probabilities whose last entry is exactly 1.
struct WalkTable {
  std::size_t transient = 0;
  std::size_t absorbing = 0;
  std::vector<int> outer;  // size transient + 1
  std::vector<int> target;
  std::vector<double> cumulative;
  std::vector<std::uint64_t> labels;  // RNG key of each transient state
};

struct WalkEstimate {
  std::vector<double> mean;            // per transient state
  std::vector<double> second_moment;   // E[X^2] per transient state
  std::uint64_t capped = 0;            // walks stopped at the step cap
};

/// Runs `walks` independent walks from every transient state. A walk that
/// lands on absorbing state a contributes absorbing_value[a - transient]; a
/// walk stopped at `step_cap` contributes 0. Walk k from state s draws from
/// stream(seed, walk, labels[s], k).
WalkEstimate random_walks_serial(const WalkTable& table, std::span<const double> absorbing_value,
                                 std::size_t walks, std::uint64_t seed, std::uint64_t step_cap);
WalkEstimate random_walks_parallel(const WalkTable& table,
                                   std::span<const double> absorbing_value, std::size_t walks,
                                   std::uint64_t seed, std::uint64_t step_cap);

/// True when called from inside an active OpenMP parallel region.
bool in_parallel_region();

}  // namespace threatnet::kernels
