#pragma once

#include "threatnet/graph.hpp"
#include "threatnet/observation.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace threatnet {

enum class PriorKind { uniform, dwtp, lwtp, bfs };

struct PriorSpec {
  PriorKind kind = PriorKind::dwtp;
  double uniform_value = 1.0;  // uniform(ψ0)
  /// Above this order lwtp uses the Erdős–Rényi closed form for l(G).
  std::size_t exact_path_length_limit = 2000;
};

/// Parses "dwtp", "lwtp", "bfs", "uniform" or "uniform:<psi0>".
PriorSpec parse_prior(std::string_view text);
std::string to_string(const PriorSpec& spec);

struct Prior {
  std::vector<double> psi;
  /// lwtp only: the l(G) used and whether it came from the closed form.
  double path_length = 0.0;
  bool approximate_path_length = false;
};

/// Lower bound applied to every ψ so the absorbing chain stays substochastic
/// without degenerating.
inline constexpr double kPsiFloor = 1e-6;

/// Per-vertex diffusion probabilities ψ_v in (0, 1]:
///   uniform: ψ0;  dwtp: 1/d_v;  lwtp: 2^(-1/l(G));
///   bfs: 1 at observed vertices, min(1, 1/dist) elsewhere (hop distance).
/// bfs throws InputError("disconnected from cue") for unreachable vertices.
Prior compute_prior(const Graph& g, const PriorSpec& spec, const ObservationSet& obs = {});

/// Mean hop distance over unordered vertex pairs. Throws on disconnected input.
double average_path_length(const Graph& g);

/// l(G) = (log n - γ) / log log n + 1/2 for connected Erdős–Rényi graphs at
/// p = log(n)/n.
double er_average_path_length(std::size_t n);

}  // namespace threatnet
