#pragma once

#include "threatnet/graph.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <vector>

namespace threatnet {

using Matrix = std::vector<std::vector<double>>;

/// Output of a generator. Each interaction is one link with one time stamp per
/// endpoint; the graph merges parallel interactions into edge weights.
struct GeneratedNetwork {
  Graph graph;
  std::vector<int> truth;                          // Θ per vertex (0/1)
  std::vector<int> community;                      // home community per vertex
  std::vector<std::array<int, 2>> link_community;  // community stamping each endpoint, per link
  std::vector<bool> foreground_community;          // per community
  nlohmann::json meta;                             // params + seed

  /// True when both endpoints of link i acted in a foreground community.
  bool foreground_link(std::size_t i) const;
};

struct SbmParams {
  std::vector<std::size_t> sizes;   // community orders (before embedding)
  Matrix s;                         // K x K edge probabilities
  /// When set, S_kk = r_k log N_k / N_k from the realised community order.
  std::vector<double> activity;
  std::vector<bool> foreground;     // per community
  /// Relabel this many uniformly chosen vertices into community `embed_into`.
  std::size_t embed_count = 0;
  std::size_t embed_into = 0;
  double horizon = 1.0;
  /// Foreground-foreground edges share one instant per community; all other
  /// edges are stamped uniformly over [0, horizon).
  bool coordinated_foreground = true;
};

/// Two background communities of 128 with 30 foreground vertices embedded at
/// random; S_fg = r_fg * 0.1.
SbmParams sbm_reference(double r_fg);

void validate(const SbmParams& p);
GeneratedNetwork generate_sbm(const SbmParams& params, std::uint64_t seed, bool parallel = true);

struct HmmbParams {
  std::size_t n = 256;
  std::vector<double> phi;          // L lifestyle probabilities
  Matrix x;                         // L x K Dirichlet concentrations (> 0)
  Matrix b;                         // K x K block strengths (>= 0)
  /// SBM indicator probabilities over home communities. Diagonal entries that
  /// are negative mean "log N_k / N_k" from the realised home-community order.
  Matrix s;
  double alpha = 2.5;               // Pareto exponent of λ_i
  double lambda_min = 1.0;          // Pareto floor
  std::vector<double> gamma;        // K Poisson means of event-pool sizes
  double horizon = 1.0;
  std::vector<std::size_t> foreground_lifestyles;
  std::vector<std::size_t> foreground_communities;

  std::size_t communities() const noexcept { return b.size(); }
  std::size_t lifestyles() const noexcept { return phi.size(); }
};

/// 10 communities (community 0 covert), 11 lifestyles (0 and 1 foreground),
/// sparsity log N_k / N_k, foreground coordination γ_fg.
HmmbParams hmmb_reference(double gamma_fg);

void validate(const HmmbParams& p);
GeneratedNetwork generate_hmmb(const HmmbParams& params, std::uint64_t seed, bool parallel = true);

/// G(n, p). With `connected` set the draw is repeated (attempt index in the
/// stream key) until the graph is connected; throws after 1000 attempts.
Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed, bool connected = true);

nlohmann::json to_json(const SbmParams& p);
nlohmann::json to_json(const HmmbParams& p);
/// Missing keys keep the values of `base`.
SbmParams sbm_from_json(const nlohmann::json& j, SbmParams base = sbm_reference(1.1));
HmmbParams hmmb_from_json(const nlohmann::json& j, HmmbParams base = hmmb_reference(1.0));

}  // namespace threatnet
