#include "threatnet/generators.hpp"

#include "threatnet/error.hpp"
#include "threatnet/kernels.hpp"
#include "threatnet/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace threatnet {

namespace {

void check_square(const Matrix& m, std::size_t k, const char* name) {
  if (m.size() != k) throw InputError(fmt::format("{} must have {} rows", name, k));
  for (const auto& row : m) {
    if (row.size() != k) throw InputError(fmt::format("{} must be {}x{}", name, k, k));
  }
}

double sbm_diagonal(double r, std::size_t order) {
  if (order < 2) return 0.0;
  const double nk = static_cast<double>(order);
  return r * std::log(nk) / nk;
}

std::size_t categorical(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * cumulative.back());
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<double> prefix_sums(const std::vector<double>& w) {
  std::vector<double> c(w.size());
  std::partial_sum(w.begin(), w.end(), c.begin());
  return c;
}

struct Interaction {
  Vertex u;
  Vertex v;
  double t_u;
  double t_v;
  int c_u;
  int c_v;
};

/// Runs `row(i, out)` for every i and concatenates the per-row outputs in
/// row order, so the result is independent of scheduling.
template <class RowFn>
std::vector<Interaction> gather_rows(std::size_t n, bool parallel, RowFn&& row) {
  std::vector<std::vector<Interaction>> rows(n);
  if (parallel && !kernels::in_parallel_region()) {
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < count; ++i) row(static_cast<std::size_t>(i), rows[static_cast<std::size_t>(i)]);
  } else {
    for (std::size_t i = 0; i < n; ++i) row(i, rows[i]);
  }
  std::vector<Interaction> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

GeneratedNetwork assemble(std::size_t n, const std::vector<Interaction>& interactions) {
  GeneratedNetwork net;
  std::vector<EdgeRecord> records;
  records.reserve(interactions.size());
  net.link_community.reserve(interactions.size());
  for (const auto& x : interactions) {
    records.push_back({x.u, x.v, 1.0, x.t_u, x.t_v});
    net.link_community.push_back({x.c_u, x.c_v});
  }
  net.graph = build_graph(n, records);
  return net;
}

}  // namespace

bool GeneratedNetwork::foreground_link(std::size_t i) const {
  const auto [a, b] = link_community.at(i);
  const auto fg = [&](int c) {
    return c >= 0 && static_cast<std::size_t>(c) < foreground_community.size() && foreground_community[c];
  };
  return fg(a) && fg(b);
}

// ---------------------------------------------------------------------------
// Stochastic blockmodel

SbmParams sbm_reference(double r_fg) {
  SbmParams p;
  p.sizes = {128, 128, 0};
  p.s = {{0.08, 0.02, 0.02}, {0.02, 0.08, 0.02}, {0.02, 0.02, r_fg * 0.1}};
  p.foreground = {false, false, true};
  p.embed_count = 30;
  p.embed_into = 2;
  return p;
}

void validate(const SbmParams& p) {
  const std::size_t k = p.sizes.size();
  if (k == 0) throw InputError("SBM needs at least one community");
  check_square(p.s, k, "S");
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if (!(p.s[a][b] >= 0.0 && p.s[a][b] <= 1.0)) throw InputError("S entries must lie in [0, 1]");
      if (p.s[a][b] != p.s[b][a]) throw InputError("S must be symmetric");
    }
  }
  if (!p.activity.empty()) {
    if (p.activity.size() != k) throw InputError("activity must have one entry per community");
    for (double r : p.activity) {
      if (r != 0.0 && !(r >= 1.0)) throw InputError("activity r_k must be >= 1 (0 disables)");
    }
  }
  if (!p.foreground.empty() && p.foreground.size() != k) {
    throw InputError("foreground flags must have one entry per community");
  }
  const std::size_t n = std::accumulate(p.sizes.begin(), p.sizes.end(), std::size_t{0});
  if (n == 0) throw InputError("SBM with no vertices");
  if (p.embed_count > n) throw InputError("cannot embed more vertices than the graph has");
  if (p.embed_count > 0 && p.embed_into >= k) throw InputError("embedding community out of range");
  if (!(p.horizon > 0.0)) throw InputError("horizon must be positive");
}

GeneratedNetwork generate_sbm(const SbmParams& params, std::uint64_t seed, bool parallel) {
  validate(params);
  const std::size_t k = params.sizes.size();
  const std::size_t n = std::accumulate(params.sizes.begin(), params.sizes.end(), std::size_t{0});

  std::vector<int> community;
  community.reserve(n);
  for (std::size_t c = 0; c < k; ++c) community.insert(community.end(), params.sizes[c], static_cast<int>(c));
  if (params.embed_count > 0) {
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    auto rng = stream(seed, Stream::sbm_embed);
    for (std::size_t i = 0; i < params.embed_count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(order[i], order[pick(rng)]);
      community[order[i]] = static_cast<int>(params.embed_into);
    }
  }

  Matrix s = params.s;
  if (!params.activity.empty()) {
    std::vector<std::size_t> order(k, 0);
    for (int c : community) ++order[static_cast<std::size_t>(c)];
    for (std::size_t c = 0; c < k; ++c) {
      if (params.activity[c] == 0.0) continue;
      s[c][c] = sbm_diagonal(params.activity[c], order[c]);
      if (s[c][c] > 1.0) throw InputError("activity drives S_kk above 1");
    }
  }

  std::vector<bool> fg(k, false);
  if (!params.foreground.empty()) fg = params.foreground;
  std::vector<double> instant(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) instant[c] = stream(seed, Stream::sbm_time, 0, c).uniform() * params.horizon;

  const auto row = [&](std::size_t i, std::vector<Interaction>& out) {
    const auto ci = static_cast<std::size_t>(community[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto cj = static_cast<std::size_t>(community[j]);
      const double p = s[ci][cj];
      if (p == 0.0) continue;
      if (!(stream(seed, Stream::sbm_pair, i, j).uniform() < p)) continue;
      double t = 0.0;
      if (params.coordinated_foreground && ci == cj && fg[ci]) {
        t = instant[ci];
      } else {
        t = stream(seed, Stream::sbm_time, i + 1, j).uniform() * params.horizon;
      }
      out.push_back({i, j, t, t, community[i], community[j]});
    }
  };

  GeneratedNetwork net = assemble(n, gather_rows(n, parallel, row));
  net.community = community;
  net.foreground_community = fg;
  net.truth.resize(n);
  for (std::size_t v = 0; v < n; ++v) net.truth[v] = fg[static_cast<std::size_t>(community[v])] ? 1 : 0;
  net.meta = {{"generator", "sbm"}, {"seed", seed}, {"params", to_json(params)}};
  return net;
}

// ---------------------------------------------------------------------------
// Hybrid mixed-membership blockmodel

HmmbParams hmmb_reference(double gamma_fg) {
  constexpr std::size_t K = 10;
  constexpr std::size_t L = 11;
  HmmbParams p;
  p.n = 256;
  p.phi.assign(L, 0.0);
  p.phi[0] = p.phi[1] = 15.0 / 256.0;
  for (std::size_t l = 2; l < L; ++l) p.phi[l] = (1.0 - 30.0 / 256.0) / 9.0;

  p.x.assign(L, std::vector<double>(K, 0.05));
  // Foreground lifestyles: covert community plus two background communities each.
  p.x[0][0] = 6.0;
  p.x[0][1] = p.x[0][2] = 1.0;
  p.x[1][0] = 6.0;
  p.x[1][3] = p.x[1][4] = 1.0;
  // Background lifestyle l lives mostly in community l - 1 and rarely in the covert one.
  for (std::size_t l = 2; l < L; ++l) {
    p.x[l][l - 1] = 4.0;
    p.x[l][0] = 0.01;
  }

  p.b.assign(K, std::vector<double>(K, 0.05));
  for (std::size_t c = 0; c < K; ++c) p.b[c][c] = 1.0;
  p.s.assign(K, std::vector<double>(K, 0.02));
  for (std::size_t c = 0; c < K; ++c) p.s[c][c] = -1.0;  // log N_k / N_k

  p.alpha = 2.5;
  p.lambda_min = 1500.0;
  p.gamma.assign(K, 100.0);
  p.gamma[0] = gamma_fg;
  p.horizon = 1.0;
  p.foreground_lifestyles = {0, 1};
  p.foreground_communities = {0};
  return p;
}

void validate(const HmmbParams& p) {
  const std::size_t k = p.communities();
  const std::size_t l = p.lifestyles();
  if (p.n < 2) throw InputError("HMMB needs at least two vertices");
  if (k == 0 || l == 0) throw InputError("HMMB needs communities and lifestyles");
  double total = 0.0;
  for (double f : p.phi) {
    if (!(f >= 0.0)) throw InputError("lifestyle probabilities must be nonnegative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("lifestyle probabilities must sum to 1");
  if (p.x.size() != l) throw InputError("X must have one row per lifestyle");
  for (const auto& row : p.x) {
    if (row.size() != k) throw InputError("X must have one column per community");
    for (double v : row) {
      if (!(v > 0.0)) throw InputError("degenerate Dirichlet concentration: X entries must be > 0");
    }
  }
  check_square(p.b, k, "B");
  check_square(p.s, k, "S");
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t c = 0; c < k; ++c) {
      if (!(p.b[a][c] >= 0.0)) throw InputError("B entries must be nonnegative");
      const double s = p.s[a][c];
      if (a == c ? !(s <= 1.0) : !(s >= 0.0 && s <= 1.0)) throw InputError("S entries must lie in [0, 1]");
      if (s != p.s[c][a]) throw InputError("S must be symmetric");
    }
  }
  if (!(p.alpha > 1.0)) throw InputError("power-law exponent must exceed 1");
  if (!(p.lambda_min > 0.0)) throw InputError("degree floor must be positive");
  if (p.gamma.size() != k) throw InputError("gamma must have one entry per community");
  for (double g : p.gamma) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw InputError("gamma entries must be nonnegative");
  }
  if (!(p.horizon > 0.0)) throw InputError("horizon must be positive");
  for (auto f : p.foreground_lifestyles) {
    if (f >= l) throw InputError("foreground lifestyle out of range");
  }
  for (auto f : p.foreground_communities) {
    if (f >= k) throw InputError("foreground community out of range");
  }
}

GeneratedNetwork generate_hmmb(const HmmbParams& params, std::uint64_t seed, bool parallel) {
  validate(params);
  const std::size_t n = params.n;
  const std::size_t k = params.communities();

  // Lifestyles, memberships and expected degrees: one stream per vertex.
  const auto phi_cum = prefix_sums(params.phi);
  std::vector<std::size_t> lifestyle(n);
  std::vector<std::vector<double>> pi_cum(n);
  std::vector<double> lambda(n);
  std::vector<int> home(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto rl = stream(seed, Stream::hmmb_lifestyle, i);
    lifestyle[i] = categorical(phi_cum, rl.uniform());
    const auto& conc = params.x[lifestyle[i]];
    home[i] = static_cast<int>(std::max_element(conc.begin(), conc.end()) - conc.begin());

    auto rm = stream(seed, Stream::hmmb_membership, i);
    std::vector<double> pi(k);
    for (std::size_t c = 0; c < k; ++c) pi[c] = std::gamma_distribution<double>(conc[c], 1.0)(rm);
    const double norm = std::accumulate(pi.begin(), pi.end(), 0.0);
    if (!(norm > 0.0)) {
      // Every gamma draw underflowed (tiny concentrations): fall back to the mean.
      pi = conc;
    }
    pi_cum[i] = prefix_sums(pi);

    auto rd = stream(seed, Stream::hmmb_degree, i);
    lambda[i] = params.lambda_min * std::pow(1.0 - rd.uniform(), -1.0 / (params.alpha - 1.0));
  }
  const double lambda_total = std::accumulate(lambda.begin(), lambda.end(), 0.0);

  Matrix s = params.s;
  std::vector<std::size_t> home_order(k, 0);
  for (int h : home) ++home_order[static_cast<std::size_t>(h)];
  for (std::size_t c = 0; c < k; ++c) {
    if (s[c][c] < 0.0) s[c][c] = std::min(1.0, sbm_diagonal(1.0, home_order[c]));
  }

  // Event pools per community, drawn from their own streams so that the
  // topology does not depend on γ.
  std::vector<std::vector<double>> pool(k);
  for (std::size_t c = 0; c < k; ++c) {
    auto re = stream(seed, Stream::hmmb_events, c);
    std::size_t count = 1;
    if (params.gamma[c] > 0.0) {
      std::poisson_distribution<std::size_t> poisson(params.gamma[c]);
      do {
        count = poisson(re);
      } while (count == 0);
    }
    pool[c].resize(count);
    for (auto& t : pool[c]) t = re.uniform() * params.horizon;
  }

  const auto row = [&](std::size_t i, std::vector<Interaction>& out) {
    const auto hi = static_cast<std::size_t>(home[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto hj = static_cast<std::size_t>(home[j]);
      auto rp = stream(seed, Stream::hmmb_pair, i, j);
      if (!(rp.uniform() < s[hi][hj])) continue;  // I^S_ij
      const std::size_t zi = categorical(pi_cum[i], rp.uniform());
      const std::size_t zj = categorical(pi_cum[j], rp.uniform());
      const double rate = lambda[i] * lambda[j] / lambda_total * params.b[zi][zj];
      if (!(rate > 0.0)) continue;
      const auto w = std::poisson_distribution<std::size_t>(rate)(rp);
      if (w == 0) continue;
      auto rs = stream(seed, Stream::hmmb_stamp, i, j);
      for (std::size_t m = 0; m < w; ++m) {
        const auto& pi_pool = pool[zi];
        const auto& pj_pool = pool[zj];
        const double ti = pi_pool[std::min(static_cast<std::size_t>(rs.uniform() * static_cast<double>(pi_pool.size())), pi_pool.size() - 1)];
        const double tj = pj_pool[std::min(static_cast<std::size_t>(rs.uniform() * static_cast<double>(pj_pool.size())), pj_pool.size() - 1)];
        out.push_back({i, j, ti, tj, static_cast<int>(zi), static_cast<int>(zj)});
      }
    }
  };

  GeneratedNetwork net = assemble(n, gather_rows(n, parallel, row));
  net.community = home;
  net.foreground_community.assign(k, false);
  for (auto c : params.foreground_communities) net.foreground_community[c] = true;
  std::vector<bool> fg_life(params.lifestyles(), false);
  for (auto l : params.foreground_lifestyles) fg_life[l] = true;
  net.truth.resize(n);
  for (std::size_t v = 0; v < n; ++v) net.truth[v] = fg_life[lifestyle[v]] ? 1 : 0;

  std::vector<std::size_t> pool_sizes(k);
  for (std::size_t c = 0; c < k; ++c) pool_sizes[c] = pool[c].size();
  net.meta = {{"generator", "hmmb"},
              {"seed", seed},
              {"params", to_json(params)},
              {"event_pool_sizes", pool_sizes}};
  return net;
}

// ---------------------------------------------------------------------------
// JSON

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed, bool connected) {
  if (n == 0) throw InputError("empty graph");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("edge probability must lie in [0, 1]");
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    std::vector<EdgeRecord> rows;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (stream(seed, Stream::er_pair, attempt * n + i, j).uniform() < p) rows.push_back({i, j, 1.0, {}, {}});
      }
    }
    Graph g = build_graph(n, rows);
    if (!connected || is_connected(g)) return g;
  }
  throw InputError(fmt::format("no connected G({}, {}) in 1000 attempts", n, p));
}

nlohmann::json to_json(const SbmParams& p) {
  return {{"sizes", p.sizes},
          {"s", p.s},
          {"activity", p.activity},
          {"foreground", p.foreground},
          {"embed_count", p.embed_count},
          {"embed_into", p.embed_into},
          {"horizon", p.horizon},
          {"coordinated_foreground", p.coordinated_foreground}};
}

nlohmann::json to_json(const HmmbParams& p) {
  return {{"n", p.n},
          {"phi", p.phi},
          {"x", p.x},
          {"b", p.b},
          {"s", p.s},
          {"alpha", p.alpha},
          {"lambda_min", p.lambda_min},
          {"gamma", p.gamma},
          {"horizon", p.horizon},
          {"foreground_lifestyles", p.foreground_lifestyles},
          {"foreground_communities", p.foreground_communities}};
}

namespace {

template <class T>
void take(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("config key '{}': {}", key, e.what()));
  }
}

}  // namespace

SbmParams sbm_from_json(const nlohmann::json& j, SbmParams base) {
  if (!j.is_object()) throw InputError("SBM parameters must be a JSON object");
  if (j.contains("r_fg")) base = sbm_reference(j.at("r_fg").get<double>());
  take(j, "sizes", base.sizes);
  take(j, "s", base.s);
  take(j, "activity", base.activity);
  take(j, "foreground", base.foreground);
  take(j, "embed_count", base.embed_count);
  take(j, "embed_into", base.embed_into);
  take(j, "horizon", base.horizon);
  take(j, "coordinated_foreground", base.coordinated_foreground);
  validate(base);
  return base;
}

HmmbParams hmmb_from_json(const nlohmann::json& j, HmmbParams base) {
  if (!j.is_object()) throw InputError("HMMB parameters must be a JSON object");
  take(j, "n", base.n);
  take(j, "phi", base.phi);
  take(j, "x", base.x);
  take(j, "b", base.b);
  take(j, "s", base.s);
  take(j, "alpha", base.alpha);
  take(j, "lambda_min", base.lambda_min);
  take(j, "gamma", base.gamma);
  take(j, "horizon", base.horizon);
  take(j, "foreground_lifestyles", base.foreground_lifestyles);
  take(j, "foreground_communities", base.foreground_communities);
  if (j.contains("gamma_fg")) {
    const double g = j.at("gamma_fg").get<double>();
    for (auto c : base.foreground_communities) {
      if (c < base.gamma.size()) base.gamma[c] = g;
    }
  }
  validate(base);
  return base;
}

}  // namespace threatnet
