#include "threatnet/spacetime.hpp"

#include "threatnet/error.hpp"
#include "threatnet/kernels.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace threatnet {

namespace {

using Triplet = Eigen::Triplet<double, int>;

constexpr double kEdgeSlack = 1e-9;  // fraction of a bin tolerated at the grid edges

void add_link(const SpaceTimeSystem& sys, const Link& link, std::size_t index, TemporalMode mode,
              double truncation, std::vector<Triplet>& out) {
  const Vertex u = link.u;
  const Vertex v = link.v;
  const double w = link.weight;
  if (u == v || w == 0.0) return;
  const std::size_t nb = sys.grid.bins;
  const auto put = [&](Vertex to, std::size_t k, Vertex from, std::size_t l, double value) {
    out.emplace_back(static_cast<int>(sys.index(to, k)), static_cast<int>(sys.index(from, l)), value);
  };

  switch (mode) {
    case TemporalMode::kernel: {
      if (!link.timed()) {
        throw InputError(fmt::format("kernel-mode link {} ({}, {}) has no time stamps", index, u, v));
      }
      std::size_t bu = 0;
      std::size_t bv = 0;
      try {
        bu = sys.grid.bin_of(link.times->first);
        bv = sys.grid.bin_of(link.times->second);
      } catch (const InputError& e) {
        throw InputError(fmt::format("link {} ({}, {}): {}", index, u, v, e.what()));
      }
      // Column at the sender's bin, kernel centred at the receiver's bin.
      const auto column = [&](Vertex to, std::size_t centre, Vertex from, std::size_t from_bin) {
        const double rate = sys.rates[to];
        const double reach = std::log(1.0 / truncation) / (rate * sys.grid.dt) + 1.0;
        const std::size_t span =
            truncation > 0.0 && reach < static_cast<double>(nb) ? static_cast<std::size_t>(reach) : nb;
        const std::size_t lo = centre > span ? centre - span : 0;
        const std::size_t hi = std::min(nb, centre + span + 1);
        for (std::size_t k = lo; k < hi; ++k) {
          const double lag = static_cast<double>(k > centre ? k - centre : centre - k) * sys.grid.dt;
          const double kv = temporal_kernel(rate, lag);
          if (kv < truncation) continue;
          put(to, k, from, from_bin, w * kv);
        }
      };
      column(v, bv, u, bu);
      column(u, bu, v, bv);
      break;
    }
    case TemporalMode::instant:
      for (std::size_t k = 0; k < nb; ++k) {
        put(v, k, u, k, w);
        put(u, k, v, k, w);
      }
      break;
    case TemporalMode::clique: {
      const double value = w / static_cast<double>(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        for (std::size_t l = 0; l < nb; ++l) {
          put(v, k, u, l, value);
          put(u, k, v, l, value);
        }
      }
      break;
    }
  }
}

std::vector<double> expand_psi(std::span<const double> psi, const SpaceTimeSystem& sys,
                               const char* what) {
  std::vector<double> out(sys.states(), 1.0);
  if (psi.empty()) return out;
  if (psi.size() == sys.states()) {
    out.assign(psi.begin(), psi.end());
  } else if (psi.size() == sys.vertices) {
    for (Vertex v = 0; v < sys.vertices; ++v) {
      for (std::size_t k = 0; k < sys.bins(); ++k) out[sys.index(v, k)] = psi[v];
    }
  } else {
    throw InputError(fmt::format("{} prior has length {}, expected {} or {}", what, psi.size(),
                                 sys.vertices, sys.states()));
  }
  for (double p : out) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError(fmt::format("{} prior outside [0, 1]", what));
  }
  return out;
}

}  // namespace

std::size_t TimeGrid::bin_of(double t) const {
  const double x = (t - t0) / dt;
  if (!std::isfinite(x) || x < -kEdgeSlack || x > static_cast<double>(bins) + kEdgeSlack) {
    throw InputError(fmt::format("time {} outside grid [{}, {}]", t, t0, end()));
  }
  if (x <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(std::floor(x)), bins - 1);
}

TimeGrid make_grid(double t_min, double t_max, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time bin width must be positive");
  if (!(t_max >= t_min)) throw InputError("empty time range");
  TimeGrid grid;
  grid.t0 = t_min;
  grid.dt = dt;
  grid.bins = static_cast<std::size_t>(std::floor((t_max - t_min) / dt)) + 1;
  return grid;
}

TemporalMode parse_temporal_mode(std::string_view text) {
  if (text == "kernel") return TemporalMode::kernel;
  if (text == "instant") return TemporalMode::instant;
  if (text == "clique") return TemporalMode::clique;
  throw InputError("unknown temporal mode: " + std::string(text));
}

SpaceTimeVariant parse_spacetime_variant(std::string_view text) {
  if (text == "weighted") return SpaceTimeVariant::weighted;
  if (text == "coord" || text == "coordinated") return SpaceTimeVariant::coordinated;
  if (text == "coord-prior" || text == "coordinated-prior") return SpaceTimeVariant::coordinated_prior;
  throw InputError("unknown space-time variant: " + std::string(text));
}

Reducer parse_reducer(std::string_view text) {
  if (text == "max") return Reducer::max;
  if (text == "mean") return Reducer::mean;
  throw InputError("unknown reducer: " + std::string(text));
}

double temporal_kernel(double rate, double lag) { return std::exp(-rate * std::abs(lag)); }

std::vector<double> SpaceTimeSystem::row_weights() const {
  std::vector<double> w(states(), 0.0);
  for (int r = 0; r < adjacency.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(adjacency, r); it; ++it) s += it.value();
    w[static_cast<std::size_t>(r)] = s;
  }
  return w;
}

SpaceTimeSystem assemble_spacetime(const Graph& g, const TimeGrid& grid,
                                   std::span<const double> rates, const SpaceTimeOptions& options) {
  if (!(grid.dt > 0.0) || grid.bins < 1) throw InputError("invalid time grid");
  const std::size_t n = g.order();
  SpaceTimeSystem sys;
  sys.vertices = n;
  sys.grid = grid;
  if (rates.size() == 1) {
    sys.rates.assign(n, rates[0]);
  } else if (rates.size() == n) {
    sys.rates.assign(rates.begin(), rates.end());
  } else {
    throw InputError("kernel rates must have length 1 or n");
  }
  for (double r : sys.rates) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InputError("kernel rate must be positive");
  }
  const auto& links = g.links();
  if (!options.link_modes.empty() && options.link_modes.size() != links.size()) {
    throw InputError("per-link temporal modes must match the number of links");
  }
  if (static_cast<double>(n) * static_cast<double>(grid.bins) > 2.0e9) {
    throw InputError("space-time system too large for 32-bit indices");
  }

  sys.spatial_degree.assign(n, 0.0);
  for (const auto& l : links) {
    if (l.u == l.v) continue;
    sys.spatial_degree[l.u] += l.weight;
    sys.spatial_degree[l.v] += l.weight;
  }

  // Per-link triplet lists merged in link order: the assembled matrix does not
  // depend on how links were distributed across threads.
  std::vector<std::vector<Triplet>> parts(links.size());
  const auto mode_of = [&](std::size_t i) {
    return options.link_modes.empty() ? options.default_mode : options.link_modes[i];
  };
  const auto count = static_cast<std::ptrdiff_t>(links.size());
  if (options.parallel && !kernels::in_parallel_region()) {
    std::vector<std::string> errors(links.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      try {
        add_link(sys, links[ui], ui, mode_of(ui), options.truncation, parts[ui]);
      } catch (const InputError& e) {
        errors[ui] = e.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw InputError(e);
    }
  } else {
    for (std::size_t i = 0; i < links.size(); ++i) {
      add_link(sys, links[i], i, mode_of(i), options.truncation, parts[i]);
    }
  }

  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<Triplet> triplets;
  triplets.reserve(total);
  for (auto& p : parts) {
    triplets.insert(triplets.end(), p.begin(), p.end());
    std::vector<Triplet>().swap(p);
  }
  const auto states = static_cast<int>(sys.states());
  sys.adjacency.resize(states, states);
  sys.adjacency.setFromTriplets(triplets.begin(), triplets.end());
  sys.adjacency.makeCompressed();
  return sys;
}

CoordinationPrior coordination_prior(const SpaceTimeSystem& sys) {
  CoordinationPrior out;
  out.psi.assign(sys.states(), 0.0);
  const auto w = sys.row_weights();
  for (Vertex v = 0; v < sys.vertices; ++v) {
    const double d = sys.spatial_degree[v];
    if (!(d > 0.0)) throw InputError(fmt::format("isolated vertex {} has no coordination prior", v));
    for (std::size_t k = 0; k < sys.bins(); ++k) {
      const std::size_t s = sys.index(v, k);
      const double psi = w[s] / d;
      if (psi > 1.0) ++out.clamped;
      out.psi[s] = std::min(psi, 1.0);
    }
  }
  if (out.clamped > 0) {
    spdlog::info("coordination prior clamped to 1 at {} space-time states", out.clamped);
  }
  return out;
}

SparseMatrix spacetime_transition(const SpaceTimeSystem& sys, const SpaceTimeSolveOptions& options) {
  const auto w = sys.row_weights();
  std::vector<double> scale(sys.states(), 0.0);
  switch (options.variant) {
    case SpaceTimeVariant::weighted: {
      const auto psi = expand_psi(options.psi, sys, "space-time");
      for (std::size_t s = 0; s < sys.states(); ++s) {
        if (w[s] > 0.0) scale[s] = psi[s] / w[s];
      }
      break;
    }
    case SpaceTimeVariant::coordinated:
    case SpaceTimeVariant::coordinated_prior: {
      std::vector<double> spatial(sys.vertices, 1.0);
      if (options.variant == SpaceTimeVariant::coordinated_prior) {
        if (options.psi.size() != sys.vertices) {
          throw InputError("coordinated-prior variant needs one spatial prior per vertex");
        }
        spatial = options.psi;
        for (double p : spatial) {
          if (!(p > 0.0 && p <= 1.0)) throw InputError("spatial prior outside (0, 1]");
        }
      }
      for (Vertex v = 0; v < sys.vertices; ++v) {
        const double d = sys.spatial_degree[v];
        for (std::size_t k = 0; k < sys.bins(); ++k) {
          const std::size_t s = sys.index(v, k);
          // ψ_v(t_k)/W = min(W/d, 1)/W = 1/max(d, W)
          if (w[s] > 0.0) scale[s] = spatial[v] / std::max(d, w[s]);
        }
      }
      break;
    }
  }
  SparseMatrix p = sys.adjacency;
  for (int r = 0; r < p.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(p, r); it; ++it) it.valueRef() *= scale[static_cast<std::size_t>(r)];
  }
  return p;
}

void spacetime_boundary(const SpaceTimeSystem& sys, const ObservationSet& obs,
                        std::vector<std::size_t>& states, std::vector<double>& values) {
  if (obs.empty()) throw InputError("no observations");
  std::map<std::size_t, double> boundary;
  const auto add = [&](std::size_t s, double p) {
    if (!boundary.emplace(s, p).second) {
      throw InputError(fmt::format("duplicate observation at space-time state {}", s));
    }
  };
  for (const auto& o : obs.entries()) {
    if (o.vertex >= sys.vertices) throw InputError("observed vertex out of range");
    if (!(o.probability >= 0.0 && o.probability <= 1.0)) throw InputError("observation p outside [0, 1]");
    if (o.time) {
      add(sys.index(o.vertex, sys.grid.bin_of(*o.time)), o.probability);
    } else {
      for (std::size_t k = 0; k < sys.bins(); ++k) add(sys.index(o.vertex, k), o.probability);
    }
  }
  states.clear();
  values.clear();
  for (const auto& [s, p] : boundary) {
    states.push_back(s);
    values.push_back(p);
  }
}

SpaceTimeThreat solve_spacetime(const SpaceTimeSystem& sys, const ObservationSet& obs,
                                const SpaceTimeSolveOptions& options) {
  std::vector<std::size_t> states;
  std::vector<double> values;
  spacetime_boundary(sys, obs, states, values);
  const SparseMatrix p = spacetime_transition(sys, options);
  auto solved = solve_boundary_problem(p, states, values, options.solver);
  SpaceTimeThreat out;
  out.vertices = sys.vertices;
  out.bins = sys.bins();
  out.theta = std::move(solved.theta);
  out.report = solved.report;
  return out;
}

std::vector<double> reduce_to_vertex_scores(const SpaceTimeThreat& st, Reducer reducer) {
  std::vector<double> scores(st.vertices, 0.0);
  for (Vertex v = 0; v < st.vertices; ++v) {
    double acc = reducer == Reducer::max ? st.theta[v * st.bins] : 0.0;
    for (std::size_t k = 0; k < st.bins; ++k) {
      const double x = st.theta[v * st.bins + k];
      acc = reducer == Reducer::max ? std::max(acc, x) : acc + x;
    }
    scores[v] = reducer == Reducer::max ? acc : acc / static_cast<double>(st.bins);
  }
  return scores;
}

double default_rate(const Graph& g) {
  std::vector<std::vector<double>> stamps(g.order());
  for (const auto& l : g.links()) {
    if (!l.times) continue;
    stamps[l.u].push_back(l.times->first);
    stamps[l.v].push_back(l.times->second);
  }
  std::vector<double> gaps;
  for (auto& s : stamps) {
    std::sort(s.begin(), s.end());
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i] > s[i - 1]) gaps.push_back(s[i] - s[i - 1]);
    }
  }
  if (gaps.empty()) throw InputError("cannot derive a kernel rate: no positive inter-interaction gap");
  std::sort(gaps.begin(), gaps.end());
  const std::size_t m = gaps.size();
  const double median = m % 2 == 1 ? gaps[m / 2] : 0.5 * (gaps[m / 2 - 1] + gaps[m / 2]);
  return std::log(2.0) / median;
}

TimeGrid default_grid(const Graph& g, double rate) {
  if (!(rate > 0.0)) throw InputError("kernel rate must be positive");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& l : g.links()) {
    if (!l.times) continue;
    lo = std::min({lo, l.times->first, l.times->second});
    hi = std::max({hi, l.times->first, l.times->second});
  }
  if (!std::isfinite(lo)) throw InputError("graph has no time stamps");
  return make_grid(lo, hi, 0.02 / rate);
}

}  // namespace threatnet
