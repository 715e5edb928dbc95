#include "threatnet/priors.hpp"

#include "threatnet/error.hpp"
#include "threatnet/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

namespace threatnet {

namespace {

double clamp_psi(double v) { return std::clamp(v, kPsiFloor, 1.0); }

}  // namespace

PriorSpec parse_prior(std::string_view text) {
  PriorSpec spec;
  if (text == "dwtp") {
    spec.kind = PriorKind::dwtp;
  } else if (text == "lwtp") {
    spec.kind = PriorKind::lwtp;
  } else if (text == "bfs") {
    spec.kind = PriorKind::bfs;
  } else if (text.starts_with("uniform")) {
    spec.kind = PriorKind::uniform;
    if (text.size() > 7) {
      if (text[7] != ':') throw InputError("bad prior: " + std::string(text));
      const auto value = text.substr(8);
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), spec.uniform_value);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw InputError("bad uniform prior value: " + std::string(value));
      }
    }
    if (!(spec.uniform_value > 0.0 && spec.uniform_value <= 1.0)) {
      throw InputError("uniform prior must lie in (0, 1]");
    }
  } else {
    throw InputError("unknown prior kind: " + std::string(text));
  }
  return spec;
}

std::string to_string(const PriorSpec& spec) {
  switch (spec.kind) {
    case PriorKind::dwtp: return "dwtp";
    case PriorKind::lwtp: return "lwtp";
    case PriorKind::bfs: return "bfs";
    case PriorKind::uniform: return "uniform:" + std::to_string(spec.uniform_value);
  }
  return "?";
}

double average_path_length(const Graph& g) {
  if (g.order() < 2) throw InputError("average path length needs at least two vertices");
  SparseMatrix sym = g.adjacency();
  if (g.directed()) {
    SparseMatrix t = g.adjacency().transpose();
    sym = sym + t;
    sym.makeCompressed();
  }
  const auto sums = kernels::in_parallel_region()
                        ? kernels::path_length_sums_serial(kernels::view(sym))
                        : kernels::path_length_sums_parallel(kernels::view(sym));
  if (!sums.connected) throw InputError("average path length of a disconnected graph");
  return static_cast<double>(sums.total) / static_cast<double>(sums.pairs);
}

double er_average_path_length(std::size_t n) {
  if (n < 3) throw InputError("closed-form path length needs n >= 3");
  const double ln = std::log(static_cast<double>(n));
  return (ln - std::numbers::egamma) / std::log(ln) + 0.5;
}

Prior compute_prior(const Graph& g, const PriorSpec& spec, const ObservationSet& obs) {
  const std::size_t n = g.order();
  Prior out;
  out.psi.assign(n, 1.0);
  switch (spec.kind) {
    case PriorKind::uniform:
      if (!(spec.uniform_value > 0.0 && spec.uniform_value <= 1.0)) {
        throw InputError("uniform prior must lie in (0, 1]");
      }
      std::fill(out.psi.begin(), out.psi.end(), clamp_psi(spec.uniform_value));
      break;
    case PriorKind::dwtp: {
      const auto d = g.degrees();
      for (Vertex v = 0; v < n; ++v) {
        if (!(d[v] > 0.0)) throw InputError("dwtp prior: zero degree at vertex " + std::to_string(v));
        out.psi[v] = clamp_psi(1.0 / d[v]);
      }
      break;
    }
    case PriorKind::lwtp: {
      if (n > spec.exact_path_length_limit) {
        out.path_length = er_average_path_length(n);
        out.approximate_path_length = true;
      } else {
        out.path_length = average_path_length(g);
      }
      std::fill(out.psi.begin(), out.psi.end(), clamp_psi(std::exp2(-1.0 / out.path_length)));
      break;
    }
    case PriorKind::bfs: {
      obs.validate(n);
      const auto sources = obs.vertices();
      const auto dist = hop_distances(g, sources);
      for (Vertex v = 0; v < n; ++v) {
        if (dist[v] < 0) throw InputError("disconnected from cue: vertex " + std::to_string(v));
        out.psi[v] = dist[v] == 0 ? 1.0 : clamp_psi(1.0 / dist[v]);
      }
      break;
    }
  }
  return out;
}

}  // namespace threatnet
