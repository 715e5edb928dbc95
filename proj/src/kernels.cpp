#include "threatnet/kernels.hpp"

#include "threatnet/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace threatnet::kernels {

namespace {

inline double sweep_row(const CsrView& p, std::span<const double> b, std::span<const double> x,
                        std::size_t r) {
  double acc = b[r];
  for (int k = p.outer[r]; k < p.outer[r + 1]; ++k) acc += p.values[k] * x[p.inner[k]];
  return acc;
}

void bfs_row(const CsrView& adj, std::size_t source, std::vector<int>& dist,
             std::vector<std::size_t>& queue, std::uint64_t& total, std::uint64_t& pairs,
             bool& connected) {
  std::fill(dist.begin(), dist.end(), -1);
  queue.clear();
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t x = queue[head];
    for (int k = adj.outer[x]; k < adj.outer[x + 1]; ++k) {
      const auto y = static_cast<std::size_t>(adj.inner[k]);
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    }
  }
  for (std::size_t t = source + 1; t < dist.size(); ++t) {
    if (dist[t] < 0) {
      connected = false;
    } else {
      total += static_cast<std::uint64_t>(dist[t]);
      ++pairs;
    }
  }
}

inline void walk_from(const WalkTable& table, std::span<const double> absorbing_value,
                      std::size_t s, std::size_t walks, std::uint64_t seed,
                      std::uint64_t step_cap, double& sum, double& sum_sq,
                      std::uint64_t& capped) {
  sum = 0.0;
  sum_sq = 0.0;
  for (std::size_t k = 0; k < walks; ++k) {
    auto rng = stream(seed, Stream::walk, table.labels[s], k);
    std::size_t state = s;
    double value = 0.0;
    std::uint64_t steps = 0;
    while (true) {
      if (steps == step_cap) {
        ++capped;
        break;
      }
      const double u = rng.uniform();
      const auto first = table.cumulative.begin() + table.outer[state];
      const auto last = table.cumulative.begin() + table.outer[state + 1];
      auto pick = std::upper_bound(first, last, u);
      if (pick == last) --pick;  // u < 1 == last cumulative, kept for safety
      state = static_cast<std::size_t>(table.target[pick - table.cumulative.begin()]);
      ++steps;
      if (state >= table.transient) {
        value = absorbing_value[state - table.transient];
        break;
      }
    }
    sum += value;
    sum_sq += value * value;
  }
}

}  // namespace

CsrView view(const SparseMatrix& m) {
  const auto rows = static_cast<std::size_t>(m.outerSize());
  const auto nnz = static_cast<std::size_t>(m.nonZeros());
  return {std::span<const int>(m.outerIndexPtr(), rows + 1),
          std::span<const int>(m.innerIndexPtr(), nnz),
          std::span<const double>(m.valuePtr(), nnz)};
}

bool in_parallel_region() { return omp_in_parallel() != 0; }

double fixed_point_sweep_serial(CsrView p, std::span<const double> b, std::span<const double> x,
                                std::span<double> y) {
  double delta = 0.0;
  for (std::size_t r = 0; r < p.rows(); ++r) {
    y[r] = sweep_row(p, b, x, r);
    delta = std::max(delta, std::abs(y[r] - x[r]));
  }
  return delta;
}

double fixed_point_sweep_parallel(CsrView p, std::span<const double> b, std::span<const double> x,
                                  std::span<double> y) {
  const auto rows = static_cast<std::ptrdiff_t>(p.rows());
  double delta = 0.0;
#pragma omp parallel for schedule(static) reduction(max : delta)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto ur = static_cast<std::size_t>(r);
    y[ur] = sweep_row(p, b, x, ur);
    delta = std::max(delta, std::abs(y[ur] - x[ur]));
  }
  return delta;
}

PathLengthSums path_length_sums_serial(CsrView adjacency) {
  const std::size_t n = adjacency.rows();
  PathLengthSums out;
  std::vector<int> dist(n);
  std::vector<std::size_t> queue;
  queue.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    bfs_row(adjacency, s, dist, queue, out.total, out.pairs, out.connected);
  }
  return out;
}

PathLengthSums path_length_sums_parallel(CsrView adjacency) {
  const auto n = static_cast<std::ptrdiff_t>(adjacency.rows());
  std::uint64_t total = 0;
  std::uint64_t pairs = 0;
  bool connected = true;
#pragma omp parallel reduction(+ : total, pairs) reduction(&& : connected)
  {
    std::vector<int> dist(static_cast<std::size_t>(n));
    std::vector<std::size_t> queue;
    queue.reserve(static_cast<std::size_t>(n));
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t s = 0; s < n; ++s) {
      bfs_row(adjacency, static_cast<std::size_t>(s), dist, queue, total, pairs, connected);
    }
  }
  return {total, pairs, connected};
}

WalkEstimate random_walks_serial(const WalkTable& table, std::span<const double> absorbing_value,
                                 std::size_t walks, std::uint64_t seed, std::uint64_t step_cap) {
  WalkEstimate out;
  out.mean.assign(table.transient, 0.0);
  out.second_moment.assign(table.transient, 0.0);
  for (std::size_t s = 0; s < table.transient; ++s) {
    double sum = 0.0;
    double sum_sq = 0.0;
    walk_from(table, absorbing_value, s, walks, seed, step_cap, sum, sum_sq, out.capped);
    out.mean[s] = sum / static_cast<double>(walks);
    out.second_moment[s] = sum_sq / static_cast<double>(walks);
  }
  return out;
}

WalkEstimate random_walks_parallel(const WalkTable& table,
                                   std::span<const double> absorbing_value, std::size_t walks,
                                   std::uint64_t seed, std::uint64_t step_cap) {
  WalkEstimate out;
  out.mean.assign(table.transient, 0.0);
  out.second_moment.assign(table.transient, 0.0);
  const auto states = static_cast<std::ptrdiff_t>(table.transient);
  std::uint64_t capped = 0;
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : capped)
  for (std::ptrdiff_t s = 0; s < states; ++s) {
    double sum = 0.0;
    double sum_sq = 0.0;
    const auto us = static_cast<std::size_t>(s);
    walk_from(table, absorbing_value, us, walks, seed, step_cap, sum, sum_sq, capped);
    out.mean[us] = sum / static_cast<double>(walks);
    out.second_moment[us] = sum_sq / static_cast<double>(walks);
  }
  out.capped = capped;
  return out;
}

}  // namespace threatnet::kernels
