#include "threatnet/absorbing_chain.hpp"

#include "threatnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace threatnet {

namespace {

constexpr auto kAbsent = std::numeric_limits<std::size_t>::max();

using Entry = std::pair<std::size_t, double>;  // (state column, probability)

double sum_in_order(const std::vector<Entry>& row) {
  double s = 0.0;
  for (const auto& e : row) s += e.second;
  return s;
}

Eigen::MatrixXd dense(const SparseMatrix& m) { return Eigen::MatrixXd(m); }

}  // namespace

AbsorbingChain build_absorbing_chain(const Graph& g, std::span<const double> psi,
                                     const ObservationSet& obs) {
  const std::size_t n = g.order();
  obs.validate(n);
  if (psi.size() != n) throw InputError("prior length does not match vertex count");
  for (std::size_t v = 0; v < n; ++v) {
    if (!(psi[v] > 0.0 && psi[v] <= 1.0)) {
      throw InputError("prior outside (0, 1] at vertex " + std::to_string(v));
    }
  }

  AbsorbingChain chain;
  std::vector<std::size_t> bpos(n, kAbsent);
  for (const auto& o : obs.entries()) {
    bpos[o.vertex] = chain.boundary.size();
    chain.boundary.push_back(o.vertex);
    chain.boundary_values.push_back(o.probability);
  }
  std::vector<std::size_t> ipos(n, kAbsent);
  for (Vertex v = 0; v < n; ++v) {
    if (bpos[v] == kAbsent) {
      ipos[v] = chain.interior.size();
      chain.interior.push_back(v);
    }
  }

  const std::size_t m = chain.interior.size();
  const std::size_t nb = chain.boundary.size();
  const SparseMatrix& a = g.adjacency();
  std::vector<Eigen::Triplet<double, int>> gt;
  std::vector<Eigen::Triplet<double, int>> ht;
  chain.absorb.assign(m, 0.0);
  std::vector<Entry> row;

  for (std::size_t i = 0; i < m; ++i) {
    const auto v = static_cast<int>(chain.interior[i]);
    double d = 0.0;
    for (SparseMatrix::InnerIterator it(a, v); it; ++it) d += it.value();
    if (!(d > 0.0)) throw InputError("zero degree at vertex " + std::to_string(v));

    row.clear();
    for (SparseMatrix::InnerIterator it(a, v); it; ++it) {
      const auto u = static_cast<std::size_t>(it.col());
      const double p = psi[v] * (it.value() / d);
      if (p == 0.0) continue;
      const std::size_t col = bpos[u] == kAbsent ? ipos[u] : m + bpos[u];
      row.emplace_back(col, p);
    }
    std::sort(row.begin(), row.end());
    // Division rounding can push the sum a few ulps past 1 when ψ = 1; shave
    // the excess off the largest entry so the absorption mass stays >= 0.
    double s = sum_in_order(row);
    while (s > 1.0 && !row.empty()) {
      auto largest = std::max_element(row.begin(), row.end(),
                                      [](const Entry& x, const Entry& y) { return x.second < y.second; });
      largest->second -= s - 1.0;
      s = sum_in_order(row);
    }
    for (const auto& [col, p] : row) {
      if (col < m) {
        gt.emplace_back(static_cast<int>(i), static_cast<int>(col), p);
      } else {
        ht.emplace_back(static_cast<int>(i), static_cast<int>(col - m), p);
      }
    }
    chain.absorb[i] = 1.0 - s;
  }

  chain.g.resize(static_cast<int>(m), static_cast<int>(m));
  chain.g.setFromTriplets(gt.begin(), gt.end());
  chain.g.makeCompressed();
  chain.h.resize(static_cast<int>(m), static_cast<int>(nb));
  chain.h.setFromTriplets(ht.begin(), ht.end());
  chain.h.makeCompressed();
  return chain;
}

Eigen::MatrixXd AbsorbingChain::dense_transition() const {
  const auto m = static_cast<Eigen::Index>(transient());
  const auto nb = static_cast<Eigen::Index>(boundary.size());
  const Eigen::Index total = m + nb + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(total, total);
  t.block(0, 0, m, m) = dense(g);
  t.block(0, m, m, nb) = dense(h);
  for (Eigen::Index i = 0; i < m; ++i) t(i, total - 1) = absorb[static_cast<std::size_t>(i)];
  for (Eigen::Index k = m; k < total; ++k) t(k, k) = 1.0;
  return t;
}

Eigen::MatrixXd AbsorbingChain::hitting_matrix() const {
  const auto m = static_cast<Eigen::Index>(transient());
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m) - dense(g);
  return system.partialPivLu().solve(dense(h));
}

Eigen::MatrixXd AbsorbingChain::invariant_subspace() const {
  const auto m = static_cast<Eigen::Index>(transient());
  const auto r = static_cast<Eigen::Index>(absorbing());
  Eigen::MatrixXd rhs(m, r);
  rhs.leftCols(r - 1) = dense(h);
  for (Eigen::Index i = 0; i < m; ++i) rhs(i, r - 1) = absorb[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m) - dense(g);
  Eigen::MatrixXd e(m + r, r);
  e.topRows(m) = system.partialPivLu().solve(rhs);
  e.bottomRows(r) = Eigen::MatrixXd::Identity(r, r);
  return e;
}

double AbsorbingChain::row_sum_defect() const {
  double worst = 0.0;
  for (int i = 0; i < g.outerSize(); ++i) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(g, i); it; ++it) s += it.value();
    for (SparseMatrix::InnerIterator it(h, i); it; ++it) s += it.value();
    s += absorb[static_cast<std::size_t>(i)];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;  // absorbing rows are identity rows
}

kernels::WalkTable AbsorbingChain::walk_table() const {
  kernels::WalkTable table;
  const std::size_t m = transient();
  table.transient = m;
  table.absorbing = absorbing();
  table.outer.reserve(m + 1);
  table.outer.push_back(0);
  table.labels.reserve(m);
  const std::size_t nonthreat = m + boundary.size();
  for (std::size_t i = 0; i < m; ++i) {
    double c = 0.0;
    const auto push = [&](std::size_t state, double p) {
      if (p <= 0.0) return;
      c += p;
      table.target.push_back(static_cast<int>(state));
      table.cumulative.push_back(c);
    };
    for (SparseMatrix::InnerIterator it(g, static_cast<int>(i)); it; ++it) {
      push(static_cast<std::size_t>(it.col()), it.value());
    }
    for (SparseMatrix::InnerIterator it(h, static_cast<int>(i)); it; ++it) {
      push(m + static_cast<std::size_t>(it.col()), it.value());
    }
    push(nonthreat, absorb[i]);
    if (table.cumulative.size() == static_cast<std::size_t>(table.outer.back())) {
      throw InputError("transient state without successors");
    }
    table.cumulative.back() = 1.0;
    table.outer.push_back(static_cast<int>(table.cumulative.size()));
    table.labels.push_back(static_cast<std::uint64_t>(interior[i]));
  }
  return table;
}

MonteCarloThreat monte_carlo_threat(const AbsorbingChain& chain, const MonteCarloOptions& options) {
  if (options.walks_per_vertex < 1) throw InputError("walks per vertex must be at least 1");
  const kernels::WalkTable table = chain.walk_table();
  std::vector<double> values(chain.boundary_values);
  values.push_back(0.0);  // non-threat

  const auto est = options.parallel && !kernels::in_parallel_region()
                       ? kernels::random_walks_parallel(table, values, options.walks_per_vertex,
                                                        options.seed, options.step_cap)
                       : kernels::random_walks_serial(table, values, options.walks_per_vertex,
                                                      options.seed, options.step_cap);

  const std::size_t n = chain.interior.size() + chain.boundary.size();
  MonteCarloThreat out;
  out.theta.assign(n, 0.0);
  out.std_error.assign(n, 0.0);
  out.capped = est.capped;
  const auto k = static_cast<double>(options.walks_per_vertex);
  for (std::size_t b = 0; b < chain.boundary.size(); ++b) {
    out.theta[chain.boundary[b]] = chain.boundary_values[b];
  }
  for (std::size_t i = 0; i < chain.interior.size(); ++i) {
    const double mean = est.mean[i];
    const double var = std::max(0.0, est.second_moment[i] - mean * mean);
    out.theta[chain.interior[i]] = mean;
    out.std_error[chain.interior[i]] = std::sqrt(var / k);
  }
  return out;
}

}  // namespace threatnet
