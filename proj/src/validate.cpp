#include "threatnet/validate.hpp"

#include "threatnet/absorbing_chain.hpp"
#include "threatnet/error.hpp"
#include "threatnet/evaluation.hpp"
#include "threatnet/generators.hpp"
#include "threatnet/harmonic.hpp"
#include "threatnet/kernels.hpp"
#include "threatnet/laplacian.hpp"
#include "threatnet/priors.hpp"
#include "threatnet/rng.hpp"
#include "threatnet/spacetime.hpp"
#include "threatnet/spectral.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>

namespace threatnet {

namespace {

struct Context {
  ValidationLevel level;
  std::uint64_t seed;
  bool fault_sign;
  bool parallel;

  bool full() const { return level == ValidationLevel::full; }
  Xoshiro256 rng(std::uint64_t check, std::uint64_t item = 0) const {
    return stream(seed, Stream::validation, check, item);
  }
};

/// Thrown by a check to fail with a message.
struct CheckFailed {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw CheckFailed{what};
}

std::size_t uniform_int(Xoshiro256& re, std::size_t lo, std::size_t hi) {
  const auto span = hi - lo + 1;
  return lo + std::min(static_cast<std::size_t>(re.uniform() * static_cast<double>(span)), span - 1);
}

/// Random connected G(n, p) with n in [lo, hi].
Graph random_graph(Xoshiro256& re, std::size_t lo, std::size_t hi) {
  const std::size_t n = uniform_int(re, lo, hi);
  const double p = std::min(1.0, (1.5 + 2.0 * re.uniform()) * std::log(static_cast<double>(n)) / n);
  return erdos_renyi(n, p, re());
}

std::vector<Vertex> random_subset(Xoshiro256& re, std::size_t n, std::size_t k) {
  std::vector<Vertex> all(n);
  std::iota(all.begin(), all.end(), Vertex{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[uniform_int(re, i, n - 1)]);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

/// Two-sided normal quantile: z with P(|Z| > z) = alpha.
double two_sided_z(double alpha) {
  double lo = 0.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > alpha) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Per-comparison threshold keeping the family-wise rate of a 3σ test.
double family_z(std::size_t comparisons) {
  const double alpha = std::erfc(3.0 / std::sqrt(2.0));
  const double per = -std::expm1(std::log1p(-alpha) / static_cast<double>(comparisons));
  return two_sided_z(per);
}

SparseMatrix transition_for(const Context& ctx, const Graph& g, std::span<const double> psi) {
  SparseMatrix p = propagation_matrix(g, psi);
  if (ctx.fault_sign) p = -p;
  return p;
}

// ---------------------------------------------------------------------------

std::string check_laplacian_kernel(const Context& ctx) {
  auto re = ctx.rng(1);
  const std::size_t graphs = ctx.full() ? 100 : 20;
  double worst = 0.0;
  for (std::size_t i = 0; i < graphs; ++i) {
    const Graph g = random_graph(re, 5, 60);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.order()));
    for (auto kind : {LaplacianKind::kirchhoff, LaplacianKind::generalized}) {
      Eigen::VectorXd r = laplacian(g, kind).matrix * ones;
      if (ctx.fault_sign && kind == LaplacianKind::generalized) {
        r = ones + transition_matrix(g) * ones;  // I + D^{-1}A
      }
      worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
    }
    const SparseMatrix a = g.adjacency();
    require((SparseMatrix(a.transpose()) - a).norm() == 0.0, "undirected adjacency is not symmetric");
  }
  require(worst <= 1e-12, fmt::format("max |L 1| = {:.3e}", worst));
  return fmt::format("{} graphs, max |L 1| = {:.3e}", graphs, worst);
}

std::string check_maximum_principle(const Context& ctx) {
  auto re = ctx.rng(2);
  const std::size_t cases = 200;
  for (std::size_t c = 0; c < cases; ++c) {
    const Graph g = random_graph(re, 4, 30);
    const std::size_t nb = uniform_int(re, 1, std::min<std::size_t>(3, g.order() - 1));
    std::vector<Observation> entries;
    for (Vertex v : random_subset(re, g.order(), nb)) entries.push_back({v, std::nullopt, re.uniform()});
    const ObservationSet obs(entries);
    PriorSpec spec;
    switch (uniform_int(re, 0, 3)) {
      case 0: spec.kind = PriorKind::dwtp; break;
      case 1: spec.kind = PriorKind::lwtp; break;
      case 2: spec.kind = PriorKind::bfs; break;
      default: spec.kind = PriorKind::uniform; spec.uniform_value = 0.05 + 0.95 * re.uniform();
    }
    const auto psi = compute_prior(g, spec, obs).psi;
    std::vector<std::size_t> boundary;
    std::vector<double> values;
    for (const auto& o : obs.entries()) {
      boundary.push_back(o.vertex);
      values.push_back(o.probability);
    }
    SolverOptions opts;
    opts.tol = 1e-12;
    opts.parallel = ctx.parallel;
    const ThreatVector t = solve_boundary_problem(transition_for(ctx, g, psi), boundary, values, opts);
    const double top = obs.max_probability();
    require(t.report.max_clamp <= 1e-8,
            fmt::format("case {}: solution left [0,1] by {:.3e} before clamping", c, t.report.max_clamp));
    const auto arg = static_cast<Vertex>(std::max_element(t.theta.begin(), t.theta.end()) - t.theta.begin());
    for (std::size_t v = 0; v < t.theta.size(); ++v) {
      require(t.theta[v] >= -1e-8 && t.theta[v] <= top + 1e-8,
              fmt::format("case {}: theta[{}] = {} outside [0, {}]", c, v, t.theta[v], top));
    }
    const bool at_cue = std::any_of(entries.begin(), entries.end(), [&](const Observation& o) {
      return o.vertex == arg || o.probability >= t.theta[arg] - 1e-8;
    });
    require(at_cue, fmt::format("case {}: maximum not attained at an observed vertex", c));
  }
  return fmt::format("{} random (graph, prior, boundary) cases", cases);
}

std::string check_hitting_equivalence(const Context& ctx) {
  auto re = ctx.rng(3);
  const std::size_t graphs = 10;
  const std::size_t n = ctx.full() ? 100 : 20;
  const double p = ctx.full() ? 0.1 : 0.3;
  const std::size_t walks = ctx.full() ? 100000 : 4000;
  const double z = family_z(graphs * (n - 1));
  double exact_gap = 0.0;
  double worst_z = 0.0;
  std::size_t beyond_3 = 0;
  for (std::size_t i = 0; i < graphs; ++i) {
    const Graph g = erdos_renyi(n, p, re());
    const ObservationSet obs = ObservationSet::single(uniform_int(re, 0, n - 1), 1.0);
    const auto psi = compute_prior(g, {PriorKind::dwtp}, obs).psi;
    SolverOptions opts;
    opts.tol = 1e-12;
    opts.parallel = ctx.parallel;
    const auto theta = solve_boundary_problem(transition_for(ctx, g, psi), obs.vertices(),
                                              std::vector<double>{1.0}, opts).theta;
    const AbsorbingChain chain = build_absorbing_chain(g, psi, obs);
    const Eigen::VectorXd u = chain.hitting_matrix().col(0);
    MonteCarloOptions mc;
    mc.walks_per_vertex = walks;
    mc.seed = re();
    mc.parallel = ctx.parallel;
    const auto est = monte_carlo_threat(chain, mc);
    for (std::size_t k = 0; k < chain.interior.size(); ++k) {
      const Vertex v = chain.interior[k];
      exact_gap = std::max(exact_gap, std::abs(theta[v] - u[static_cast<Eigen::Index>(k)]));
      const double exact = u[static_cast<Eigen::Index>(k)];
      const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(walks));
      const double diff = std::abs(est.theta[v] - exact);
      if (sigma == 0.0) {
        require(diff == 0.0, fmt::format("graph {}: deterministic vertex {} estimated {}", i, v, est.theta[v]));
        continue;
      }
      worst_z = std::max(worst_z, diff / sigma);
      if (diff > 3.0 * sigma) ++beyond_3;
    }
  }
  require(exact_gap <= 1e-8, fmt::format("harmonic vs hitting matrix gap {:.3e}", exact_gap));
  require(worst_z <= z, fmt::format("Monte Carlo |z| = {:.2f} exceeds family threshold {:.2f}", worst_z, z));
  return fmt::format("n={}, {} walks/vertex: exact gap {:.2e}, max |z| {:.2f} (family threshold {:.2f}, {} beyond 3)",
                     n, walks, exact_gap, worst_z, z, beyond_3);
}

std::string check_perron_frobenius(const Context& ctx) {
  auto re = ctx.rng(4);
  const std::size_t chains = 100;
  double worst = 0.0;
  for (std::size_t c = 0; c < chains; ++c) {
    const Graph g = random_graph(re, 3, 30);
    const std::size_t nb = uniform_int(re, 1, std::min<std::size_t>(4, g.order() - 1));
    std::vector<Observation> entries;
    for (Vertex v : random_subset(re, g.order(), nb)) entries.push_back({v, std::nullopt, 1.0});
    const ObservationSet obs(entries);
    std::vector<double> psi(g.order());
    for (auto& x : psi) x = 0.05 + 0.95 * re.uniform();
    const AbsorbingChain chain = build_absorbing_chain(g, psi, obs);
    require(chain.row_sum_defect() == 0.0, fmt::format("chain {}: rows of T do not sum to 1", c));
    const Eigen::MatrixXd t = chain.dense_transition();
    const Eigen::MatrixXd e = chain.invariant_subspace();
    worst = std::max(worst, (t * e - e).lpNorm<Eigen::Infinity>());
    const auto rank = Eigen::FullPivLU<Eigen::MatrixXd>(e).rank();
    require(static_cast<std::size_t>(rank) == chain.absorbing(),
            fmt::format("chain {}: rank(E) = {} but r = {}", c, rank, chain.absorbing()));
  }
  require(worst <= 1e-12, fmt::format("max |T E - E| = {:.3e}", worst));
  return fmt::format("{} chains, max |T E - E| = {:.3e}", chains, worst);
}

std::string check_degenerate_constant(const Context& ctx) {
  auto re = ctx.rng(5);
  double worst = 0.0;
  for (std::size_t c = 0; c < 10; ++c) {
    const Graph g = random_graph(re, 5, 40);
    const double p0 = 0.1 + 0.8 * re.uniform();
    const std::size_t nb = uniform_int(re, 1, 3);
    std::vector<std::size_t> boundary = random_subset(re, g.order(), std::min(nb, g.order() - 1));
    const std::vector<double> values(boundary.size(), p0);
    const std::vector<double> ones(g.order(), 1.0);
    SolverOptions opts;
    opts.tol = 1e-12;
    opts.parallel = ctx.parallel;
    const auto theta = solve_boundary_problem(transition_for(ctx, g, ones), boundary, values, opts).theta;
    for (double x : theta) worst = std::max(worst, std::abs(x - p0));
  }
  require(worst <= 1e-8, fmt::format("spatial: max |theta - p0| = {:.3e}", worst));

  // Space-time: Ψ = I on a grid whose kernel columns reach every bin.
  double worst_st = 0.0;
  for (std::size_t c = 0; c < 5; ++c) {
    const Graph base = random_graph(re, 5, 25);
    std::vector<EdgeRecord> rows;
    for (const Edge& e : base.edges()) {
      const double t = re.uniform();
      rows.push_back({e.u, e.v, 1.0, t, t});
    }
    const Graph g = build_graph(base.order(), rows);
    const TimeGrid grid{0.0, 0.25, 4};
    const std::vector<double> rate{0.5};
    SpaceTimeOptions so;
    so.parallel = ctx.parallel;
    const SpaceTimeSystem sys = assemble_spacetime(g, grid, rate, so);
    const double p0 = 0.1 + 0.8 * re.uniform();
    const ObservationSet obs = ObservationSet::single(uniform_int(re, 0, g.order() - 1), p0);
    SpaceTimeSolveOptions opts;
    opts.variant = SpaceTimeVariant::weighted;
    opts.solver.tol = 1e-12;
    opts.solver.parallel = ctx.parallel;
    SparseMatrix p = spacetime_transition(sys, opts);
    if (ctx.fault_sign) p = -p;
    std::vector<std::size_t> states;
    std::vector<double> values;
    spacetime_boundary(sys, obs, states, values);
    const auto theta = solve_boundary_problem(p, states, values, opts.solver).theta;
    for (double x : theta) worst_st = std::max(worst_st, std::abs(x - p0));
  }
  require(worst_st <= 1e-8, fmt::format("space-time: max |theta - p0| = {:.3e}", worst_st));
  return fmt::format("spatial {:.2e}, space-time {:.2e}", worst, worst_st);
}

std::string check_path_closed_form(const Context& ctx) {
  const std::vector<EdgeRecord> rows{{0, 1, 1.0, {}, {}}, {1, 2, 1.0, {}, {}}};
  const Graph g = build_graph(3, rows);
  const ObservationSet obs = ObservationSet::single(2, 1.0);
  const auto psi = compute_prior(g, {PriorKind::dwtp}, obs).psi;
  SolverOptions opts;
  opts.tol = 1e-14;
  opts.parallel = ctx.parallel;
  const auto theta = solve_boundary_problem(transition_for(ctx, g, psi), obs.vertices(),
                                            std::vector<double>{1.0}, opts).theta;
  const double gap = std::max({std::abs(theta[0] - 1.0 / 3.0), std::abs(theta[1] - 1.0 / 3.0),
                               std::abs(theta[2] - 1.0)});
  require(gap <= 1e-10, fmt::format("path graph theta = ({}, {}, {})", theta[0], theta[1], theta[2]));
  return fmt::format("gap {:.2e}", gap);
}

std::string check_kernel_identities(const Context& ctx) {
  auto re = ctx.rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double rate = 0.01 + 10.0 * re.uniform();
    const double a = 5.0 * re.uniform();
    const double b = a + 5.0 * re.uniform();
    require(temporal_kernel(rate, 0.0) == 1.0, "K(0) != 1");
    require(temporal_kernel(rate, -a) == temporal_kernel(rate, a), "K(-t) != K(t)");
    require(temporal_kernel(rate, b) <= temporal_kernel(rate, a), "K not monotone in |t|");
    require(temporal_kernel(rate, a) > 0.0 && temporal_kernel(rate, a) <= 1.0, "K outside (0,1]");
  }
  // Vertex 0 interacts at lag 0 and lag 1/λ from bin 0.
  const double rate = 2.0;
  const std::vector<EdgeRecord> rows{{0, 1, 1.0, 0.05, 0.05}, {0, 2, 1.0, 0.55, 0.55}};
  const Graph g = build_graph(3, rows);
  SpaceTimeOptions so;
  so.parallel = ctx.parallel;
  so.truncation = 0.0;
  const SpaceTimeSystem sys = assemble_spacetime(g, TimeGrid{0.0, 0.1, 6}, std::vector<double>{rate}, so);
  const auto prior = coordination_prior(sys);
  const double expected = (1.0 + std::exp(-1.0)) / 2.0;
  const double got = prior.psi[sys.index(0, 0)];
  require(std::abs(got - expected) <= 1e-12, fmt::format("coordination prior {} vs {}", got, expected));
  return fmt::format("kernel identities on 1000 draws; psi = {:.6f}", got);
}

std::string check_spacetime_equivalence(const Context& ctx) {
  auto re = ctx.rng(8);
  double worst = 0.0;
  const std::size_t graphs = ctx.full() ? 20 : 5;
  for (std::size_t c = 0; c < graphs; ++c) {
    const Graph base = random_graph(re, 5, 40);
    std::vector<EdgeRecord> rows;
    for (const Edge& e : base.edges()) rows.push_back({e.u, e.v, 1.0, re.uniform(), re.uniform()});
    const Graph g = build_graph(base.order(), rows);
    const ObservationSet obs = ObservationSet::single(uniform_int(re, 0, g.order() - 1), 1.0);
    const auto psi = compute_prior(g, {PriorKind::dwtp}, obs).psi;
    SolverOptions opts;
    opts.tol = 1e-13;
    opts.parallel = ctx.parallel;
    const auto spatial = solve_harmonic(g, psi, obs, opts).theta;

    SpaceTimeOptions so;
    so.default_mode = TemporalMode::clique;
    so.parallel = ctx.parallel;
    const SpaceTimeSystem sys = assemble_spacetime(g, TimeGrid{0.0, 1.0, 1}, std::vector<double>{1.0}, so);
    SpaceTimeSolveOptions st;
    st.variant = SpaceTimeVariant::weighted;
    st.psi = psi;
    st.solver = opts;
    SparseMatrix p = spacetime_transition(sys, st);
    if (ctx.fault_sign) p = -p;
    std::vector<std::size_t> states;
    std::vector<double> values;
    spacetime_boundary(sys, obs, states, values);
    const auto theta = solve_boundary_problem(p, states, values, opts).theta;
    for (std::size_t v = 0; v < g.order(); ++v) worst = std::max(worst, std::abs(theta[v] - spatial[v]));
  }
  require(worst <= 1e-10, fmt::format("space-time vs spatial gap {:.3e}", worst));
  return fmt::format("{} graphs, gap {:.2e}", graphs, worst);
}

bool same_points(const RocCurve& a, const RocCurve& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (a.points[i].pfa != b.points[i].pfa || a.points[i].pd != b.points[i].pd) return false;
  }
  return true;
}

std::string check_roc_properties(const Context& ctx) {
  auto re = ctx.rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 200;
    std::vector<double> s(n);
    std::vector<int> truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = re.uniform() < 0.3 ? 1 : 0;
      // Coarse levels in [0, 0.98] so ties occur; foreground shifted upward.
      s[i] = std::floor((0.8 * re.uniform() + 0.2 * truth[i]) * 50.0) / 51.0;
    }
    truth[0] = 1;
    truth[1] = 0;
    const RocCurve base = roc(s, truth);
    std::vector<double> odds(n);
    std::vector<double> expo(n);
    for (std::size_t i = 0; i < n; ++i) {
      odds[i] = s[i] / (1.0 - s[i]);
      expo[i] = std::exp(3.0 * s[i]) - 7.0;
    }
    require(same_points(base, roc(odds, truth)), "ROC changed under theta/(1-theta)");
    require(same_points(base, roc(expo, truth)), "ROC changed under an increasing transform");
    for (std::size_t i = 1; i < base.points.size(); ++i) {
      require(base.points[i].pfa >= base.points[i - 1].pfa && base.points[i].pd >= base.points[i - 1].pd,
              "ROC not monotone");
    }
    require(base.points.front().pfa == 0.0 && base.points.front().pd == 0.0, "ROC does not start at (0,0)");
    require(base.points.back().pfa == 1.0 && base.points.back().pd == 1.0, "ROC does not end at (1,1)");
    require(base.auc >= 0.0 && base.auc <= 1.0, "AUC outside [0,1]");
  }
  // Chance detector.
  const std::size_t n = 10000;
  std::vector<double> s(n);
  std::vector<int> truth(n);
  std::size_t fg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = re.uniform();
    truth[i] = re.uniform() < 0.5 ? 1 : 0;
    fg += static_cast<std::size_t>(truth[i]);
  }
  const double auc = roc(s, truth).auc;
  const double nf = static_cast<double>(fg);
  const double nb = static_cast<double>(n - fg);
  const double sigma = std::sqrt((nf + nb + 1.0) / (12.0 * nf * nb));  // Mann-Whitney null
  require(std::abs(auc - 0.5) <= 3.0 * sigma, fmt::format("chance AUC {:.4f} (sigma {:.4f})", auc, sigma));
  return fmt::format("transform invariance on 20 draws; chance AUC {:.4f}", auc);
}

std::string check_fiedler(const Context& ctx) {
  auto re = ctx.rng(10);
  const std::size_t graphs = ctx.full() ? 100 : 20;
  for (std::size_t c = 0; c < graphs; ++c) {
    const Graph g = random_graph(re, 4, 50);
    const FiedlerResult f = fiedler(g);
    require(f.connected, fmt::format("graph {}: connected graph flagged disconnected", c));
    const double n = static_cast<double>(g.order());
    const double dmin = *std::min_element(g.degrees().begin(), g.degrees().end());
    const double lower = 4.0 / (n * diameter(g));
    const double upper = n / (n - 1.0) * dmin;
    require(f.value >= lower - 1e-9 && f.value <= upper + 1e-9,
            fmt::format("graph {}: lambda1 = {} outside [{}, {}]", c, f.value, lower, upper));
    std::vector<double> cuts{0.0};
    for (Eigen::Index i = 0; i < f.vector.size(); ++i) {
      if (f.vector[i] <= 0.0) cuts.push_back(f.vector[i]);
    }
    for (double cut : cuts) {
      std::vector<Vertex> keep;
      for (Eigen::Index i = 0; i < f.vector.size(); ++i) {
        if (f.vector[i] >= cut - 1e-9) keep.push_back(static_cast<Vertex>(i));
      }
      if (keep.empty()) continue;
      require(is_connected(induced_subgraph(g, keep)),
              fmt::format("graph {}: threshold {} gives a disconnected set", c, cut));
    }
  }
  return fmt::format("{} graphs", graphs);
}

std::string check_serial_parallel(const Context& ctx) {
  auto re = ctx.rng(11);
  const Graph g = erdos_renyi(300, 0.03, re());
  const ObservationSet obs = ObservationSet::single(0, 1.0);
  const auto psi = compute_prior(g, {PriorKind::dwtp}, obs).psi;
  const SparseMatrix p = propagation_matrix(g, psi);
  std::vector<double> x(g.order());
  std::vector<double> b(g.order());
  for (auto& v : x) v = re.uniform();
  for (auto& v : b) v = re.uniform();
  std::vector<double> y1(g.order());
  std::vector<double> y2(g.order());
  const double r1 = kernels::fixed_point_sweep_serial(kernels::view(p), b, x, y1);
  const double r2 = kernels::fixed_point_sweep_parallel(kernels::view(p), b, x, y2);
  require(r1 == r2 && y1 == y2, "fixed-point sweep differs between serial and parallel");

  const auto table = build_absorbing_chain(g, psi, obs).walk_table();
  const std::vector<double> values{1.0, 0.0};
  const auto w1 = kernels::random_walks_serial(table, values, 50, 7, 1000000);
  const auto w2 = kernels::random_walks_parallel(table, values, 50, 7, 1000000);
  require(w1.mean == w2.mean && w1.second_moment == w2.second_moment && w1.capped == w2.capped,
          "random walks differ between serial and parallel");

  const auto s1 = kernels::path_length_sums_serial(kernels::view(g.adjacency()));
  const auto s2 = kernels::path_length_sums_parallel(kernels::view(g.adjacency()));
  require(s1.total == s2.total && s1.pairs == s2.pairs, "path-length sums differ");

  const auto n1 = generate_sbm(sbm_reference(2.0), 5, false);
  const auto n2 = generate_sbm(sbm_reference(2.0), 5, true);
  require(n1.graph.links().size() == n2.graph.links().size(), "SBM differs between serial and parallel");
  for (std::size_t i = 0; i < n1.graph.links().size(); ++i) {
    const Link& a = n1.graph.links()[i];
    const Link& c = n2.graph.links()[i];
    require(a.u == c.u && a.v == c.v && a.weight == c.weight && a.times == c.times,
            "SBM differs between serial and parallel");
  }
  if (ctx.full()) {
    const auto h1 = generate_hmmb(hmmb_reference(1.0), 5, false);
    const auto h2 = generate_hmmb(hmmb_reference(1.0), 5, true);
    require(h1.graph.links().size() == h2.graph.links().size(), "HMMB differs between serial and parallel");
    for (std::size_t i = 0; i < h1.graph.links().size(); ++i) {
      require(h1.graph.links()[i].times == h2.graph.links()[i].times, "HMMB differs between serial and parallel");
    }
  }

  SpaceTimeOptions serial;
  serial.parallel = false;
  SpaceTimeOptions parallel;
  const double rate = default_rate(n1.graph);
  const TimeGrid grid = default_grid(n1.graph, rate);
  const auto a1 = assemble_spacetime(n1.graph, grid, std::vector<double>{rate}, serial).adjacency;
  const auto a2 = assemble_spacetime(n1.graph, grid, std::vector<double>{rate}, parallel).adjacency;
  require(a1.nonZeros() == a2.nonZeros() && (a1 - a2).norm() == 0.0,
          "space-time assembly differs between serial and parallel");
  return "sweep, walks, path sums, generators and assembly match bitwise";
}

struct Entry {
  const char* name;
  std::string (*run)(const Context&);
};

constexpr Entry kChecks[] = {
    {"laplacian_kernel", check_laplacian_kernel},
    {"maximum_principle", check_maximum_principle},
    {"hitting_equivalence", check_hitting_equivalence},
    {"perron_frobenius", check_perron_frobenius},
    {"degenerate_constant", check_degenerate_constant},
    {"path_closed_form", check_path_closed_form},
    {"kernel_identities", check_kernel_identities},
    {"spacetime_spatial_equivalence", check_spacetime_equivalence},
    {"roc_properties", check_roc_properties},
    {"fiedler", check_fiedler},
    {"serial_parallel", check_serial_parallel},
};

}  // namespace

ValidationLevel parse_validation_level(std::string_view text) {
  if (text == "fast") return ValidationLevel::fast;
  if (text == "full") return ValidationLevel::full;
  throw InputError("unknown validation level: " + std::string(text));
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  std::vector<std::string> failed;
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    if (!c.passed) failed.push_back(c.name);
  }
  return {{"level", level}, {"seed", seed},       {"fault", fault},
          {"passed", passed()}, {"failed", failed}, {"checks", list}};
}

std::vector<std::string> validation_checks() {
  std::vector<std::string> names;
  for (const auto& c : kChecks) names.emplace_back(c.name);
  return names;
}

ValidationReport validate_suite(const ValidationOptions& options) {
  if (!options.fault.empty() && options.fault != "laplacian-sign") {
    throw InputError("unknown fault: " + options.fault);
  }
  const Context ctx{options.level, options.seed, options.fault == "laplacian-sign", options.parallel};
  ValidationReport report;
  report.level = options.level == ValidationLevel::full ? "full" : "fast";
  report.seed = options.seed;
  report.fault = options.fault;
  for (const auto& check : kChecks) {
    CheckResult r{check.name, false, {}};
    const auto start = std::chrono::steady_clock::now();
    try {
      r.detail = check.run(ctx);
      r.passed = true;
    } catch (const CheckFailed& f) {
      r.detail = f.what;
    } catch (const std::exception& e) {
      r.detail = std::string("error: ") + e.what();
    }
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    spdlog::info("{:<30} {} ({:.2f} s) {}", r.name, r.passed ? "pass" : "FAIL", took.count(), r.detail);
    report.checks.push_back(std::move(r));
  }
  return report;
}

}  // namespace threatnet
