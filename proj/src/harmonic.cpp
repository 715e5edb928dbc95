#include "threatnet/harmonic.hpp"

#include "threatnet/error.hpp"
#include "threatnet/kernels.hpp"
#include "threatnet/laplacian.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace threatnet {

namespace {

constexpr auto kAbsent = std::numeric_limits<std::size_t>::max();

struct InteriorBlocks {
  std::vector<std::size_t> interior;  // state ids in order
  SparseMatrix g;                     // P restricted to interior
  std::vector<double> rhs;            // P_ib * values
};

InteriorBlocks split(const SparseMatrix& p, std::span<const std::size_t> boundary,
                     std::span<const double> values) {
  const auto n = static_cast<std::size_t>(p.rows());
  std::vector<std::size_t> bpos(n, kAbsent);
  for (std::size_t k = 0; k < boundary.size(); ++k) bpos[boundary[k]] = k;

  InteriorBlocks out;
  std::vector<std::size_t> ipos(n, kAbsent);
  for (std::size_t s = 0; s < n; ++s) {
    if (bpos[s] == kAbsent) {
      ipos[s] = out.interior.size();
      out.interior.push_back(s);
    }
  }
  const std::size_t m = out.interior.size();
  out.rhs.assign(m, 0.0);
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(static_cast<std::size_t>(p.nonZeros()));
  for (std::size_t i = 0; i < m; ++i) {
    const auto row = static_cast<int>(out.interior[i]);
    for (SparseMatrix::InnerIterator it(p, row); it; ++it) {
      const auto col = static_cast<std::size_t>(it.col());
      if (bpos[col] != kAbsent) {
        out.rhs[i] += it.value() * values[bpos[col]];
      } else {
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(ipos[col]), it.value());
      }
    }
  }
  out.g.resize(static_cast<int>(m), static_cast<int>(m));
  out.g.setFromTriplets(triplets.begin(), triplets.end());
  out.g.makeCompressed();
  return out;
}

double residual_inf(const SparseMatrix& g, std::span<const double> rhs,
                    std::span<const double> x, std::vector<double>& scratch) {
  scratch.resize(x.size());
  return kernels::fixed_point_sweep_serial(kernels::view(g), rhs, x, scratch);
}

std::size_t iterate(const SparseMatrix& g, std::span<const double> rhs, std::vector<double>& x,
                    double tol, std::size_t max_iter, bool parallel, double& residual) {
  const auto view = kernels::view(g);
  std::vector<double> next(x.size());
  const bool use_parallel = parallel && !kernels::in_parallel_region();
  residual = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  while (it < max_iter) {
    residual = use_parallel ? kernels::fixed_point_sweep_parallel(view, rhs, x, next)
                            : kernels::fixed_point_sweep_serial(view, rhs, x, next);
    ++it;
    x.swap(next);
    if (residual <= tol) break;
  }
  return it;
}

SparseMatrix identity_minus(const SparseMatrix& g) {
  SparseMatrix id(g.rows(), g.cols());
  id.setIdentity();
  SparseMatrix out = id - g;
  out.makeCompressed();
  return out;
}

}  // namespace

SolveMethod parse_solve_method(std::string_view text) {
  if (text == "iteration" || text == "harmonic") return SolveMethod::iteration;
  if (text == "bicgstab") return SolveMethod::bicgstab;
  if (text == "direct") return SolveMethod::direct;
  throw InputError("unknown solve method: " + std::string(text));
}

ThreatVector solve_boundary_problem(const SparseMatrix& transition,
                                    std::span<const std::size_t> boundary,
                                    std::span<const double> boundary_values,
                                    const SolverOptions& options) {
  const auto n = static_cast<std::size_t>(transition.rows());
  if (boundary.empty()) throw InputError("boundary-value problem without boundary states");
  if (boundary.size() != boundary_values.size()) {
    throw InputError("boundary values do not match boundary states");
  }
  for (std::size_t k = 0; k < boundary.size(); ++k) {
    if (boundary[k] >= n) throw InputError("boundary state out of range");
    if (!(boundary_values[k] >= 0.0 && boundary_values[k] <= 1.0)) {
      throw InputError("boundary value outside [0, 1]");
    }
  }

  const InteriorBlocks blocks = split(transition, boundary, boundary_values);
  const std::size_t m = blocks.interior.size();
  const std::size_t max_iter =
      options.max_iter > 0 ? options.max_iter : std::max<std::size_t>(10 * n, 10000);

  std::vector<double> x(m, 0.0);
  SolveReport report;
  std::vector<double> scratch;

  if (m > 0) {
    switch (options.method) {
      case SolveMethod::iteration:
        report.iterations =
            iterate(blocks.g, blocks.rhs, x, options.tol, max_iter, options.parallel, report.residual);
        break;
      case SolveMethod::bicgstab: {
        const SparseMatrix system = identity_minus(blocks.g);
        const Eigen::Map<const Eigen::VectorXd> b(blocks.rhs.data(), static_cast<Eigen::Index>(m));
        const double bnorm = b.norm();
        if (bnorm > 0.0) {
          Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> solver;
          solver.setMaxIterations(static_cast<Eigen::Index>(max_iter));
          solver.setTolerance(std::clamp(0.1 * options.tol / bnorm,
                                         std::numeric_limits<double>::epsilon(), 1.0));
          solver.compute(system);
          Eigen::VectorXd sol = solver.solve(b);
          if (sol.allFinite()) std::copy(sol.begin(), sol.end(), x.begin());
          report.iterations = static_cast<std::size_t>(solver.iterations());
        }
        report.residual = residual_inf(blocks.g, blocks.rhs, x, scratch);
        if (report.residual > options.tol) {
          // Krylov stagnation: finish with first-step sweeps from the current iterate.
          double res = report.residual;
          report.iterations += iterate(blocks.g, blocks.rhs, x, options.tol, max_iter,
                                       options.parallel, res);
          report.residual = res;
        }
        break;
      }
      case SolveMethod::direct: {
        Eigen::SparseMatrix<double> system = identity_minus(blocks.g);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(system);
        if (lu.info() != Eigen::Success) {
          throw NumericalError("sparse LU factorisation failed (singular system?)",
                               std::numeric_limits<double>::infinity());
        }
        const Eigen::Map<const Eigen::VectorXd> b(blocks.rhs.data(), static_cast<Eigen::Index>(m));
        Eigen::VectorXd sol = lu.solve(b);
        std::copy(sol.begin(), sol.end(), x.begin());
        report.iterations = 1;
        break;
      }
    }
    report.residual = residual_inf(blocks.g, blocks.rhs, x, scratch);
    if (!(report.residual <= options.tol)) {
      throw NumericalError("solver did not converge: residual " + std::to_string(report.residual) +
                               " after " + std::to_string(report.iterations) + " iterations",
                           report.residual);
    }
  }

  ThreatVector out;
  out.theta.assign(n, 0.0);
  for (std::size_t k = 0; k < boundary.size(); ++k) out.theta[boundary[k]] = boundary_values[k];
  for (std::size_t i = 0; i < m; ++i) {
    const double raw = x[i];
    const double clamped = std::clamp(raw, 0.0, 1.0);
    const double moved = std::abs(raw - clamped);
    if (moved > kClampWarn) {
      ++report.clamped;
      report.max_clamp = std::max(report.max_clamp, moved);
    }
    out.theta[blocks.interior[i]] = clamped;
  }
  if (report.clamped > 0) {
    spdlog::warn("clamped {} threat values to [0,1] (max move {:.3g}); system may be ill-conditioned",
                 report.clamped, report.max_clamp);
  }
  out.report = report;
  return out;
}

SparseMatrix propagation_matrix(const Graph& g, std::span<const double> psi) {
  if (psi.size() != g.order()) throw InputError("prior length does not match vertex count");
  SparseMatrix t = transition_matrix(g);
  for (int r = 0; r < t.outerSize(); ++r) {
    if (!(psi[r] > 0.0 && psi[r] <= 1.0)) {
      throw InputError("prior outside (0, 1] at vertex " + std::to_string(r));
    }
    for (SparseMatrix::InnerIterator it(t, r); it; ++it) it.valueRef() *= psi[r];
  }
  return t;
}

HarmonicSystem build_harmonic_system(const Graph& g, std::span<const double> psi,
                                     const ObservationSet& obs) {
  obs.validate(g.order());
  const SparseMatrix lap = laplacian(g, LaplacianKind::generalized_prior, psi).matrix;

  HarmonicSystem sys;
  std::vector<std::size_t> pos(g.order(), kAbsent);
  std::vector<bool> observed(g.order(), false);
  for (const auto& o : obs.entries()) observed[o.vertex] = true;
  for (Vertex v = 0; v < g.order(); ++v) {
    if (!observed[v]) {
      pos[v] = sys.interior.size();
      sys.interior.push_back(v);
    }
  }
  for (const auto& o : obs.entries()) {
    pos[o.vertex] = sys.boundary.size();
    sys.boundary.push_back(o.vertex);
    sys.boundary_values.push_back(o.probability);
  }

  std::vector<Eigen::Triplet<double, int>> ii;
  std::vector<Eigen::Triplet<double, int>> ib;
  for (std::size_t r = 0; r < sys.interior.size(); ++r) {
    for (SparseMatrix::InnerIterator it(lap, static_cast<int>(sys.interior[r])); it; ++it) {
      const auto col = static_cast<Vertex>(it.col());
      auto& target = observed[col] ? ib : ii;
      target.emplace_back(static_cast<int>(r), static_cast<int>(pos[col]), it.value());
    }
  }
  const auto ni = static_cast<int>(sys.interior.size());
  const auto nb = static_cast<int>(sys.boundary.size());
  sys.l_ii.resize(ni, ni);
  sys.l_ii.setFromTriplets(ii.begin(), ii.end());
  sys.l_ib.resize(ni, nb);
  sys.l_ib.setFromTriplets(ib.begin(), ib.end());
  return sys;
}

ThreatVector solve_harmonic(const Graph& g, std::span<const double> psi, const ObservationSet& obs,
                            const SolverOptions& options) {
  obs.validate(g.order());
  if (!is_connected(g)) throw InputError("disconnected graph: threat propagation needs connectivity");
  const SparseMatrix p = propagation_matrix(g, psi);
  std::vector<std::size_t> boundary;
  std::vector<double> values;
  for (const auto& o : obs.entries()) {
    boundary.push_back(o.vertex);
    values.push_back(o.probability);
  }
  return solve_boundary_problem(p, boundary, values, options);
}

}  // namespace threatnet
