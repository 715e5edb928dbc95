#include "threatnet/laplacian.hpp"

#include "threatnet/error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace threatnet {

namespace {

void require_positive_degrees(const Graph& g) {
  const auto d = g.degrees();
  for (Vertex v = 0; v < g.order(); ++v) {
    if (!(d[v] > 0.0)) throw InputError("zero degree at vertex " + std::to_string(v));
  }
}

SparseMatrix identity_minus(const SparseMatrix& m) {
  SparseMatrix id(m.rows(), m.cols());
  id.setIdentity();
  SparseMatrix out = id - m;
  out.makeCompressed();
  return out;
}

}  // namespace

SparseMatrix transition_matrix(const Graph& g) {
  require_positive_degrees(g);
  SparseMatrix t = g.adjacency();
  const auto d = g.degrees();
  for (int r = 0; r < t.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(t, r); it; ++it) it.valueRef() /= d[r];
  }
  return t;
}

LaplacianView laplacian(const Graph& g, LaplacianKind kind, std::span<const double> psi) {
  LaplacianView view;
  view.kind = kind;
  const auto d = g.degrees();
  switch (kind) {
    case LaplacianKind::kirchhoff: {
      SparseMatrix deg(static_cast<int>(g.order()), static_cast<int>(g.order()));
      std::vector<Eigen::Triplet<double, int>> diag;
      for (Vertex v = 0; v < g.order(); ++v) diag.emplace_back(int(v), int(v), d[v]);
      deg.setFromTriplets(diag.begin(), diag.end());
      view.matrix = deg - g.adjacency();
      break;
    }
    case LaplacianKind::normalized: {
      require_positive_degrees(g);
      SparseMatrix s = g.adjacency();
      for (int r = 0; r < s.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(s, r); it; ++it) {
          it.valueRef() /= std::sqrt(d[r] * d[it.col()]);
        }
      }
      view.matrix = identity_minus(s);
      break;
    }
    case LaplacianKind::generalized:
      view.matrix = identity_minus(transition_matrix(g));
      break;
    case LaplacianKind::generalized_prior: {
      if (psi.size() != g.order()) throw InputError("prior length does not match vertex count");
      SparseMatrix t = transition_matrix(g);
      for (int r = 0; r < t.outerSize(); ++r) {
        if (!(psi[r] > 0.0 && psi[r] <= 1.0)) throw InputError("prior outside (0, 1]");
        for (SparseMatrix::InnerIterator it(t, r); it; ++it) it.valueRef() *= psi[r];
      }
      view.matrix = identity_minus(t);
      break;
    }
  }
  view.matrix.makeCompressed();
  return view;
}

SparseMatrix incidence_matrix(const Graph& g) {
  const auto& edges = g.edges();
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(2 * edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].u == edges[e].v) continue;  // a loop has a zero column
    triplets.emplace_back(int(edges[e].u), int(e), -1.0);
    triplets.emplace_back(int(edges[e].v), int(e), 1.0);
  }
  SparseMatrix b(static_cast<int>(g.order()), static_cast<int>(edges.size()));
  b.setFromTriplets(triplets.begin(), triplets.end());
  return b;
}

}  // namespace threatnet
