#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace oracle {

Eigen::MatrixXd dense_adjacency(std::size_t n, const std::vector<WeightedEdge>& edges) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& e : edges) {
    a(static_cast<Eigen::Index>(e.u), static_cast<Eigen::Index>(e.v)) += e.w;
    if (e.u != e.v) a(static_cast<Eigen::Index>(e.v), static_cast<Eigen::Index>(e.u)) += e.w;
  }
  return a;
}

Eigen::VectorXd dense_boundary_solve(const Eigen::MatrixXd& p, const std::vector<std::size_t>& boundary,
                                     const std::vector<double>& values) {
  const auto n = static_cast<std::size_t>(p.rows());
  std::vector<int> slot(n, -1);
  for (std::size_t k = 0; k < boundary.size(); ++k) slot[boundary[k]] = static_cast<int>(k);
  std::vector<std::size_t> interior;
  for (std::size_t v = 0; v < n; ++v) {
    if (slot[v] < 0) interior.push_back(v);
  }
  const auto m = static_cast<Eigen::Index>(interior.size());
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto vi = static_cast<Eigen::Index>(interior[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m; ++j) {
      lhs(i, j) -= p(vi, static_cast<Eigen::Index>(interior[static_cast<std::size_t>(j)]));
    }
    for (std::size_t k = 0; k < boundary.size(); ++k) {
      rhs(i) += p(vi, static_cast<Eigen::Index>(boundary[k])) * values[k];
    }
  }
  const Eigen::VectorXd xi = lhs.fullPivLu().solve(rhs);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < boundary.size(); ++k) x(static_cast<Eigen::Index>(boundary[k])) = values[k];
  for (Eigen::Index i = 0; i < m; ++i) x(static_cast<Eigen::Index>(interior[static_cast<std::size_t>(i)])) = xi(i);
  return x;
}

Eigen::VectorXd dense_harmonic(const Eigen::MatrixXd& a, const std::vector<double>& psi,
                               const std::vector<std::size_t>& boundary,
                               const std::vector<double>& values) {
  Eigen::MatrixXd p = a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double d = a.row(i).sum();
    if (d > 0.0) p.row(i) *= psi[static_cast<std::size_t>(i)] / d;
  }
  return dense_boundary_solve(p, boundary, values);
}

std::vector<int> bfs(const Eigen::MatrixXd& a, std::size_t source) {
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<int> dist(n, -1);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v) {
      if (a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) != 0.0 && dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

double mean_path_length(const Eigen::MatrixXd& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  double total = 0.0;
  double pairs = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const auto d = bfs(a, s);
    for (std::size_t t = s + 1; t < n; ++t) {
      if (d[t] < 0) throw std::runtime_error("disconnected");
      total += d[t];
      pairs += 1.0;
    }
  }
  return total / pairs;
}

Eigen::VectorXd kirchhoff_spectrum(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd q = -a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) q(i, i) += a.row(i).sum();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  return es.eigenvalues();
}

RocOracle brute_roc(const std::vector<double>& scores, const std::vector<int>& truth) {
  std::vector<double> levels = scores;
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const double nf = static_cast<double>(std::count(truth.begin(), truth.end(), 1));
  const double nb = static_cast<double>(truth.size()) - nf;
  RocOracle out{{0.0}, {0.0}};
  for (double t : levels) {
    double tp = 0.0;
    double fp = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= t) (truth[i] == 1 ? tp : fp) += 1.0;
    }
    out.pfa.push_back(fp / nb);
    out.pd.push_back(tp / nf);
  }
  return out;
}

double mann_whitney_auc(const std::vector<double>& scores, const std::vector<int>& truth) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (truth[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

double brute_convexity_defect(const std::vector<double>& pfa, const std::vector<double>& pd) {
  const std::size_t n = pfa.size();
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    // The curve value at pfa[k] is the largest pd observed there.
    double here = pd[k];
    for (std::size_t m = 0; m < n; ++m) {
      if (pfa[m] == pfa[k]) here = std::max(here, pd[m]);
    }
    double envelope = here;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!(pfa[i] <= pfa[k] && pfa[k] <= pfa[j])) continue;
        const double value = pfa[i] == pfa[j]
                                 ? std::max(pd[i], pd[j])
                                 : pd[i] + (pd[j] - pd[i]) * (pfa[k] - pfa[i]) / (pfa[j] - pfa[i]);
        envelope = std::max(envelope, value);
      }
    }
    worst = std::max(worst, envelope - here);
  }
  return worst;
}

double power_law_mle(const std::vector<double>& values, double xmin) {
  double sum = 0.0;
  double count = 0.0;
  for (double x : values) {
    if (x < xmin) continue;
    sum += std::log(x / (xmin - 0.5));
    count += 1.0;
  }
  return 1.0 + count / sum;
}

}  // namespace oracle
