#include "threatnet/evaluation.hpp"

#include "threatnet/error.hpp"
#include "threatnet/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace threatnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void class_sizes(std::span<const int> truth, std::size_t& fg, std::size_t& bg) {
  fg = 0;
  bg = 0;
  for (int t : truth) {
    if (t == 1) ++fg;
    else if (t == 0) ++bg;
    else throw InputError("truth labels must be 0 or 1");
  }
}

double binomial_se(double pd, std::size_t fg) {
  return fg > 0 ? std::sqrt(std::max(0.0, pd * (1.0 - pd)) / static_cast<double>(fg)) : 0.0;
}

double mean(std::span<const double> x) {
  return x.empty() ? 0.0 : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double standard_error(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1)) / std::sqrt(static_cast<double>(x.size()));
}

double cross(const RocPoint& o, const RocPoint& a, const RocPoint& b) {
  return (a.pfa - o.pfa) * (b.pd - o.pd) - (a.pd - o.pd) * (b.pfa - o.pfa);
}

double parse_any(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) throw InputError("bad number in ROC file: " + s);
  return v;
}

}  // namespace

DetectionRates pd_pfa(std::span<const int> detector, std::span<const int> truth) {
  if (detector.size() != truth.size()) throw InputError("detector and truth lengths differ");
  std::size_t fg = 0;
  std::size_t bg = 0;
  class_sizes(truth, fg, bg);
  if (fg == 0) throw InputError("empty foreground");
  if (bg == 0) throw InputError("empty background");
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (detector[i] == 0) continue;
    if (truth[i] == 1) ++tp;
    else ++fp;
  }
  return {static_cast<double>(tp) / static_cast<double>(fg),
          static_cast<double>(fp) / static_cast<double>(bg)};
}

double trapezoid_auc(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].pfa - points[i - 1].pfa) * (points[i].pd + points[i - 1].pd) * 0.5;
  }
  return area;
}

RocCurve roc(std::span<const double> scores, std::span<const int> truth, ThresholdMode mode,
             std::size_t grid_points) {
  if (scores.size() != truth.size()) throw InputError("score and truth lengths differ");
  std::size_t fg = 0;
  std::size_t bg = 0;
  class_sizes(truth, fg, bg);
  if (fg == 0) throw InputError("empty foreground");
  if (bg == 0) throw InputError("empty background");
  for (double s : scores) {
    if (std::isnan(s)) throw InputError("NaN score");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.foreground = fg;
  curve.background = bg;
  const auto nf = static_cast<double>(fg);
  const auto nb = static_cast<double>(bg);
  const auto push = [&](double threshold, std::size_t tp, std::size_t fp) {
    const double pd = static_cast<double>(tp) / nf;
    curve.points.push_back({threshold, static_cast<double>(fp) / nb, pd, binomial_se(pd, fg)});
  };
  push(kInf, 0, 0);

  const double hi = scores[order.front()];
  const double lo = scores[order.back()];
  curve.degenerate = hi == lo;

  if (mode == ThresholdMode::all_unique || curve.degenerate) {
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t i = 0; i < order.size();) {
      const double s = scores[order[i]];
      while (i < order.size() && scores[order[i]] == s) {
        if (truth[order[i]] == 1) ++tp;
        else ++fp;
        ++i;
      }
      push(s, tp, fp);
    }
  } else {
    if (grid_points < 2) throw InputError("threshold grid needs at least two points");
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t i = 0;
    for (std::size_t g = 0; g < grid_points; ++g) {
      const double t = g + 1 == grid_points
                           ? lo
                           : hi - static_cast<double>(g) * (hi - lo) / static_cast<double>(grid_points - 1);
      while (i < order.size() && scores[order[i]] >= t) {
        if (truth[order[i]] == 1) ++tp;
        else ++fp;
        ++i;
      }
      push(t, tp, fp);
    }
  }
  curve.auc = trapezoid_auc(curve.points);
  return curve;
}

double pd_at_pfa(const RocCurve& curve, double pfa) {
  const auto& p = curve.points;
  if (p.empty()) throw InputError("empty ROC curve");
  std::size_t hi = 0;
  while (hi < p.size() && p[hi].pfa <= pfa) ++hi;
  if (hi == 0) return p.front().pd;
  if (hi == p.size()) return p.back().pd;
  const RocPoint& a = p[hi - 1];
  const RocPoint& b = p[hi];
  const double span = b.pfa - a.pfa;
  if (span <= 0.0) return b.pd;
  return a.pd + (b.pd - a.pd) * (pfa - a.pfa) / span;
}

double se_at_pfa(const RocCurve& curve, double pfa) {
  const auto& p = curve.points;
  std::size_t hi = 0;
  while (hi < p.size() && p[hi].pfa <= pfa) ++hi;
  if (hi == 0) return p.front().se;
  if (hi == p.size()) return p.back().se;
  const RocPoint& a = p[hi - 1];
  const RocPoint& b = p[hi];
  const double span = b.pfa - a.pfa;
  if (span <= 0.0) return b.se;
  return a.se + (b.se - a.se) * (pfa - a.pfa) / span;
}

double convexity_defect(const RocCurve& curve) {
  const auto& p = curve.points;
  if (p.size() < 3) return 0.0;
  // Upper hull by monotone chain over points sorted by (pfa, pd).
  std::vector<RocPoint> sorted(p.begin(), p.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.pfa < b.pfa || (a.pfa == b.pfa && a.pd < b.pd);
  });
  std::vector<RocPoint> hull;
  for (const auto& q : sorted) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), q) >= 0.0) hull.pop_back();
    hull.push_back(q);
  }
  const auto hull_at = [&](double x) {
    const auto j = static_cast<std::size_t>(
        std::upper_bound(hull.begin(), hull.end(), x,
                         [](double v, const RocPoint& r) { return v < r.pfa; }) -
        hull.begin());
    if (j == 0) return hull.front().pd;
    const RocPoint& a = hull[j - 1];
    if (a.pfa == x || j == hull.size()) return a.pd;  // top of a vertical run
    const RocPoint& b = hull[j];
    return a.pd + (b.pd - a.pd) * (x - a.pfa) / (b.pfa - a.pfa);
  };
  // The curve at a given PFA is the top of its vertical run there.
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1].pfa == sorted[i].pfa) continue;
    worst = std::max(worst, hull_at(sorted[i].pfa) - sorted[i].pd);
  }
  return worst;
}

Aggregation parse_aggregation(std::string_view text) {
  if (text == "pool") return Aggregation::pool;
  if (text == "vertical") return Aggregation::vertical;
  throw InputError("unknown aggregation: " + std::string(text));
}

RocCurve aggregate(std::span<const TrialScores> trials, Aggregation mode, std::size_t vertical_grid) {
  if (trials.empty()) throw InputError("no trials to aggregate");
  std::vector<double> aucs;
  std::vector<RocCurve> per_trial;
  for (const auto& t : trials) {
    std::size_t fg = 0;
    std::size_t bg = 0;
    class_sizes(t.truth, fg, bg);
    if (fg == 0 || bg == 0) continue;
    per_trial.push_back(roc(t.scores, t.truth));
    aucs.push_back(per_trial.back().auc);
  }

  RocCurve out;
  if (mode == Aggregation::pool) {
    std::vector<double> scores;
    std::vector<int> truth;
    for (const auto& t : trials) {
      if (t.scores.size() != t.truth.size()) throw InputError("score and truth lengths differ");
      scores.insert(scores.end(), t.scores.begin(), t.scores.end());
      truth.insert(truth.end(), t.truth.begin(), t.truth.end());
    }
    out = roc(scores, truth);
  } else {
    if (per_trial.empty()) throw InputError("no trial has both classes");
    if (vertical_grid < 2) throw InputError("vertical grid needs at least two points");
    out.points.push_back({kInf, 0.0, 0.0, 0.0});
    std::vector<double> pds(per_trial.size());
    for (std::size_t g = 0; g < vertical_grid; ++g) {
      const double x = static_cast<double>(g) / static_cast<double>(vertical_grid - 1);
      for (std::size_t i = 0; i < per_trial.size(); ++i) pds[i] = pd_at_pfa(per_trial[i], x);
      out.points.push_back({std::numeric_limits<double>::quiet_NaN(), x, mean(pds), standard_error(pds)});
    }
    out.auc = trapezoid_auc(out.points);
    for (const auto& c : per_trial) {
      out.foreground += c.foreground;
      out.background += c.background;
    }
  }
  out.trials = trials.size();
  out.auc_se = standard_error(aucs);
  return out;
}

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve, std::string_view comment) {
  auto out = io::open_output(path);
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "threshold,pfa,pd,se\n";
  for (const auto& p : curve.points) {
    out << fmt::format("{},{},{},{}\n", p.threshold, p.pfa, p.pd, p.se);
  }
}

RocCurve read_roc_csv(const std::filesystem::path& path) {
  const auto csv = io::read_csv(path);
  const auto ct = csv.require("threshold");
  const auto cx = csv.require("pfa");
  const auto cy = csv.require("pd");
  const auto cs = csv.column("se");
  RocCurve curve;
  for (const auto& row : csv.rows) {
    RocPoint p;
    p.threshold = parse_any(row[ct]);
    p.pfa = parse_any(row[cx]);
    p.pd = parse_any(row[cy]);
    if (cs) p.se = parse_any(row[*cs]);
    if (!(p.pfa >= 0.0 && p.pfa <= 1.0 && p.pd >= 0.0 && p.pd <= 1.0)) {
      throw InputError(path.string() + ": ROC point outside the unit square");
    }
    curve.points.push_back(p);
  }
  if (curve.points.empty()) throw InputError(path.string() + ": empty ROC curve");
  curve.auc = trapezoid_auc(curve.points);
  return curve;
}

}  // namespace threatnet
