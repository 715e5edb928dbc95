#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace threatnet {

struct DetectionRates {
  double pd = 0.0;
  double pfa = 0.0;
};

/// PD = |detected ∩ foreground| / |foreground|, PFA = |detected ∩ background| / |background|.
/// Throws InputError when either class is empty or lengths differ.
DetectionRates pd_pfa(std::span<const int> detector, std::span<const int> truth);

struct RocPoint {
  double threshold = 0.0;  // declare foreground when score >= threshold
  double pfa = 0.0;
  double pd = 0.0;
  double se = 0.0;         // binomial standard error of pd
};

/// Points ordered by decreasing threshold, from (0,0) to (1,1).
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
  double auc_se = 0.0;          // spread of per-trial AUCs / sqrt(trials); 0 for one trial
  std::size_t trials = 1;
  std::size_t foreground = 0;   // pooled class sizes
  std::size_t background = 0;
  bool degenerate = false;      // constant scores
};

enum class ThresholdMode { all_unique, grid };

/// Sweeps thresholds over the scores. Tied scores share one point.
RocCurve roc(std::span<const double> scores, std::span<const int> truth,
             ThresholdMode mode = ThresholdMode::all_unique, std::size_t grid_points = 101);

/// Trapezoid area under the points.
double trapezoid_auc(std::span<const RocPoint> points);

/// PD of the curve at a false-alarm rate, interpolating linearly between
/// points (randomised detector); the upper point is used on vertical runs.
double pd_at_pfa(const RocCurve& curve, double pfa);
/// Standard error at pfa: binomial sqrt(pd(1-pd)/n_fg) for pooled curves.
double se_at_pfa(const RocCurve& curve, double pfa);

/// Largest vertical gap between the curve points and their upper convex hull.
double convexity_defect(const RocCurve& curve);

struct TrialScores {
  std::vector<double> scores;
  std::vector<int> truth;
};

enum class Aggregation {
  pool,      // one curve over all (score, truth) pairs
  vertical,  // mean PD over trials on a fixed PFA grid
};

Aggregation parse_aggregation(std::string_view text);

/// Aggregates per-trial detector outputs. auc_se always comes from the
/// per-trial AUC spread (trials lacking either class are skipped for it).
RocCurve aggregate(std::span<const TrialScores> trials, Aggregation mode = Aggregation::pool,
                   std::size_t vertical_grid = 201);

/// roc_<detector>.csv: threshold,pfa,pd,se
void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve,
                   std::string_view comment = {});
RocCurve read_roc_csv(const std::filesystem::path& path);

}  // namespace threatnet
