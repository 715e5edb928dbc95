#pragma once

#include "threatnet/evaluation.hpp"
#include "threatnet/generators.hpp"
#include "threatnet/harmonic.hpp"
#include "threatnet/priors.hpp"
#include "threatnet/spacetime.hpp"
#include "threatnet/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace threatnet {

inline constexpr int kExperimentSchema = 1;

enum class DetectorType { spatial, sttp, spectral };

struct DetectorConfig {
  std::string name;
  DetectorType type = DetectorType::spatial;
  // spatial
  PriorSpec prior;
  // sttp
  std::size_t bins = 100;
  std::optional<double> rate;  // λ; default ln 2 / median gap
  SpaceTimeVariant variant = SpaceTimeVariant::coordinated;
  TemporalMode mode = TemporalMode::kernel;
  Reducer reducer = Reducer::max;
  // spectral
  SpectralSpec spectral;
  // shared solver settings
  SolverOptions solver;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string generator = "sbm";  // sbm | hmmb
  nlohmann::json generator_params = nlohmann::json::object();
  std::vector<DetectorConfig> detectors;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t cues = 1;
  double cue_probability = 1.0;
  Aggregation aggregation = Aggregation::pool;
  bool restrict_to_lcc = true;
  bool exclude_cues = true;
  std::vector<double> pfa_grid{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  double max_abort_fraction = 0.01;
  nlohmann::json source;  // resolved configuration as JSON
};

/// Parses and validates a configuration document (schema 1). Unknown keys are
/// rejected so typos do not silently fall back to defaults.
ExperimentConfig parse_experiment(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

/// FNV-1a over the canonical (sorted-key) JSON dump.
std::uint64_t config_hash(const nlohmann::json& j);

struct SweepPoint {
  std::string label;
  nlohmann::json value;
  ExperimentConfig config;
};

/// Expands `sweep: {pointer, values}` into one configuration per value.
/// Without a sweep the result holds the configuration itself.
std::vector<SweepPoint> expand_sweep(const nlohmann::json& j);

struct DetectorResult {
  std::string name;
  RocCurve curve;
  double convexity = 0.0;
  std::vector<TrialScores> trials;  // completed trials only, in trial order
};

struct ExperimentResult {
  std::vector<DetectorResult> detectors;
  std::size_t trials = 0;
  std::size_t aborted = 0;
  std::vector<std::string> abort_reasons;  // "trial <i>: <what>"
  std::uint64_t hash = 0;
};

/// One trial: generate, restrict to the largest component, cue a random
/// foreground vertex, score with every detector.
struct TrialOutcome {
  bool ok = true;
  std::string reason;
  std::vector<TrialScores> scores;  // per detector
};

TrialOutcome run_trial(const ExperimentConfig& config, std::size_t trial, bool parallel = false);

/// Runs all trials (in parallel when requested) and aggregates per detector.
/// Throws NumericalError when more than max_abort_fraction of trials abort.
ExperimentResult run_experiment(const ExperimentConfig& config, bool parallel = true);

/// roc_<detector>.csv, summary.json and roc.svg in `dir`.
void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& config,
                      const ExperimentResult& result);

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace threatnet
