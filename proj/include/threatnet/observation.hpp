#pragma once

#include "threatnet/graph.hpp"

#include <optional>
#include <vector>

namespace threatnet {

/// A cue: vertex (optionally at a time) with posterior threat probability p.
struct Observation {
  Vertex vertex = 0;
  std::optional<double> time;
  double probability = 1.0;
};

/// Likelihoods f(z | Θ=1) and f(z | Θ=0) of one measurement.
struct Likelihood {
  double given_threat = 1.0;
  double given_background = 0.0;
};

/// Bayes posterior P(Θ=1 | z) for a measurement under a custom observation
/// model. The ideal model (Kronecker delta) corresponds to Likelihood{1, 0}
/// and yields 1 for any positive prior.
double posterior_threat(const Likelihood& likelihood, double prior_threat);

class ObservationSet {
 public:
  ObservationSet() = default;
  explicit ObservationSet(std::vector<Observation> entries);

  /// Single untimed cue.
  static ObservationSet single(Vertex v, double p = 1.0);

  const std::vector<Observation>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool timed() const noexcept;

  std::vector<Vertex> vertices() const;
  double max_probability() const;

  /// Checks the spatial contract: nonempty, indices < n, p in [0,1], distinct
  /// vertices. Throws InputError otherwise.
  void validate(std::size_t n) const;

 private:
  std::vector<Observation> entries_;
};

}  // namespace threatnet
