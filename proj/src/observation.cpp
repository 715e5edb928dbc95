#include "threatnet/observation.hpp"

#include "threatnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace threatnet {

double posterior_threat(const Likelihood& likelihood, double prior_threat) {
  if (!(prior_threat >= 0.0 && prior_threat <= 1.0)) throw InputError("prior outside [0, 1]");
  if (likelihood.given_threat < 0.0 || likelihood.given_background < 0.0) {
    throw InputError("negative likelihood");
  }
  const double num = likelihood.given_threat * prior_threat;
  const double den = num + likelihood.given_background * (1.0 - prior_threat);
  if (!(den > 0.0)) throw InputError("observation has zero probability under both hypotheses");
  return num / den;
}

ObservationSet::ObservationSet(std::vector<Observation> entries) : entries_(std::move(entries)) {}

ObservationSet ObservationSet::single(Vertex v, double p) {
  return ObservationSet({Observation{v, std::nullopt, p}});
}

bool ObservationSet::timed() const noexcept {
  return std::any_of(entries_.begin(), entries_.end(),
                     [](const Observation& o) { return o.time.has_value(); });
}

std::vector<Vertex> ObservationSet::vertices() const {
  std::vector<Vertex> out;
  out.reserve(entries_.size());
  for (const auto& o : entries_) out.push_back(o.vertex);
  return out;
}

double ObservationSet::max_probability() const {
  double best = 0.0;
  for (const auto& o : entries_) best = std::max(best, o.probability);
  return best;
}

void ObservationSet::validate(std::size_t n) const {
  if (entries_.empty()) throw InputError("observation set is empty");
  std::vector<Vertex> seen;
  for (const auto& o : entries_) {
    if (o.vertex >= n) {
      throw InputError("observed vertex " + std::to_string(o.vertex) + " out of range");
    }
    if (!(o.probability >= 0.0 && o.probability <= 1.0)) {
      throw InputError("observation probability outside [0, 1] at vertex " +
                       std::to_string(o.vertex));
    }
    seen.push_back(o.vertex);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw InputError("duplicate observed vertex");
  }
}

}  // namespace threatnet
