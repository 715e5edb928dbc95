#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace threatnet {

enum class ValidationLevel { fast, full };

ValidationLevel parse_validation_level(std::string_view text);

struct ValidationOptions {
  ValidationLevel level = ValidationLevel::fast;
  std::uint64_t seed = 1;
  /// Fault to inject: "" (none) or "laplacian-sign" (propagation matrix negated).
  std::string fault;
  bool parallel = true;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::string level;
  std::uint64_t seed = 0;
  std::string fault;
  std::vector<CheckResult> checks;

  bool passed() const;
  /// Deterministic for a given level, seed and fault (no timings).
  nlohmann::json to_json() const;
};

/// Names of the checks in execution order.
std::vector<std::string> validation_checks();

/// Runs the invariant suite. Never throws on a failed check; a check that
/// throws is recorded as failed with the exception text.
ValidationReport validate_suite(const ValidationOptions& options = {});

}  // namespace threatnet
