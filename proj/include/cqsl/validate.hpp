#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cqsl/channels.hpp"

namespace cqsl {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  /// Worst measured quantity and the limit it was held to. For ordering
  /// checks `measured` is the smallest margin found.
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  std::size_t failures() const;
  void write_json(std::ostream& out) const;
};

/// linalg, states, channels, qsl, oracle, figures.
std::vector<std::string> validation_suites();

/// Runs the named suites (all of them when empty). Throws ParamOutOfRange
/// for an unknown suite name.
ValidationReport run_validation(const std::vector<std::string>& suites = {});

using ProbabilityFn = std::function<double(double, const ADParams&)>;

/// Excited population 1 - p_t from `probability` against RK4 of the
/// time-local amplitude-damping equation, lambda = 2 gamma0 and 0.2 gamma0,
/// t in (0, 3] away from poles of gamma_t. Exposed so a corrupted p_t can be
/// injected.
CheckResult check_ad_probability_vs_rk4(const ProbabilityFn& probability = ad_probability);

/// A ChannelSpec with mu outside [0, 1] must be rejected.
CheckResult check_mu_range_rejected();

} // namespace cqsl
