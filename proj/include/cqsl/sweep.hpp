#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cqsl/channels.hpp"
#include "cqsl/qsl.hpp"
#include "cqsl/states.hpp"

namespace cqsl {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class SweepMode { DrivingTime, InitialTime };
enum class OutputFormat { Csv, Json };

std::string_view to_string(SweepMode mode);

struct SweepConfig {
  FamilyParams params = DephasingParams{};
  std::vector<double> mu{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> tau{1.0};
  std::vector<double> tau_d{1.0};
  InitialStateParams initial;
  int quad_steps = kDefaultQuadSteps;
  DerivOptions deriv;
  SweepMode mode = SweepMode::DrivingTime;
  /// Empty for a custom grid.
  std::string preset;
  /// Worker threads; output does not depend on this.
  unsigned threads = 1;

  /// Throws ParamOutOfRange.
  void validate() const;
};

struct SweepRow {
  ChannelFamily family = ChannelFamily::DephasingColored;
  double mu = 0.0;
  double tau = 0.0;
  double tau_d = 0.0;
  QslResult result;
  /// Non-empty when this grid point failed (e.g. quadrature did not converge).
  std::string error;
};

/// n evenly spaced points including both ends (n = 1 gives {start}).
std::vector<double> linspace(double start, double stop, std::size_t n);

std::vector<std::string> preset_names();

/// Figure presets fig1a ... fig3b. `mode` selects the driving-time curve
/// (tau = 1, tau_d in [0.01, 5]) or the inset (tau in [0, 5], tau_d = 1).
/// Throws ParamOutOfRange for unknown names.
SweepConfig preset_config(std::string_view name, SweepMode mode = SweepMode::DrivingTime);

/// One row per (mu, tau, tau_d), in that nesting order.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

void write_csv(std::ostream& out, const SweepConfig& config, const std::vector<SweepRow>& rows);
void write_json(std::ostream& out, const SweepConfig& config, const std::vector<SweepRow>& rows);
void write_rows(std::ostream& out, OutputFormat format, const SweepConfig& config, const std::vector<SweepRow>& rows);

/// "key=value ..." description of the channel parameters, as echoed in CSV metadata.
std::string describe_params(const FamilyParams& params);

} // namespace cqsl
