#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "cqsl/linalg.hpp"
#include "cqsl/states.hpp"

namespace cqsl {

enum class ChannelFamily { DephasingColored, AmplitudeDamping, SGAD };

std::string_view to_string(ChannelFamily family);

/// Random-telegraph dephasing. The kernel uses the auxiliary frequency
/// w = sqrt((4 nu)^2 - 1), which is imaginary in the Markovian regime.
struct DephasingParams {
  double nu = 1.0;

  bool non_markovian() const noexcept { return nu >= 0.25; }
  cplx w() const;
};

/// Zero-temperature amplitude damping with a Lorentzian spectral density of
/// width lambda and coupling gamma0.
struct ADParams {
  double lambda = 2.0;
  double gamma0 = 1.0;

  /// d = sqrt(lambda^2 - 2 gamma0 lambda), complex.
  cplx d() const;
  bool non_markovian() const noexcept { return lambda < 2.0 * gamma0; }
};

/// Squeezed generalized amplitude damping: thermal photon number n,
/// squeezing m, dissipation rate omega. Requires m < n + 1/2.
struct SGADParams {
  double n = 1.0;
  double m = 0.0;
  double omega = 1.0;
};

using FamilyParams = std::variant<DephasingParams, ADParams, SGADParams>;

ChannelFamily family_of(const FamilyParams& params);

/// Throws ParamOutOfRange when the parameter record violates its invariants.
void validate_params(const FamilyParams& params);

/// A channel family with its parameters and correlation strength mu in [0,1].
struct ChannelSpec {
  FamilyParams params;
  double mu = 0.0;

  ChannelFamily family() const { return family_of(params); }
  /// Throws ParamOutOfRange.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Time-dependent scalars
// ---------------------------------------------------------------------------

struct DephasingKernel {
  double lambda = 1.0;       // memory kernel Lambda(t)
  double z = 0.0;            // flip probability (1 - Lambda)/2
  double lambda_rate = 0.0;  // dLambda/dt
  double z_rate = 0.0;       // dz/dt
};

DephasingKernel dephasing_kernel(double t, const DephasingParams& params);

/// Signed excited-state amplitude a(t) = e^{-lambda t/2}[cosh(dt/2) + (lambda/d) sinh(dt/2)]
/// and its derivative. 1 - p_t = a^2.
struct ADAmplitude {
  double amplitude = 1.0;
  double amplitude_rate = 0.0;
};

ADAmplitude ad_amplitude(double t, const ADParams& params);

/// Decay probability p_t in [0, 1].
double ad_probability(double t, const ADParams& params);
double ad_probability_rate(double t, const ADParams& params);

/// Time-dependent decay rate gamma_t. Throws PoleEncountered when the rate
/// diverges (non-Markovian regime, a(t) = 0).
double ad_rate(double t, const ADParams& params);

struct SGADScalars {
  double p = 1.0;  // e^{-omega (n + 1/2) t}
  double q = 1.0;  // cosh(omega m t)
  double r = 0.0;  // sinh(omega m t)
  double u = 1.0;  // e^{-omega n t}
  double s = 1.0;  // e^{-omega (n + 1) t}
};

SGADScalars sgad_scalars(double t, const SGADParams& params);
/// Component-wise time derivatives of sgad_scalars.
SGADScalars sgad_scalar_rates(double t, const SGADParams& params);

// ---------------------------------------------------------------------------
// Kraus sets
// ---------------------------------------------------------------------------

struct KrausSet {
  static constexpr double kValidDefect = 1e-9;

  std::vector<ComplexMatrix> operators;

  /// ||sum E^dagger E - I||_F.
  double defect() const;
  bool valid() const { return defect() <= kValidDefect; }
};

double kraus_defect(const KrausSet& ks);

KrausSet dephasing_single_kraus(double t, const DephasingParams& params);
KrausSet dephasing_uncorrelated_kraus(double t, const DephasingParams& params);
KrausSet dephasing_correlated_kraus(double t, const DephasingParams& params);

KrausSet ad_single_kraus(double t, const ADParams& params);
KrausSet ad_uncorrelated_kraus(double t, const ADParams& params);
KrausSet ad_correlated_kraus(double t, const ADParams& params);

/// The six single-qubit SGAD operators in their published form. Several
/// radicands go negative in valid regimes (e.g. n = m = 0), so these are
/// evaluated with a complex square root and only used to report the
/// completeness defect; the SGAD maps themselves come from the generator.
KrausSet sgad_single_kraus_published(double t, const SGADParams& params);
KrausSet sgad_correlated_kraus_published(double t, const SGADParams& params);

// ---------------------------------------------------------------------------
// Maps
// ---------------------------------------------------------------------------

/// 16x16 superoperator on 4x4 matrices (column stacking) built for time t.
struct TwoQubitMap {
  ComplexMatrix superop;
  double t = 0.0;

  ComplexMatrix apply(const ComplexMatrix& rho) const { return apply_superop(superop, rho); }
};

/// 4x4 single-qubit superoperator.
ComplexMatrix single_qubit_map(const FamilyParams& params, double t);
/// d/dt of single_qubit_map.
ComplexMatrix single_qubit_map_rate(const FamilyParams& params, double t);

TwoQubitMap uncorrelated_two_qubit_map(const FamilyParams& params, double t);
TwoQubitMap correlated_two_qubit_map(const FamilyParams& params, double t);
ComplexMatrix uncorrelated_two_qubit_map_rate(const FamilyParams& params, double t);
ComplexMatrix correlated_two_qubit_map_rate(const FamilyParams& params, double t);

/// (1 - mu) uncorrelated + mu correlated.
TwoQubitMap combined_map(const ChannelSpec& spec, double t);
ComplexMatrix combined_map_rate(const ChannelSpec& spec, double t);

/// Minimum eigenvalue below which evolve reports a positivity violation.
inline constexpr double kPositivityTol = -1e-6;

DensityMatrix evolve(const DensityMatrix& rho0, const ChannelSpec& spec, double t);

/// Correlated two-qubit SGAD solution exactly as published. Kept for
/// comparison only: it disagrees with integration of the correlated
/// generator (rho_11 and rho_14), so correlated_two_qubit_map does not use it.
ComplexMatrix sgad_correlated_published(const ComplexMatrix& rho, double t, const SGADParams& params);

} // namespace cqsl
