#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "cqsl/channels.hpp"
#include "cqsl/states.hpp"

namespace cqsl {

enum class DerivMode { Analytic, FiniteDifference };
enum class Bound { ML, MT };

std::string_view to_string(DerivMode mode);
std::string_view to_string(Bound bound);

inline constexpr int kDefaultQuadSteps = 512;
inline constexpr int kMaxQuadSteps = 1 << 14;
inline constexpr double kQuadRelTol = 1e-6;
inline constexpr double kDefaultFdStep = 1e-5;
/// Below this, both the QSL numerator and the ML average count as zero.
inline constexpr double kFrozenTol = 1e-12;

struct DerivOptions {
  DerivMode mode = DerivMode::Analytic;
  double fd_step = kDefaultFdStep;
};

struct QslQuery {
  ChannelSpec spec;
  InitialStateParams initial;
  double tau = 1.0;
  double tau_d = 1.0;
  int quad_steps = kDefaultQuadSteps;
  DerivOptions deriv;

  /// Throws ParamOutOfRange.
  void validate() const;
};

struct QslResult {
  double f = 1.0;
  double ml_avg = 0.0;
  double mt_avg = 0.0;
  double tau_qsl = 0.0;
  Bound active_bound = Bound::ML;
  bool frozen = false;
  double quad_error_estimate = 0.0;
  /// |f - 1| tr(rho_tau^2), evaluated as |tr(rho_tau (rho_later - rho_tau))|.
  double numerator = 0.0;
  double purity = 0.0;
};

/// tr(rho_tau rho_later) / tr(rho_tau^2). Throws DegeneratePurity.
double relative_purity(const DensityMatrix& rho_tau, const DensityMatrix& rho_later);

/// Raw evolved matrix (no PSD validation), used inside integrands.
ComplexMatrix state_at(const ChannelSpec& spec, const InitialStateParams& initial, double t);

/// d(rho_t)/dt, Hermitian and traceless. Analytic mode differentiates the map
/// scalars; finite-difference mode uses a central difference (second-order
/// one-sided when t < h).
ComplexMatrix state_derivative(const ChannelSpec& spec, const InitialStateParams& initial, double t,
                               const DerivOptions& deriv = {});

/// sum_i Lambda_i beta_i with both lists sorted descending and paired by rank.
/// `beta` may be given in any order.
double ml_value(const ComplexMatrix& rho_dot, std::span<const double> beta);
/// sqrt(sum_i Lambda_i^2) = ||rho_dot||_F.
double mt_value(const ComplexMatrix& rho_dot);

/// ML / MT integrands at time t for the window starting at tau.
double ml_integrand(const ChannelSpec& spec, const InitialStateParams& initial, double tau, double t,
                    const DerivOptions& deriv = {});
double mt_integrand(const ChannelSpec& spec, const InitialStateParams& initial, double t,
                    const DerivOptions& deriv = {});

struct QuadratureOptions {
  int steps = kDefaultQuadSteps;
  /// Interior points where the integrand may have a kink; the window is
  /// split into panels there.
  std::vector<double> breakpoints;
};

struct Average {
  double value = 0.0;
  /// |S_n - S_{n/2}| / tau_d at the accepted resolution.
  double error_estimate = 0.0;
  int steps_used = 0;
};

/// (1/tau_d) * integral over [tau, tau + tau_d], composite Simpson with a
/// step-halving error estimate. Doubles the resolution until the halving
/// change is within kQuadRelTol relative; throws QuadratureNonConvergent
/// once kMaxQuadSteps is reached without that.
Average time_average(const std::function<double(double)>& integrand, double tau, double tau_d,
                     const QuadratureOptions& options = {});

/// Same, for several integrands sharing one evaluation per node. The
/// convergence test applies to every component.
std::vector<Average> time_average_multi(const std::function<std::vector<double>(double)>& integrand,
                                        std::size_t components, double tau, double tau_d,
                                        const QuadratureOptions& options = {});

/// Times in (t0, t1) where the state derivative of this family may have
/// kinks in its singular values (zeros of the scalar rates).
std::vector<double> kink_times(const ChannelSpec& spec, double t0, double t1);

/// Unified QSL time. For stationary dynamics the frozen flag is set; the
/// dephasing family then reports the mu -> 1 limit of the bound, other
/// families report 0.
QslResult qsl_time(const QslQuery& query);

/// Closed-form dephasing QSL time (MT-style denominator with the (1 - mu)
/// factor cancelled). The denominator integral of -Lambda dLambda/dt is
/// signed and evaluated by Simpson with quad_steps.
double qsl_dephasing_closed_form(const DephasingParams& params, const InitialStateParams& initial, double mu,
                                 double tau, double tau_d, int quad_steps = kDefaultQuadSteps);

} // namespace cqsl
