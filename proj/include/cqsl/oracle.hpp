#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>

#include "cqsl/channels.hpp"
#include "cqsl/linalg.hpp"

// Ground-truth paths for tests and `cqsl validate`. Nothing in the main
// pipeline depends on this module.
namespace cqsl::oracle {

/// rho -> L_t(rho) on dim x dim matrices.
struct LindbladGenerator {
  std::string name;
  std::size_t dim = 2;
  std::function<ComplexMatrix(double, const ComplexMatrix&)> action;
  /// Number of evaluations in which a singular rate was capped.
  std::shared_ptr<std::atomic<std::size_t>> capped = std::make_shared<std::atomic<std::size_t>>(0);

  ComplexMatrix operator()(double t, const ComplexMatrix& rho) const { return action(t, rho); }
};

/// |rate| cap applied to time-local rates near their poles.
inline constexpr double kRateCap = 1e6;

LindbladGenerator zero_generator(std::size_t dim);

/// gamma_t (sigma_- rho sigma_+ - {sigma_+ sigma_-, rho}/2).
LindbladGenerator ad_single_generator(const ADParams& params);
/// Same dissipator on each qubit.
LindbladGenerator ad_uncorrelated_generator(const ADParams& params);
/// Jump operator sigma_- kron sigma_-.
LindbladGenerator ad_correlated_generator(const ADParams& params);

/// Squeezed thermal generator on one qubit.
LindbladGenerator sgad_single_generator(const SGADParams& params);
LindbladGenerator sgad_uncorrelated_generator(const SGADParams& params);
/// The same generator with sigma_+/- replaced by sigma_+/- kron sigma_+/-.
LindbladGenerator sgad_correlated_generator(const SGADParams& params);

/// Time-local dephasing kappa(t) (Z rho Z - rho), kappa = -Lambda'/(2 Lambda).
/// kappa diverges where Lambda(t) = 0.
LindbladGenerator dephasing_single_generator(const DephasingParams& params);
LindbladGenerator dephasing_uncorrelated_generator(const DephasingParams& params);
LindbladGenerator dephasing_correlated_generator(const DephasingParams& params);

/// Uncorrelated and correlated generators for the family of `params`.
LindbladGenerator uncorrelated_generator(const FamilyParams& params);
LindbladGenerator correlated_generator(const FamilyParams& params);

struct RK4Options {
  double dt = 1e-3;
  bool halving_check = true;
  double halving_tol = 1e-7;
  /// Allowed trace / hermiticity drift before the result is rejected.
  double drift_tol = 1e-8;
};

struct RK4Result {
  ComplexMatrix rho;
  std::size_t steps = 0;
  /// Largest entrywise change when re-running at dt/2 (0 if not checked).
  double halving_diff = 0.0;
  std::size_t capped_evaluations = 0;
};

/// Classic RK4 from t = 0. Throws StepTooLarge when the halving check or the
/// drift limit fails.
RK4Result rk4_evolve(const LindbladGenerator& gen, const ComplexMatrix& rho0, double t_final,
                     const RK4Options& options = {});

/// (1 - mu) RK4(uncorrelated) + mu RK4(correlated).
ComplexMatrix rk4_mixture(const FamilyParams& params, double mu, const ComplexMatrix& rho0, double t_final,
                          const RK4Options& options = {});

struct SpectralReport {
  std::array<double, 4> eta{};
  /// max over i of max |L(R_i) - eta_i R_i|.
  double right_residual = 0.0;
  /// max over i and matrix units X of |tr(L_i L(X)) - eta_i tr(L_i X)|.
  double left_residual = 0.0;
  /// max |tr(L_i R_j) - delta_ij|.
  double biorthogonality_residual = 0.0;

  double worst() const;
};

/// Checks the eigenoperator pairs of the single-qubit squeezed generator.
SpectralReport spectral_check(const SGADParams& params);

/// (rho(t + h) - rho(t - h)) / (2h), Hermitian part.
ComplexMatrix fd_derivative(const std::function<ComplexMatrix(double)>& state_fn, double t, double h);

} // namespace cqsl::oracle
