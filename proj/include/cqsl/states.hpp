#pragma once

#include "cqsl/linalg.hpp"

namespace cqsl {

/// Two-qubit basis ordering used everywhere: (|00>, |01>, |10>, |11>).
/// Matrix elements quoted with 1-based labels (rho_23, ...) map to 0-based
/// storage (rho(1, 2), ...).
inline constexpr std::size_t kTwoQubitDim = 4;

/// Parameters of rho0 = r |psi><psi| + (1 - r)/4 I with
/// |psi> = sqrt(1 - alpha^2) |01> + alpha |10>.
struct InitialStateParams {
  double r = 0.5;
  double alpha = 0.70710678118654752440;
};

/// Validated 4x4 density matrix (unit trace, Hermitian, PSD within tolerance).
class DensityMatrix {
public:
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kPsdTol = -1e-9;

  /// Validates; throws ParamOutOfRange / PositivityViolation on failure.
  explicit DensityMatrix(ComplexMatrix m);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  cplx operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

private:
  ComplexMatrix m_;
};

DensityMatrix make_initial_state(const InitialStateParams& params);

/// tr(rho^2).
double purity(const DensityMatrix& rho);

} // namespace cqsl
