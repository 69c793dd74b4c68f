#include "cqsl/states.hpp"

#include <cmath>

#include <fmt/format.h>

#include "cqsl/errors.hpp"

namespace cqsl {

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != kTwoQubitDim || m_.cols() != kTwoQubitDim) {
    throw DimensionMismatch(fmt::format("DensityMatrix must be 4x4, got {}x{}", m_.rows(), m_.cols()));
  }
  const cplx tr = m_.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw ParamOutOfRange(fmt::format("DensityMatrix trace {:.3e}{:+.3e}i", tr.real(), tr.imag()));
  }
  if (const double h = hermiticity_defect(m_); h > kHermitianTol) {
    throw ParamOutOfRange(fmt::format("DensityMatrix hermiticity defect {:.3e}", h));
  }
  const double min_eig = hermitian_eig(m_).eigenvalues.back();
  if (min_eig < kPsdTol) {
    throw PositivityViolation(fmt::format("DensityMatrix minimum eigenvalue {:.3e}", min_eig));
  }
}

DensityMatrix make_initial_state(const InitialStateParams& params) {
  const double r = params.r;
  const double alpha = params.alpha;
  if (!(r >= 0.0 && r <= 1.0) || !(alpha >= 0.0 && alpha <= 1.0)) {
    throw ParamOutOfRange(fmt::format("initial state needs r, alpha in [0,1]; got r={} alpha={}", r, alpha));
  }
  const double a2 = alpha * alpha;
  const double mixed = (1.0 - r) / 4.0;
  ComplexMatrix m(kTwoQubitDim, kTwoQubitDim);
  m(0, 0) = mixed;
  m(1, 1) = mixed + r * (1.0 - a2);
  m(2, 2) = mixed + r * a2;
  m(3, 3) = mixed;
  const double coherence = r * alpha * std::sqrt(1.0 - a2);
  m(1, 2) = coherence;
  m(2, 1) = coherence;
  return DensityMatrix(std::move(m));
}

double purity(const DensityMatrix& rho) {
  return trace_product(rho.matrix(), rho.matrix()).real();
}

} // namespace cqsl
