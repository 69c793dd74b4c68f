#pragma once

#include <random>

#include "cqsl/linalg.hpp"

namespace testsupport {

inline cqsl::ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  cqsl::ComplexMatrix m(n, n);
  for (auto& x : m.entries()) x = {u(rng), u(rng)};
  return m;
}

inline cqsl::ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t n) {
  return cqsl::hermitian_part(random_matrix(rng, n));
}

inline cqsl::ComplexMatrix random_state(std::mt19937_64& rng, std::size_t n) {
  const auto a = random_matrix(rng, n);
  cqsl::ComplexMatrix rho = a * a.adjoint();
  rho *= 1.0 / rho.trace().real();
  return cqsl::hermitian_part(rho);
}

// Plain triple loop, kept apart from the library's product.
inline cqsl::cplx naive_trace_of_product(const cqsl::ComplexMatrix& a, const cqsl::ComplexMatrix& b) {
  cqsl::cplx s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, i);
  return s;
}

} // namespace testsupport
