#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cqsl {

using cplx = std::complex<double>;

/// Hermiticity tolerance applied before any eigensolve.
inline constexpr double kHermitianTol = 1e-12;
/// Hermiticity defect above which hermitian_eig refuses the input.
inline constexpr double kHermitianRejectTol = 1e-9;

/// Dense complex matrix, row-major. Sized for the 2x2 / 4x4 / 16x16 work
/// this library does; nothing here is tuned beyond plain O(n^3) loops.
class ComplexMatrix {
public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ComplexMatrix diagonal(std::span<const cplx> diag);
  static ComplexMatrix diagonal(std::span<const double> diag);
  /// |i><j| in an n-dimensional space.
  static ComplexMatrix unit(std::size_t n, std::size_t i, std::size_t j);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const cplx> entries() const noexcept { return data_; }
  std::span<cplx> entries() noexcept { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;

  cplx trace() const;
  double frobenius_norm() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

  bool operator==(const ComplexMatrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are sorted in
/// descending order; column k of `eigenvectors` belongs to eigenvalues[k].
struct EigResult {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// tr(AB) without forming AB.
cplx trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// max_ij |M_ij - conj(M_ji)|.
double hermiticity_defect(const ComplexMatrix& m);

/// max_ij |A_ij - B_ij|.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Cyclic complex Jacobi. Throws NonHermitianInput if the hermiticity defect
/// exceeds kHermitianRejectTol; inputs are symmetrized before solving.
EigResult hermitian_eig(const ComplexMatrix& m);

/// Singular values of a Hermitian matrix, i.e. |eigenvalues|, descending.
std::vector<double> singular_values_hermitian(const ComplexMatrix& m);

/// (M + M^dagger) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& m);

// ---------------------------------------------------------------------------
// Superoperators. Column-stacking vectorization: vec(M)[j*n + i] = M(i, j),
// so vec(A X B) = (B^T kron A) vec(X).
// ---------------------------------------------------------------------------

std::vector<cplx> vec(const ComplexMatrix& m);
ComplexMatrix unvec(std::span<const cplx> v, std::size_t n);

/// Applies an n^2 x n^2 superoperator to an n x n matrix.
ComplexMatrix apply_superop(const ComplexMatrix& superop, const ComplexMatrix& x);

/// Superoperator of X -> sum_k E_k X E_k^dagger.
ComplexMatrix superop_from_kraus(std::span<const ComplexMatrix> kraus);

/// Superoperator of X -> A X B.
ComplexMatrix superop_sandwich(const ComplexMatrix& a, const ComplexMatrix& b);

/// Superoperator of (map_a tensor map_b), built by acting on the matrix units
/// of the composite space. dim_a, dim_b are the Hilbert-space dimensions.
ComplexMatrix tensor_of_maps(const ComplexMatrix& map_a, std::size_t dim_a,
                             const ComplexMatrix& map_b, std::size_t dim_b);

/// Choi matrix sum_ij |i><j| kron Phi(|i><j|).
ComplexMatrix choi_matrix(const ComplexMatrix& superop, std::size_t dim);

/// Hilbert-space dimension n of an n^2 x n^2 superoperator.
std::size_t superop_dim(const ComplexMatrix& superop);

// Pauli and ladder operators in the (|0>, |1>) basis. sigma_plus = |0><1|.
namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
ComplexMatrix plus();
ComplexMatrix minus();
} // namespace pauli

} // namespace cqsl
