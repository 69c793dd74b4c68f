#include "cqsl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "cqsl/errors.hpp"

namespace cqsl {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionMismatch(
        fmt::format("ComplexMatrix: {} entries for a {}x{} matrix", data_.size(), rows_, cols_));
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionMismatch("ComplexMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::unit(std::size_t n, std::size_t i, std::size_t j) {
  ComplexMatrix m(n, n);
  m(i, j) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out = *this;
  for (auto& v : out.data_) v = std::conj(v);
  return out;
}

cplx ComplexMatrix::trace() const {
  if (!is_square()) throw DimensionMismatch("trace of a non-square matrix");
  cplx t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionMismatch("matrix addition");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionMismatch("matrix subtraction");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch(
        fmt::format("matrix product {}x{} * {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
  }
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

cplx trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.cols() || a.cols() != b.rows() || !a.is_square()) {
    throw DimensionMismatch(
        fmt::format("trace_product {}x{} with {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
  }
  cplx t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t += a(i, j) * b(j, i);
  return t;
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("hermiticity of a non-square matrix");
  double d = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
  return d;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("max_abs_diff");
  double d = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k)
    d = std::max(d, std::abs(a.entries()[k] - b.entries()[k]));
  return d;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  ComplexMatrix h = m + m.adjoint();
  h *= 0.5;
  return h;
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

} // namespace

EigResult hermitian_eig(const ComplexMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("hermitian_eig of a non-square matrix");
  const double defect = hermiticity_defect(m);
  if (defect > kHermitianRejectTol) {
    throw NonHermitianInput(fmt::format("hermitian_eig: hermiticity defect {:.3e}", defect));
  }
  const std::size_t n = m.rows();
  ComplexMatrix a = hermitian_part(m);
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double threshold = 1e-14 * std::max(1.0, a.frobenius_norm());

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a) >= threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double g = std::abs(apq);
        if (g < 1e-300) continue;
        // Phase the (p,q) entry to the real axis, then a real Jacobi rotation.
        const cplx phase = apq / g;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * g);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx em = std::conj(phase);  // e^{-i phi}

        // A <- A J with J(p,p)=c, J(p,q)=s, J(q,p)=-s e^{-i phi}, J(q,q)=c e^{-i phi}.
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp - s * em * akq;
          a(k, q) = s * akp + c * em * akq;
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = c * vkp - s * em * vkq;
          v(k, q) = s * vkp + c * em * vkq;
        }
        // A <- J^dagger A
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  EigResult result;
  result.eigenvalues.resize(n);
  result.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    result.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) result.eigenvectors(i, k) = v(i, order[k]);
  }
  return result;
}

std::vector<double> singular_values_hermitian(const ComplexMatrix& m) {
  auto values = hermitian_eig(m).eigenvalues;
  for (auto& x : values) x = std::abs(x);
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

std::vector<cplx> vec(const ComplexMatrix& m) {
  std::vector<cplx> out(m.rows() * m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out[j * m.rows() + i] = m(i, j);
  return out;
}

ComplexMatrix unvec(std::span<const cplx> v, std::size_t n) {
  if (v.size() != n * n) throw DimensionMismatch("unvec: length is not n^2");
  ComplexMatrix out(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) out(i, j) = v[j * n + i];
  return out;
}

std::size_t superop_dim(const ComplexMatrix& superop) {
  const auto n = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(superop.rows()))));
  if (!superop.is_square() || n * n != superop.rows()) {
    throw DimensionMismatch(fmt::format("{}x{} is not a superoperator", superop.rows(), superop.cols()));
  }
  return n;
}

ComplexMatrix apply_superop(const ComplexMatrix& superop, const ComplexMatrix& x) {
  const std::size_t n = superop_dim(superop);
  if (x.rows() != n || x.cols() != n) throw DimensionMismatch("apply_superop: operand dimension");
  const auto in = vec(x);
  std::vector<cplx> out(n * n);
  for (std::size_t r = 0; r < n * n; ++r) {
    cplx s = 0.0;
    for (std::size_t c = 0; c < n * n; ++c) s += superop(r, c) * in[c];
    out[r] = s;
  }
  return unvec(out, n);
}

ComplexMatrix superop_sandwich(const ComplexMatrix& a, const ComplexMatrix& b) {
  return kron(b.transpose(), a);
}

ComplexMatrix superop_from_kraus(std::span<const ComplexMatrix> kraus) {
  if (kraus.empty()) throw DimensionMismatch("superop_from_kraus: empty Kraus set");
  const std::size_t n = kraus.front().rows();
  ComplexMatrix s(n * n, n * n);
  for (const auto& e : kraus) {
    if (e.rows() != n || e.cols() != n) throw DimensionMismatch("superop_from_kraus: mixed dimensions");
    s += kron(e.conjugate(), e);
  }
  return s;
}

ComplexMatrix tensor_of_maps(const ComplexMatrix& map_a, std::size_t dim_a,
                             const ComplexMatrix& map_b, std::size_t dim_b) {
  if (superop_dim(map_a) != dim_a || superop_dim(map_b) != dim_b) {
    throw DimensionMismatch("tensor_of_maps: dimension mismatch");
  }
  const std::size_t n = dim_a * dim_b;
  ComplexMatrix out(n * n, n * n);
  // Images of the factor matrix units, computed once.
  std::vector<ComplexMatrix> img_a(dim_a * dim_a), img_b(dim_b * dim_b);
  for (std::size_t a = 0; a < dim_a; ++a)
    for (std::size_t b = 0; b < dim_a; ++b)
      img_a[a * dim_a + b] = apply_superop(map_a, ComplexMatrix::unit(dim_a, a, b));
  for (std::size_t c = 0; c < dim_b; ++c)
    for (std::size_t d = 0; d < dim_b; ++d)
      img_b[c * dim_b + d] = apply_superop(map_b, ComplexMatrix::unit(dim_b, c, d));

  for (std::size_t a = 0; a < dim_a; ++a)
    for (std::size_t b = 0; b < dim_a; ++b)
      for (std::size_t c = 0; c < dim_b; ++c)
        for (std::size_t d = 0; d < dim_b; ++d) {
          // |a c><b d| -> Phi_a(|a><b|) kron Phi_b(|c><d|)
          const std::size_t row = a * dim_b + c;
          const std::size_t col = b * dim_b + d;
          const auto image = vec(kron(img_a[a * dim_a + b], img_b[c * dim_b + d]));
          const std::size_t column = col * n + row;
          for (std::size_t k = 0; k < n * n; ++k) out(k, column) = image[k];
        }
  return out;
}

ComplexMatrix choi_matrix(const ComplexMatrix& superop, std::size_t dim) {
  if (superop_dim(superop) != dim) throw DimensionMismatch("choi_matrix: dimension mismatch");
  ComplexMatrix choi(dim * dim, dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      choi += kron(ComplexMatrix::unit(dim, i, j), apply_superop(superop, ComplexMatrix::unit(dim, i, j)));
  return choi;
}

namespace pauli {
ComplexMatrix identity() { return ComplexMatrix::identity(2); }
ComplexMatrix x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix y() { return {{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}}; }
ComplexMatrix z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
ComplexMatrix plus() { return {{0.0, 1.0}, {0.0, 0.0}}; }
ComplexMatrix minus() { return {{0.0, 0.0}, {1.0, 0.0}}; }
} // namespace pauli

} // namespace cqsl
