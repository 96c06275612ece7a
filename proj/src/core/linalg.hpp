#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "core/dual.hpp"
#include "core/errors.hpp"

namespace kropina {

using Vec = std::vector<double>;

/// Dense row-major matrix over a scalar type. Dimensions here stay below ~20.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0.0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
Matrix<T> transpose(const Matrix<T>& m) {
  Matrix<T> t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

template <class T>
std::vector<T> operator*(const Matrix<T>& a, std::span<const T> x) {
  std::vector<T> y(a.rows(), T(0.0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

template <class T>
std::vector<T> operator*(const Matrix<T>& a, const std::vector<T>& x) {
  return a * std::span<const T>(x);
}

template <class T>
T dot(std::span<const T> a, std::span<const T> b) {
  T s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  return dot(std::span<const T>(a), std::span<const T>(b));
}

/// Quadratic form `uᵀ M v`.
template <class T>
T quad(const Matrix<T>& m, std::span<const T> u, std::span<const T> v) {
  T s(0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s += u[i] * m(i, j) * v[j];
  return s;
}

template <class T>
T quad(const Matrix<T>& m, const std::vector<T>& u, const std::vector<T>& v) {
  return quad(m, std::span<const T>(u), std::span<const T>(v));
}

double norm(std::span<const double> v);
double max_abs(const Matrix<double>& m);
double max_abs(std::span<const double> v);

/// Lower Cholesky factor of a symmetric matrix over any scalar type; pivots are
/// tested on their primal part. Throws InputError if not positive definite.
template <class T>
Matrix<T> cholesky_factor(const Matrix<T>& m) {
  using std::sqrt;
  const std::size_t n = m.rows();
  Matrix<T> l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    T d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(primal(d) > 0.0)) throw InputError("matrix is not positive definite");
    T ljj = sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      T s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

/// Inverse of a symmetric positive-definite matrix through its Cholesky factor.
template <class T>
Matrix<T> spd_inverse(const Matrix<T>& m) {
  const std::size_t n = m.rows();
  Matrix<T> l = cholesky_factor(m);
  // Invert L column by column (forward substitution), then M⁻¹ = L⁻ᵀ L⁻¹.
  Matrix<T> linv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = c; i < n; ++i) {
      T s = (i == c) ? T(1.0) : T(0.0);
      for (std::size_t k = c; k < i; ++k) s -= l(i, k) * linv(k, c);
      linv(i, c) = s / l(i, i);
    }
  }
  Matrix<T> inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      T s(0.0);
      for (std::size_t k = j; k < n; ++k) s += linv(k, i) * linv(k, j);
      inv(i, j) = s;
      inv(j, i) = s;
    }
  return inv;
}

/// Solves A x = b for a general square matrix by Gaussian elimination with
/// partial pivoting. Throws InputError when A is numerically singular.
Vec solve(Matrix<double> a, Vec b);

/// Symmetric matrix with exactly mirrored storage.
class SymMatrix {
 public:
  /// Throws InputError unless `m` is square with m(i,j) == m(j,i) bit for bit.
  explicit SymMatrix(Matrix<double> m);
  /// Averages `m` with its transpose.
  static SymMatrix symmetrized(const Matrix<double>& m);

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix<double>& matrix() const { return m_; }

 private:
  Matrix<double> m_;
};

/// Skew-symmetric matrix with exactly anti-mirrored storage.
class SkewMatrix {
 public:
  /// Throws InputError unless `m` is square with m(i,j) == -m(j,i) bit for bit.
  explicit SkewMatrix(Matrix<double> m);
  static SkewMatrix antisymmetrized(const Matrix<double>& m);

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix<double>& matrix() const { return m_; }

 private:
  Matrix<double> m_;
};

/// Cholesky test for positive definiteness. Returns the lower factor L with
/// L Lᵀ = M, or nullopt when some pivot is ≤ 1e-13 · max diagonal entry.
/// Non-finite entries throw InputError.
std::optional<Matrix<double>> cholesky_pd(const SymMatrix& m);

struct SymmetricEigen {
  Vec values;              // descending
  Matrix<double> vectors;  // column k belongs to values[k]
};

/// Cyclic Jacobi eigensolver for small symmetric matrices.
SymmetricEigen symmetric_eigen(const SymMatrix& m);

/// Orthogonal block normal form `Bᵀ Ω B = a₁J ⊕ … ⊕ a_mJ (⊕ 0)`, with
/// J = [[0, 1], [-1, 0]] and a₁ ≥ … ≥ a_m ≥ 0.
struct SkewNormalForm {
  Vec blocks;
  bool residual_zero = false;
  Matrix<double> transform;

  /// The block-diagonal matrix the transform should produce.
  Matrix<double> block_matrix() const;
};

SkewNormalForm skew_normal_form(const SkewMatrix& omega);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
Matrix<double> random_orthogonal(std::size_t n, std::mt19937_64& rng);

/// J = [[0,1],[-1,0]] repeated along the diagonal with the given weights,
/// padded with zeros to size n.
Matrix<double> block_skew(std::span<const double> weights, std::size_t n);

}  // namespace kropina
