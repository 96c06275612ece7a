#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kropina {

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double max_abs(const Matrix<double>& m) {
  double r = 0.0;
  for (double e : m.data()) r = std::max(r, std::abs(e));
  return r;
}

double max_abs(std::span<const double> v) {
  double r = 0.0;
  for (double e : v) r = std::max(r, std::abs(e));
  return r;
}

Vec solve(Matrix<double> a, Vec b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw InputError("solve: dimension mismatch");
  const double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    if (std::abs(a(p, c)) <= 1e-14 * scale) throw InputError("solve: singular matrix");
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
      std::swap(b[p], b[c]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
      b[r] -= f * b[c];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

SymMatrix::SymMatrix(Matrix<double> m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw InputError("SymMatrix: matrix must be square and non-empty");
  for (std::size_t i = 0; i < m_.rows(); ++i)
    for (std::size_t j = i + 1; j < m_.cols(); ++j)
      if (m_(i, j) != m_(j, i)) throw InputError("SymMatrix: matrix is not symmetric");
}

SymMatrix SymMatrix::symmetrized(const Matrix<double>& m) {
  Matrix<double> s = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      s(i, j) = avg;
      s(j, i) = avg;
    }
  return SymMatrix(std::move(s));
}

SkewMatrix::SkewMatrix(Matrix<double> m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw InputError("SkewMatrix: matrix must be square and non-empty");
  for (std::size_t i = 0; i < m_.rows(); ++i)
    for (std::size_t j = i; j < m_.cols(); ++j)
      if (m_(i, j) != -m_(j, i)) throw InputError("SkewMatrix: matrix is not skew-symmetric");
}

SkewMatrix SkewMatrix::antisymmetrized(const Matrix<double>& m) {
  Matrix<double> s = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s(i, i) = 0.0;
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double avg = 0.5 * (m(i, j) - m(j, i));
      s(i, j) = avg;
      s(j, i) = -avg;
    }
  }
  return SkewMatrix(std::move(s));
}

std::optional<Matrix<double>> cholesky_pd(const SymMatrix& sym) {
  const Matrix<double>& m = sym.matrix();
  const std::size_t n = m.rows();
  double max_diag = 0.0;
  for (double e : m.data())
    if (!std::isfinite(e)) throw InputError("cholesky_pd: non-finite entry");
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, m(i, i));
  if (max_diag <= 0.0) return std::nullopt;
  const double floor = 1e-13 * max_diag;

  Matrix<double> l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= floor) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

SymmetricEigen symmetric_eigen(const SymMatrix& sym) {
  const std::size_t n = sym.dim();
  Matrix<double> a = sym.matrix();
  Matrix<double> v = Matrix<double>::identity(n);

  double frob = 0.0;
  for (double e : a.data()) frob += e * e;
  const double stop = 1e-34 * frob;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= stop) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigen out{Vec(n), Matrix<double>(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

Matrix<double> block_skew(std::span<const double> weights, std::size_t n) {
  Matrix<double> m(n, n);
  for (std::size_t k = 0; k < weights.size() && 2 * k + 1 < n; ++k) {
    m(2 * k, 2 * k + 1) = weights[k];
    m(2 * k + 1, 2 * k) = -weights[k];
  }
  return m;
}

Matrix<double> SkewNormalForm::block_matrix() const { return block_skew(blocks, transform.rows()); }

namespace {

void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void normalize(Vec& v) {
  const double nv = norm(v);
  for (double& e : v) e /= nv;
}

Vec times(const Matrix<double>& m, const Vec& x) { return m * x; }

// Orthonormal basis of span(candidates) ⊖ span(remove), keeping `keep` vectors.
std::vector<Vec> complement(std::vector<Vec> candidates, const std::vector<Vec>& remove, std::size_t keep) {
  for (Vec& c : candidates)
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& r : remove) axpy(-dot(r, c), r, c);
  std::vector<Vec> out;
  while (out.size() < keep) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double nc = norm(candidates[i]);
      if (nc > best_norm) {
        best_norm = nc;
        best = i;
      }
    }
    Vec pick = candidates[best];
    normalize(pick);
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
    for (Vec& c : candidates)
      for (int pass = 0; pass < 2; ++pass) axpy(-dot(pick, c), pick, c);
    out.push_back(std::move(pick));
  }
  return out;
}

}  // namespace

SkewNormalForm skew_normal_form(const SkewMatrix& skew) {
  const Matrix<double>& omega = skew.matrix();
  const std::size_t l = omega.rows();
  const std::size_t m = l / 2;
  for (double e : omega.data())
    if (!std::isfinite(e)) throw InputError("skew_normal_form: non-finite entry");

  SkewNormalForm nf;
  nf.residual_zero = (l % 2 == 1);

  // Block values: the spectrum of the Hermitian matrix iΩ is {±a_k}; its real
  // symmetric embedding [[0, -Ω], [Ω, 0]] carries each eigenvalue twice.
  Matrix<double> emb(2 * l, 2 * l);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) {
      emb(i, l + j) = -omega(i, j);
      emb(l + i, j) = omega(i, j);
    }
  const SymmetricEigen spec = symmetric_eigen(SymMatrix::symmetrized(emb));
  nf.blocks.resize(m);
  for (std::size_t k = 0; k < m; ++k)
    nf.blocks[k] = std::max(0.0, 0.5 * (spec.values[2 * k] + spec.values[2 * k + 1]));
  std::sort(nf.blocks.begin(), nf.blocks.end(), std::greater<>());

  // Transform: repeatedly take the dominant eigenvector u of ΩᵀΩ restricted to
  // the Ω-invariant complement of the pairs found so far, pair it with -Ωu/|Ωu|.
  const double scale = std::max(max_abs(omega), 1.0);
  const double zero_tol = 1e-10 * scale;
  std::vector<Vec> basis;
  for (std::size_t i = 0; i < l; ++i) {
    Vec e(l, 0.0);
    e[i] = 1.0;
    basis.push_back(std::move(e));
  }
  std::vector<Vec> columns;
  while (basis.size() >= 2) {
    const std::size_t r = basis.size();
    std::vector<Vec> images;
    for (const Vec& b : basis) images.push_back(times(omega, b));
    Matrix<double> restricted(r, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = i; j < r; ++j) {
        const double s = dot(images[i], images[j]);
        restricted(i, j) = s;
        restricted(j, i) = s;
      }
    const SymmetricEigen eig = symmetric_eigen(SymMatrix(restricted));
    Vec u(l, 0.0);
    for (std::size_t i = 0; i < r; ++i) axpy(eig.vectors(i, 0), basis[i], u);
    normalize(u);
    Vec w = times(omega, u);
    const double a = norm(w);
    if (a <= zero_tol) break;
    Vec v = w;
    for (double& e : v) e = -e / a;
    axpy(-dot(u, v), u, v);
    normalize(v);
    columns.push_back(u);
    columns.push_back(v);
    basis = complement(std::move(basis), {u, v}, r - 2);
  }
  for (Vec& b : basis) columns.push_back(std::move(b));

  nf.transform = Matrix<double>(l, l);
  for (std::size_t c = 0; c < l; ++c)
    for (std::size_t r = 0; r < l; ++r) nf.transform(r, c) = columns[c][r];
  return nf;
}

Matrix<double> random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec> cols(n, Vec(n));
  for (Vec& c : cols)
    for (double& e : c) e = gauss(rng);
  // Modified Gram-Schmidt, two passes for orthogonality at rounding level; R has
  // positive diagonal, so Q is Haar distributed.
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) axpy(-dot(cols[k], cols[j]), cols[k], cols[j]);
    normalize(cols[j]);
  }
  Matrix<double> q(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) q(i, j) = cols[j][i];
  return q;
}

}  // namespace kropina
