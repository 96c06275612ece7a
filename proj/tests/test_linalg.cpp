#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "core/linalg.hpp"
#include "support.hpp"

using namespace kropina;
using kt::mat;

namespace {

Eigen::MatrixXd to_eigen(const Matrix<double>& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

Matrix<double> random_skew(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix<double> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      m(i, j) = g(rng);
      m(j, i) = -m(i, j);
    }
  return m;
}

/// Nonnegative imaginary parts of the eigenvalues, one per conjugate pair, descending.
Vec eigen_blocks(const Matrix<double>& omega) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(omega), false);
  Vec im;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) im.push_back(std::abs(es.eigenvalues()[k].imag()));
  std::sort(im.begin(), im.end(), std::greater<>());
  Vec blocks;
  for (std::size_t k = 0; k + 1 < im.size(); k += 2) blocks.push_back(0.5 * (im[k] + im[k + 1]));
  return blocks;
}

}  // namespace

TEST_CASE("cholesky_pd on the identity, a diagonal, and an indefinite matrix") {
  const auto id = cholesky_pd(SymMatrix(Matrix<double>::identity(3)));
  REQUIRE(id);
  CHECK(kt::max_abs_diff(*id, Matrix<double>::identity(3)) == 0.0);

  const auto d = cholesky_pd(SymMatrix(mat({{2, 0}, {0, 3}})));
  REQUIRE(d);
  CHECK((*d)(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK((*d)(1, 1) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK((*d)(1, 0) == 0.0);

  CHECK_FALSE(cholesky_pd(SymMatrix(mat({{1, 0}, {0, -1}}))));
}

TEST_CASE("cholesky_pd rejects non-finite entries") {
  CHECK_THROWS_AS(cholesky_pd(SymMatrix(mat({{1, 0}, {0, std::numeric_limits<double>::quiet_NaN()}}))), InputError);
}

TEST_CASE("cholesky_pd succeeds exactly when every eigenvalue is positive") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(-1.0, 2.0);
  int pd = 0, not_pd = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 6;
    // M = O diag(λ) Oᵀ with eigenvalues kept away from zero so the verdict is unambiguous.
    const Matrix<double> O = random_orthogonal(n, rng);
    Matrix<double> D(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = lam(rng);
      if (std::abs(v) < 0.05) v = v < 0 ? -0.05 : 0.05;
      D(i, i) = v;
    }
    const SymMatrix M = SymMatrix::symmetrized(O * D * transpose(O));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(M.matrix()));
    const bool oracle_pd = es.eigenvalues().minCoeff() > 0.0;
    const auto L = cholesky_pd(M);
    CHECK(L.has_value() == oracle_pd);
    if (L) {
      ++pd;
      const double scale = std::max(1.0, max_abs(M.matrix()));
      CHECK(kt::max_abs_diff(*L * transpose(*L), M.matrix()) <= 1e-12 * scale);
    } else {
      ++not_pd;
    }
  }
  CHECK(pd > 20);
  CHECK(not_pd > 20);
}

TEST_CASE("SymMatrix and SkewMatrix demand exact mirrored storage") {
  CHECK_THROWS_AS(SymMatrix(mat({{1, 2}, {2.0000001, 1}})), InputError);
  CHECK_THROWS_AS(SkewMatrix(mat({{0, 1}, {-1, 0.5}})), InputError);
  CHECK_NOTHROW(SkewMatrix(mat({{0, 1}, {-1, 0}})));
  const SymMatrix s = SymMatrix::symmetrized(mat({{1, 2}, {4, 1}}));
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == 3.0);
}

TEST_CASE("skew_normal_form of J, of zero, and of the assembled sphere data") {
  const SkewNormalForm j = skew_normal_form(SkewMatrix(mat({{0, 1}, {-1, 0}})));
  REQUIRE(j.blocks.size() == 1);
  CHECK(j.blocks[0] == doctest::Approx(1.0).epsilon(1e-14));

  const SkewNormalForm z = skew_normal_form(SkewMatrix(Matrix<double>(4, 4)));
  REQUIRE(z.blocks.size() == 2);
  CHECK(z.blocks[0] == 0.0);
  CHECK(z.blocks[1] == 0.0);

  // Ω = [[0, Cᵀ], [−C, −Q]] with C = e₁, Q = [[0,0,0],[0,0,1],[0,−1,0]].
  const Matrix<double> omega = mat({{0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}});
  // Characteristic polynomial λ⁴ + c₂λ² + c₀ by Faddeev–LeVerrier, then λ² = −a².
  Matrix<double> Mk = Matrix<double>::identity(4);
  double coeff[5] = {1, 0, 0, 0, 0};
  for (int k = 1; k <= 4; ++k) {
    const Matrix<double> AM = omega * Mk;
    double tr = 0.0;
    for (int i = 0; i < 4; ++i) tr += AM(i, i);
    coeff[k] = -tr / k;
    Mk = AM;
    for (int i = 0; i < 4; ++i) Mk(i, i) += coeff[k];
  }
  CHECK(coeff[1] == doctest::Approx(0.0));
  CHECK(coeff[3] == doctest::Approx(0.0));
  const double disc = std::sqrt(coeff[2] * coeff[2] - 4.0 * coeff[4]);
  const double a1 = std::sqrt((coeff[2] + disc) / 2.0), a2 = std::sqrt((coeff[2] - disc) / 2.0);
  CHECK(a1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a2 == doctest::Approx(1.0).epsilon(1e-14));

  const SkewNormalForm nf = skew_normal_form(SkewMatrix(omega));
  REQUIRE(nf.blocks.size() == 2);
  CHECK(nf.blocks[0] == doctest::Approx(a1).epsilon(1e-12));
  CHECK(nf.blocks[1] == doctest::Approx(a2).epsilon(1e-12));
}

TEST_CASE("skew_normal_form blocks match the spectrum and the transform is orthogonal") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const Matrix<double> omega = random_skew(n, rng);
    const SkewNormalForm nf = skew_normal_form(SkewMatrix(omega));
    const Vec oracle = eigen_blocks(omega);
    REQUIRE(nf.blocks.size() == n / 2);
    CHECK(nf.residual_zero == (n % 2 == 1));
    CHECK(kt::max_abs_diff(nf.blocks, oracle) < 1e-10);
    for (std::size_t k = 0; k + 1 < nf.blocks.size(); ++k) CHECK(nf.blocks[k] >= nf.blocks[k + 1]);
    const Matrix<double>& B = nf.transform;
    CHECK(kt::max_abs_diff(transpose(B) * B, Matrix<double>::identity(n)) < 1e-10);
    CHECK(kt::max_abs_diff(transpose(B) * omega * B, nf.block_matrix()) < 1e-10);
  }
}

TEST_CASE("skew_normal_form is invariant under orthogonal conjugation") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const Matrix<double> omega = random_skew(n, rng);
    const Matrix<double> G = random_orthogonal(n, rng);
    const SkewNormalForm a = skew_normal_form(SkewMatrix(omega));
    const SkewNormalForm b = skew_normal_form(SkewMatrix::antisymmetrized(transpose(G) * omega * G));
    CHECK(kt::max_abs_diff(a.blocks, b.blocks) < 1e-10);
  }
}

TEST_CASE("skew_normal_form separates repeated blocks") {
  std::mt19937_64 rng(3);
  const Vec w{2.0, 2.0, 0.5};
  const Matrix<double> G = random_orthogonal(7, rng);
  const Matrix<double> omega = transpose(G) * block_skew(w, 7) * G;
  const SkewNormalForm nf = skew_normal_form(SkewMatrix::antisymmetrized(omega));
  CHECK(kt::max_abs_diff(nf.blocks, w) < 1e-10);
  CHECK(kt::max_abs_diff(transpose(nf.transform) * SkewMatrix::antisymmetrized(omega).matrix() * nf.transform,
                         nf.block_matrix()) < 1e-10);
}

TEST_CASE("symmetric_eigen agrees with an independent solver") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (std::size_t n = 1; n <= 6; ++n) {
    Matrix<double> a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = g(rng);
    const SymMatrix s = SymMatrix::symmetrized(a);
    const SymmetricEigen se = symmetric_eigen(s);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(s.matrix()));
    for (std::size_t k = 0; k < n; ++k) CHECK(se.values[k] == doctest::Approx(es.eigenvalues()[n - 1 - k]).epsilon(1e-10));
    for (std::size_t k = 0; k + 1 < n; ++k) CHECK(se.values[k] >= se.values[k + 1]);
  }
}

TEST_CASE("solve and spd_inverse agree with an independent solver") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (std::size_t n = 1; n <= 6; ++n) {
    Matrix<double> a(n, n);
    Vec b(n);
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = g(rng);
      for (std::size_t j = 0; j < n; ++j) a(i, j) = g(rng);
    }
    const Eigen::VectorXd ex = to_eigen(a).partialPivLu().solve(Eigen::Map<Eigen::VectorXd>(b.data(), n));
    const Vec x = solve(a, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ex[i]).epsilon(1e-9));

    Matrix<double> spd = a * transpose(a);
    for (std::size_t i = 0; i < n; ++i) spd(i, i) += 1.0;
    const Eigen::MatrixXd einv = to_eigen(spd).inverse();
    const Matrix<double> inv = spd_inverse(spd);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) CHECK(inv(i, j) == doctest::Approx(einv(i, j)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(solve(mat({{1, 2}, {2, 4}}), Vec{1, 1}), InputError);
}

TEST_CASE("random_orthogonal is orthogonal and seeded") {
  std::mt19937_64 r1(4), r2(4);
  const Matrix<double> a = random_orthogonal(5, r1), b = random_orthogonal(5, r2);
  CHECK(kt::max_abs_diff(transpose(a) * a, Matrix<double>::identity(5)) < 1e-14);
  CHECK(kt::max_abs_diff(a, b) == 0.0);
}
