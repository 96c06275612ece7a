#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/classify.hpp"
#include "core/conic.hpp"
#include "core/navigation.hpp"
#include "core/riemannian.hpp"

namespace kt {

using kropina::Matrix;
using kropina::Vec;

inline Matrix<double> mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix<double> m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline double max_abs_diff(const Matrix<double>& a, const Matrix<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline Vec scaled(const Vec& v, double s) {
  Vec out(v);
  for (double& e : out) e *= s;
  return out;
}

inline Vec gaussian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (double& e : v) e = g(rng);
  return v;
}

/// The canonical m = 2 data: C = (1,0,0), Q = [[0,0,0],[0,0,1],[0,-1,0]] (times √K).
inline kropina::SphereKillingParams sphere_params(double K = 1.0) {
  const double r = std::sqrt(K);
  Matrix<double> q = mat({{0, 0, 0}, {0, 0, r}, {0, -r, 0}});
  return kropina::SphereKillingParams::make(2, K, kropina::SkewMatrix(q), Vec{r, 0, 0});
}

struct NamedNav {
  std::string name;
  kropina::NavigationData nav;
};

/// Every catalog navigation family with a unit Killing wind.
inline std::vector<NamedNav> catalog_navs() {
  std::mt19937_64 rng(99);
  return {
      {"euclidean2", kropina::euclidean_navigation({1.0, 0.0})},
      {"euclidean3", kropina::euclidean_navigation({0.0, 0.6, 0.8})},
      {"cylinder", kropina::cylinder_navigation()},
      {"torus", kropina::torus_navigation()},
      {"s3_chart", kropina::s3_navigation()},
      {"sphere_east_K1", kropina::sphere_navigation(sphere_params(1.0))},
      {"sphere_west_K1", kropina::sphere_navigation(sphere_params(1.0), kropina::Hemisphere::west)},
      {"sphere_m3_K4", kropina::sphere_navigation(kropina::SphereKillingParams::random_conjugate(3, 4.0, rng))},
  };
}

inline kropina::ConicKropinaMetric kropina_metric(const kropina::NavigationData& nav) {
  return kropina::ConicKropinaMetric(kropina::make_kropina_generator(kropina::nav_to_kropina(nav)));
}

/// Central difference of a scalar function along coordinate i.
inline double central(const std::function<double(const Vec&)>& f, Vec p, std::size_t i, double h) {
  const double c = p[i];
  p[i] = c + h;
  const double fp = f(p);
  p[i] = c - h;
  const double fm = f(p);
  return (fp - fm) / (2.0 * h);
}

/// Spray oracle built only from values of F:
/// G^i = ¼ g^{il}(y^m ∂²F²/∂y^l∂x^m − ∂F²/∂x^l), with g the FD Hessian of F²/2.
inline Vec spray_oracle(const kropina::ConicKropinaMetric& m, const Vec& x, const Vec& y) {
  const std::size_t n = x.size();
  auto E = [&](const Vec& xx, const Vec& yy) { const double f = m.F(xx, yy); return f * f; };
  const double hy = 1e-4 * (1.0 + kropina::norm(y)), hx = 1e-4 * (1.0 + kropina::norm(x));
  Matrix<double> g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto d_j = [&](const Vec& yy) { return central([&](const Vec& z) { return E(x, z); }, yy, j, hy); };
      g(i, j) = 0.5 * central(d_j, y, i, hy);
    }
  Vec rhs(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    // y^m ∂_{x^m} of ∂F²/∂y^l is the derivative of ∂F²/∂y^l along x + t y at t = 0.
    auto dyl = [&](const Vec& xx) { return central([&](const Vec& z) { return E(xx, z); }, y, l, hy); };
    auto along = [&](const Vec& t) {
      Vec xx(x);
      for (std::size_t k = 0; k < n; ++k) xx[k] += t[0] * y[k];
      return dyl(xx);
    };
    const double mixed = central(along, Vec{0.0}, 0, hx / (1.0 + kropina::norm(y)));
    const double dx = central([&](const Vec& xx) { return E(xx, y); }, x, l, hx);
    rhs[l] = 0.25 * (mixed - dx);
  }
  return kropina::solve(g, rhs);
}

}  // namespace kt
