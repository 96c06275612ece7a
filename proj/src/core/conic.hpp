#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/jet.hpp"
#include "core/navigation.hpp"
#include "core/riemannian.hpp"
#include "core/tensor.hpp"

namespace kropina {

/// F, g_ij and ∂g_ij/∂x^l at one (x, y); dg[l](i, j) = ∂_{x^l} g_ij at fixed y.
template <class T>
struct FiberJet {
  T F{};
  Matrix<T> g;
  std::vector<Matrix<T>> dg;
};

/// A conic norm F(x, y) with its fundamental tensor, evaluable at every scalar type the
/// curvature pipeline differentiates through.
class ConicGenerator {
 public:
  virtual ~ConicGenerator() = default;
  virtual std::size_t dim() const = 0;
  virtual std::string tag() const = 0;
  virtual bool chart_valid(std::span<const double> x) const = 0;
  virtual Vec sample_point(std::mt19937_64& rng) const = 0;
  /// Scale-free distance of y from the cone boundary (β/α for Kropina, +∞ when the
  /// domain is the whole punctured tangent space).
  virtual double domain_margin(std::span<const double> x, std::span<const double> y) const = 0;

  virtual FiberJet<double> fiber(std::span<const double> x, std::span<const double> y) const = 0;
  virtual FiberJet<D1> fiber(std::span<const D1> x, std::span<const D1> y) const = 0;
  virtual FiberJet<D2> fiber(std::span<const D2> x, std::span<const D2> y) const = 0;
  virtual FiberJet<D3> fiber(std::span<const D3> x, std::span<const D3> y) const = 0;
  virtual double F_value(std::span<const double> x, std::span<const double> y) const = 0;
  virtual D1 F_value(std::span<const D1> x, std::span<const D1> y) const = 0;
};

using GeneratorPtr = std::shared_ptr<const ConicGenerator>;

/// F = α²/β on the cone β > 0.
GeneratorPtr make_kropina_generator(KropinaPtr kd);
/// F = √(h_ij y^i y^j) on the whole tangent space, for checking the pipeline itself.
GeneratorPtr make_quadratic_generator(ModelPtr model);

/// Closed-form Kropina fundamental tensor from a, b, y.
template <class U>
Matrix<U> kropina_fundamental(const Matrix<U>& a, const std::vector<U>& b, std::span<const U> y) {
  const std::size_t n = b.size();
  const std::vector<U> a0 = a * y;
  const U alpha2 = dot(std::span<const U>(a0), y);
  const U beta = dot(std::span<const U>(b), y);
  const U ib = 1.0 / beta;
  const U c1 = 2.0 * alpha2 * ib * ib;
  const U c2 = 3.0 * alpha2 * alpha2 * ib * ib * ib * ib;
  const U c3 = 4.0 * alpha2 * ib * ib * ib;
  const U c4 = 4.0 * ib * ib;
  Matrix<U> g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      g(i, j) = c1 * a(i, j) + c2 * b[i] * b[j] - c3 * (a0[i] * b[j] + a0[j] * b[i]) + c4 * a0[i] * a0[j];
      g(j, i) = g(i, j);
    }
  return g;
}

/// Spray coefficients G^i = ¼ g^{is}(2 y^j y^k ∂_k g_sj − y^j y^k ∂_s g_jk).
template <class T>
std::vector<T> spray_from_fiber(const FiberJet<T>& f, std::span<const T> y) {
  const std::size_t n = y.size();
  const Matrix<T> ginv = spd_inverse(f.g);
  std::vector<T> t(n, T(0.0));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) t[s] += y[j] * y[k] * (2.0 * f.dg[k](s, j) - f.dg[s](j, k));
  std::vector<T> G(n, T(0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < n; ++s) G[i] += 0.25 * ginv(i, s) * t[s];
  return G;
}

struct FdConfig {
  double step_x = 1e-4;  // scaled by 1 + |x|
  double step_y = 1e-5;  // scaled by 1 + |y|
  bool richardson = false;
};

inline constexpr double kDomainEpsilon = 1e-10;
inline constexpr double kCurvatureMargin = 1e-6;

struct CurvatureTensors {
  Vec G;              // G^i
  Matrix<double> N;   // N^i_j, entry (i, j)
  Tensor3 Gamma;      // Γ^i_jk, entry (i, j, k)
  Tensor4 R;          // R_j^i_kl, entry (j, i, k, l)
};

struct FlagFrame {
  Vec x, y, X;
  double F = 0.0;
  Vec l_lower;             // l_i = ∂F/∂y^i
  Vec l_upper;             // l^i = y^i / F
  Matrix<double> angular;  // h^i_l = δ^i_l − l^i l_l
};

struct ScalarFlagResidual {
  double residual = 0.0;        // max |R_0^i_0l − K F² h^i_l|
  double reference_norm = 0.0;  // max |K F² h^i_l|
};

class ConicKropinaMetric {
 public:
  explicit ConicKropinaMetric(GeneratorPtr gen, FdConfig fd = {});

  const ConicGenerator& generator() const { return *gen_; }
  const FdConfig& fd_config() const { return fd_; }
  std::size_t dim() const { return gen_->dim(); }

  /// Throws DomainError (chart) or InputError (shape, non-finite) on bad x.
  void require_chart(std::span<const double> x) const;
  /// β > 1e-10·|y|_a; x must lie in the chart.
  bool domain_contains(std::span<const double> x, std::span<const double> y) const;
  double margin(std::span<const double> x, std::span<const double> y) const;

  double F(std::span<const double> x, std::span<const double> y) const;
  SymMatrix fundamental_tensor(std::span<const double> x, std::span<const double> y) const;
  /// G^i through the Christoffel symbols of g_y.
  Vec spray(std::span<const double> x, std::span<const double> y) const;
  /// G^i through ¼ g^{il}(y^m ∂²F²/∂y^l∂x^m − ∂F²/∂x^l), x-derivatives by central differences.
  Vec spray_energy_route(std::span<const double> x, std::span<const double> y) const;

  /// Requires margin > 1e-6, else NearBoundaryError.
  CurvatureTensors curvature_tensors(std::span<const double> x, std::span<const double> y) const;

  FlagFrame make_flag_frame(std::span<const double> x, std::span<const double> y, std::span<const double> X) const;
  /// g_ir X^i R_h^r_jk y^h y^j X^k / (F² g(X,X) − g(y,X)²). Throws DegenerateError when the
  /// denominator is ≤ 1e-10·F² g(X,X).
  double flag_curvature(const FlagFrame& frame) const;
  double flag_curvature(std::span<const double> x, std::span<const double> y, std::span<const double> X) const {
    return flag_curvature(make_flag_frame(x, y, X));
  }
  ScalarFlagResidual scalar_flag_residual(std::span<const double> x, std::span<const double> y, double K) const;
  /// max_j |F_{x^r y^j} y^r − F_{x^j}|, all derivatives by central differences.
  double hamel_residual(std::span<const double> x, std::span<const double> y) const;

 private:
  void require_vector(std::span<const double> y) const;
  void require_inside(std::span<const double> x, std::span<const double> y) const;
  void require_margin(std::span<const double> x, std::span<const double> y) const;

  GeneratorPtr gen_;
  FdConfig fd_;
};

/// Minimum margin for randomly drawn admissible directions.
inline constexpr double kSampleMargin = 1e-2;

/// Draws (x, y) with y in the cone at margin ≥ 1e-2. Throws SamplingError after `max_tries`.
std::pair<Vec, Vec> sample_admissible(const ConicKropinaMetric& metric, std::mt19937_64& rng,
                                      std::size_t max_tries = 10000);

/// Draws a direction X at x that is not g_y-parallel to y.
Vec sample_transverse(const ConicKropinaMetric& metric, std::span<const double> x, std::span<const double> y,
                      std::mt19937_64& rng);

}  // namespace kropina
