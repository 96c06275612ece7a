#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "core/jet.hpp"
#include "core/riemannian.hpp"

namespace kropina {

/// Zermelo navigation data: sea metric h, wind W with |W|_h = 1, conformal exponent k.
struct NavigationData {
  ModelPtr sea;
  FieldPtr wind;
  ScalarPtr exponent;

  std::size_t dim() const { return sea->dim(); }
};

/// Bundles the three parts, with k ≡ 0 when `exponent` is null. Checks dimensions only.
NavigationData make_navigation(ModelPtr sea, FieldPtr wind, ScalarPtr exponent = nullptr);

/// max |h(W,W) − 1| over the points.
double wind_unit_residual(const NavigationData& nav, const std::vector<Vec>& points);

/// Kropina data a_ij(x), b_i(x) with analytic partials, on the chart of some base model.
class KropinaData : public JetSource<KropinaJet> {
 public:
  virtual std::size_t dim() const = 0;
  virtual std::string tag() const = 0;
  virtual bool valid(std::span<const double> x) const = 0;
  virtual Vec sample_point(std::mt19937_64& rng) const = 0;
  /// Sectional curvature of the associated sea metric when it is a space form.
  virtual std::optional<double> sea_constant_curvature() const = 0;

  void require_valid(std::span<const double> x) const;
  SymMatrix a(std::span<const double> x) const;
  Vec b(std::span<const double> x) const;
  /// b² = a^{ij} b_i b_j.
  double b_squared(std::span<const double> x) const;
};

using KropinaPtr = std::shared_ptr<const KropinaData>;

/// Constant (a, b) on the flat chart R^n.
KropinaPtr make_constant_kropina(const SymMatrix& a, Vec b);

/// Number of seeded chart points used when validating conversions.
inline constexpr std::size_t kValidationSamples = 32;
inline constexpr std::uint64_t kValidationSeed = 0x6b726f70u;

/// a = e^{−k} h, b_i = 2 e^{−k} W_i. Throws ValidationError when |h(W,W) − 1| > 1e-6
/// at a validation sample point.
KropinaPtr nav_to_kropina(const NavigationData& nav);

/// h = e^{k} a, W_i = ½ e^{k} b_i, k = log(4/b²). Throws ValidationError when b² ≤ 0 or
/// a is not positive definite at a validation sample point.
NavigationData kropina_to_nav(KropinaPtr kd);

/// |y|²_h / (2 h(y,W)). Throws OutsideConeError when h(y,W) ≤ 0.
double nav_F(const NavigationData& nav, std::span<const double> x, std::span<const double> y);

struct IndicatrixSample {
  Vec u;              // h-unit direction
  Vec y;              // W + u
  double F = 0.0;     // F(x, y)
  double dist = 0.0;  // |y − W|_h
};

/// The indicatrix point W + u for an h-unit u, or nullopt when 1 + h(u,W) ≤ 1e-4
/// (the upwind cap, where y collapses toward the origin).
std::optional<IndicatrixSample> indicatrix_point(const NavigationData& nav, std::span<const double> x,
                                                 std::span<const double> u);

/// `count` indicatrix points from seeded h-uniform directions.
std::vector<IndicatrixSample> indicatrix_samples(const NavigationData& nav, std::span<const double> x,
                                                 std::size_t count, std::uint64_t seed);

}  // namespace kropina
