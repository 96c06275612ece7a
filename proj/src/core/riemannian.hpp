#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "core/jet.hpp"
#include "core/linalg.hpp"
#include "core/tensor.hpp"

namespace kropina {

enum class Hemisphere { east, west };

/// A single chart carrying a Riemannian metric h_ij(x) with analytic partials.
class RiemannianModel : public JetSource<MetricJet> {
 public:
  virtual std::size_t dim() const = 0;
  /// Catalog tag: euclidean, sphere_projective, s3_chart, cylinder, torus.
  virtual std::string tag() const = 0;
  virtual bool valid(std::span<const double> x) const = 0;
  /// Draws a point from a fixed compact part of the validity region.
  virtual Vec sample_point(std::mt19937_64& rng) const = 0;
  /// Sectional curvature when the model is a space form.
  virtual std::optional<double> constant_curvature() const = 0;

  SymMatrix metric(std::span<const double> x) const;
  std::vector<Matrix<double>> metric_dx(std::span<const double> x) const;
  /// Throws DomainError unless x is a finite point of the chart of the right size.
  void require_valid(std::span<const double> x) const;
};

/// Vector field W^i(x) with analytic partials.
class VectorFieldModel : public JetSource<FieldJet> {
 public:
  virtual std::size_t dim() const = 0;
  Vec components(std::span<const double> x) const;
  Matrix<double> components_dx(std::span<const double> x) const;
};

/// Scalar function on a chart (the conformal exponent k).
class ScalarFieldModel : public JetSource<ScalarJet> {
 public:
  virtual std::size_t dim() const = 0;
};

using ModelPtr = std::shared_ptr<const RiemannianModel>;
using FieldPtr = std::shared_ptr<const VectorFieldModel>;
using ScalarPtr = std::shared_ptr<const ScalarFieldModel>;

// Catalog.
ModelPtr make_euclidean(std::size_t n);
/// Flat (θ, k) chart of the cylinder.
ModelPtr make_cylinder();
/// Flat angular chart of the torus.
ModelPtr make_torus();
/// S³ in coordinates h = cos²u³ (du¹)² + sin²u³ (du²)² + (du³)², 1e-6 < u³ < π/2 − 1e-6.
ModelPtr make_s3_chart();
/// Projective chart of the round sphere S^{2m−1} of curvature K, h = (1/K)·(standard chart metric).
ModelPtr make_sphere_projective(std::size_t m, double K, Hemisphere hemisphere);

FieldPtr make_constant_field(Vec c);
/// W = Q x + σ(C + (x·C) x) with σ = +1 on the eastern chart and −1 on the western one.
FieldPtr make_sphere_killing_field(double K, Matrix<double> Q, Vec C, Hemisphere hemisphere);

ScalarPtr make_constant_scalar(std::size_t n, double value);

/// Levi-Civita symbols γ^i_jk, indexed (i, j, k); symmetric in (j, k) exactly.
Tensor3 christoffel(const RiemannianModel& model, std::span<const double> x);

/// Lowered covariant derivative, entry (i, j) = W_{i||j}.
Matrix<double> covariant_derivative(const RiemannianModel& model, const VectorFieldModel& field,
                                    std::span<const double> x);

struct KillingReport {
  double max_killing_residual = 0.0;
  double max_unit_residual = 0.0;
  double max_parallel_residual = 0.0;
  std::vector<Vec> sample_points;
};

KillingReport killing_report(const RiemannianModel& model, const VectorFieldModel& field,
                             const std::vector<Vec>& points);

/// R^i_jkl, indexed (i, j, k, l), with R(∂_k, ∂_l)∂_j = R^i_jkl ∂_i. The x-derivatives
/// of the Christoffel symbols are central differences with step 1e-4·(1+|x|).
Tensor4 riemann_tensor(const RiemannianModel& model, std::span<const double> x);

/// ⟨R(u,v)v,u⟩ / (|u|²|v|² − ⟨u,v⟩²). Throws InputError when the denominator is below 1e-12.
double sectional_curvature(const RiemannianModel& model, std::span<const double> x,
                           std::span<const double> u, std::span<const double> v);

/// max |∇_k h_ij| at x.
double metric_compatibility_residual(const RiemannianModel& model, std::span<const double> x);

/// max_i |(∇_W W)^i|: how far the integral curve of W through x is from a geodesic.
double integral_curve_geodesic_residual(const RiemannianModel& model, const VectorFieldModel& field,
                                        std::span<const double> x);

/// Normwise relative gap between analytic partials and central differences.
double metric_dx_consistency(const RiemannianModel& model, std::span<const double> x);
double field_dx_consistency(const VectorFieldModel& field, std::span<const double> x);

std::vector<Vec> sample_points(const RiemannianModel& model, std::size_t count, std::uint64_t seed);

}  // namespace kropina
