#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "core/conic.hpp"
#include "core/linalg.hpp"
#include "core/navigation.hpp"
#include "core/riemannian.hpp"

namespace kropina {

/// Unit Killing data on S^{2m−1} of curvature K, with Ω = [[0, Cᵀ], [−C, −Q]].
class SphereKillingParams {
 public:
  /// Throws ValidationError naming the violated identity:
  /// QᵀQ + CCᵀ = K·I, QᵀC = 0, C·C = K (each within 1e-10·max(1, K)).
  static SphereKillingParams make(std::size_t m, double K, const SkewMatrix& Q, Vec C);
  /// Reads C from the first row of Ω and Q from minus its trailing block.
  static SphereKillingParams from_omega(std::size_t m, double K, const SkewMatrix& omega);
  /// C = √K e₁, Q = √K (0 ⊕ J ⊕ … ⊕ J).
  static SphereKillingParams canonical(std::size_t m, double K);
  /// The canonical data with Ω conjugated by a seeded random orthogonal matrix.
  static SphereKillingParams random_conjugate(std::size_t m, double K, std::mt19937_64& rng);

  std::size_t m() const { return m_; }
  std::size_t dim() const { return 2 * m_ - 1; }
  double K() const { return K_; }
  const SkewMatrix& Q() const { return Q_; }
  const Vec& C() const { return C_; }
  const SkewMatrix& omega() const { return omega_; }

 private:
  SphereKillingParams(std::size_t m, double K, SkewMatrix Q, Vec C, SkewMatrix omega)
      : m_(m), K_(K), Q_(std::move(Q)), C_(std::move(C)), omega_(std::move(omega)) {}

  std::size_t m_;
  double K_;
  SkewMatrix Q_;
  Vec C_;
  SkewMatrix omega_;
};

/// Constant unit field on E^n. Throws ValidationError unless ||C| − 1| ≤ 1e-12.
FieldPtr euclidean_killing(Vec C);
/// Eastern-chart field W = Qx + C + (x·C)x.
FieldPtr sphere_killing(const SphereKillingParams& p);
/// Western-chart field W = Qx − C − (x·C)x.
FieldPtr western_killing(const SphereKillingParams& p);
Vec western_extension(const SphereKillingParams& p, std::span<const double> x);
/// W_i = (Q_ir x^r + C_i) / (K(1 + x·x)).
Vec sphere_killing_lowered(const SphereKillingParams& p, std::span<const double> x);
/// Closed form of W_{i||j} for the eastern field.
Matrix<double> sphere_killing_covariant(const SphereKillingParams& p, std::span<const double> x);

// Catalog navigation data; k is the constant conformal exponent.
NavigationData euclidean_navigation(Vec C, double k = 0.0);
NavigationData cylinder_navigation(double k = 0.0);
NavigationData torus_navigation(double k = 0.0);
NavigationData s3_navigation(double k = 0.0);
NavigationData sphere_navigation(const SphereKillingParams& p, Hemisphere hemisphere = Hemisphere::east,
                                 double k = 0.0);

struct CcTolerances {
  double killing = 1e-8;
  double sectional = 1e-4;
  double flag = 1e-3;
};

struct CcReport {
  double killing_residual = 0.0;
  double unit_residual = 0.0;
  double sectional_max_dev = 0.0;
  double flag_max_dev = 0.0;
  std::size_t n_planes = 0;
  std::size_t n_flags = 0;
  bool is_cc = false;     // Killing, unit, and sectional curvature K
  bool confirmed = false; // is_cc and flag curvature K
};

/// Residuals over n_samples seeded points, planes and admissible flags. Throws
/// SamplingError when an admissible flag cannot be found in 10⁴ tries.
CcReport cc_check(const NavigationData& nav, double K, std::size_t n_samples, std::uint64_t seed,
                  const CcTolerances& tol = {});

/// skew_normal_form of Ω; every block is √K for valid params.
SkewNormalForm moduli_normal_form(const SphereKillingParams& p);

struct EuclideanModuli {
  Matrix<double> rotation;  // R ∈ SO(n) with R C = e₁
  Vec representative;       // R C
  double orthogonality_residual = 0.0;
  double det = 0.0;
};

EuclideanModuli euclidean_moduli(std::span<const double> C);

struct IsometryWitness {
  std::function<Vec(std::span<const double>)> map;
  std::function<Matrix<double>(std::span<const double>)> jacobian;
  /// Optional claimed τ; compared against log(φ*(b₂²)/b₁²) when present.
  std::function<double(std::span<const double>)> tau;

  static IsometryWitness identity(std::size_t n);
  /// φ(x) = A x + c.
  static IsometryWitness affine(Matrix<double> A, Vec c);
};

struct IsometryReport {
  double isometry_residual = 0.0;  // (i)  max |F₂(φx, Dφ y) − F₁(x, y)| / F₁(x, y)
  double pullback_residual = 0.0;  // (ii) φ*a₂ = e^τ a₁, φ*b₂ = e^τ b₁
  double navigation_residual = 0.0;// (iii) φ*h₂ = h₁, φ_*W₁ = W₂
  double tau_residual = 0.0;       // claimed τ against the computed one
  std::size_t domain_violations = 0;
  bool pass_i = false, pass_ii = false, pass_iii = false;
  bool domain_preserved = false;
  bool pass = false;
  std::vector<double> tau;         // computed τ at each sample point
};

/// Verifies the witness on the sample points with 8 seeded directions per point.
/// Throws InputError when the Jacobian is singular at a sample point.
IsometryReport conic_isometry_check(const IsometryWitness& witness, const KropinaPtr& kd1, const KropinaPtr& kd2,
                                    const std::vector<Vec>& points, double tol = 1e-8);

enum class Tristate { no, yes, undetermined };
std::string to_string(Tristate t);

struct ProjectiveFlatnessReport {
  double parallel_residual = 0.0;
  Tristate riemann_proj_flat = Tristate::undetermined;
  double s_condition_residual = 0.0;
  double hamel_residual = 0.0;  // max over seeded admissible samples
  std::size_t n_hamel = 0;
  bool decision = false;
};

/// Decision = (parallel residual < tol) and the base is projectively flat, which is
/// taken as known only for constant-curvature catalog bases.
ProjectiveFlatnessReport projective_flatness_decision(const NavigationData& nav, const std::vector<Vec>& points,
                                                      std::size_t n_hamel, std::uint64_t seed, double tol = 1e-8);

}  // namespace kropina
