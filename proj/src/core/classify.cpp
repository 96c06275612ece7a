#include "core/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace kropina {

namespace {

std::string fmt_residual(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double max_abs_diff(const Matrix<double>& a, const Matrix<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

Matrix<double> pullback(const Matrix<double>& J, const Matrix<double>& m) { return transpose(J) * m * J; }

Vec gaussian_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vec v(n);
  for (auto& e : v) e = gauss(rng);
  return v;
}

}  // namespace

SphereKillingParams SphereKillingParams::make(std::size_t m, double K, const SkewMatrix& Q, Vec C) {
  if (m < 2) throw ValidationError("sphere Killing data needs m >= 2");
  if (!(K > 0.0) || !std::isfinite(K)) throw ValidationError("sphere Killing data needs K > 0");
  const std::size_t n = 2 * m - 1;
  if (Q.dim() != n || C.size() != n) throw ValidationError("Q and C must have dimension 2m-1");
  const double tol = 1e-10 * std::max(1.0, K);

  double r_frame = 0.0, r_orth = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double qc = 0.0;
    for (std::size_t j = 0; j < n; ++j) qc += Q(j, r) * C[j];
    r_orth = std::max(r_orth, std::abs(qc));
    for (std::size_t s = 0; s < n; ++s) {
      double v = C[r] * C[s] - (r == s ? K : 0.0);
      for (std::size_t j = 0; j < n; ++j) v += Q(j, r) * Q(j, s);
      r_frame = std::max(r_frame, std::abs(v));
    }
  }
  const double r_norm = std::abs(dot(C, C) - K);
  if (!(r_frame <= tol)) throw ValidationError("Q^T Q + C C^T = K I violated (residual " + fmt_residual(r_frame) + ")");
  if (!(r_orth <= tol)) throw ValidationError("Q^T C = 0 violated (residual " + fmt_residual(r_orth) + ")");
  if (!(r_norm <= tol)) throw ValidationError("C . C = K violated (residual " + fmt_residual(r_norm) + ")");

  Matrix<double> om(n + 1, n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    om(0, j + 1) = C[j];
    om(j + 1, 0) = -C[j];
    for (std::size_t i = 0; i < n; ++i) om(i + 1, j + 1) = -Q(i, j);
  }
  return SphereKillingParams(m, K, Q, std::move(C), SkewMatrix(std::move(om)));
}

SphereKillingParams SphereKillingParams::from_omega(std::size_t m, double K, const SkewMatrix& omega) {
  if (omega.dim() != 2 * m) throw ValidationError("Omega must have dimension 2m");
  const std::size_t n = 2 * m - 1;
  Matrix<double> q(n, n);
  Vec c(n);
  for (std::size_t j = 0; j < n; ++j) {
    c[j] = omega(0, j + 1);
    for (std::size_t i = 0; i < n; ++i) q(i, j) = -omega(i + 1, j + 1);
  }
  return make(m, K, SkewMatrix(std::move(q)), std::move(c));
}

SphereKillingParams SphereKillingParams::canonical(std::size_t m, double K) {
  if (m < 2) throw ValidationError("sphere Killing data needs m >= 2");
  if (!(K > 0.0)) throw ValidationError("sphere Killing data needs K > 0");
  const std::size_t n = 2 * m - 1;
  const double s = std::sqrt(K);
  Matrix<double> q(n, n);
  for (std::size_t k = 1; k + 1 < n + 1; k += 2) {
    q(k, k + 1) = s;
    q(k + 1, k) = -s;
  }
  Vec c(n, 0.0);
  c[0] = s;
  return make(m, K, SkewMatrix(std::move(q)), std::move(c));
}

SphereKillingParams SphereKillingParams::random_conjugate(std::size_t m, double K, std::mt19937_64& rng) {
  const SphereKillingParams seed = canonical(m, K);
  const Matrix<double> G = random_orthogonal(2 * m, rng);
  const Matrix<double> conj = transpose(G) * seed.omega().matrix() * G;
  return from_omega(m, K, SkewMatrix::antisymmetrized(conj));
}

FieldPtr euclidean_killing(Vec C) {
  if (C.empty()) throw ValidationError("C must be nonempty");
  if (!(std::abs(norm(C) - 1.0) <= 1e-12)) throw ValidationError("C must have unit length");
  return make_constant_field(std::move(C));
}

FieldPtr sphere_killing(const SphereKillingParams& p) {
  return make_sphere_killing_field(p.K(), p.Q().matrix(), p.C(), Hemisphere::east);
}

FieldPtr western_killing(const SphereKillingParams& p) {
  return make_sphere_killing_field(p.K(), p.Q().matrix(), p.C(), Hemisphere::west);
}

Vec western_extension(const SphereKillingParams& p, std::span<const double> x) {
  if (x.size() != p.dim()) throw InputError("x has wrong dimension");
  return western_killing(p)->components(x);
}

Vec sphere_killing_lowered(const SphereKillingParams& p, std::span<const double> x) {
  const std::size_t n = p.dim();
  if (x.size() != n) throw InputError("x has wrong dimension");
  const double s = 1.0 + dot(x, x);
  Vec w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = p.C()[i];
    for (std::size_t r = 0; r < n; ++r) v += p.Q()(i, r) * x[r];
    w[i] = v / (p.K() * s);
  }
  return w;
}

Matrix<double> sphere_killing_covariant(const SphereKillingParams& p, std::span<const double> x) {
  const std::size_t n = p.dim();
  if (x.size() != n) throw InputError("x has wrong dimension");
  const double s = 1.0 + dot(x, x);
  Vec P(n);  // Q_ir x^r + C_i
  for (std::size_t i = 0; i < n; ++i) {
    P[i] = p.C()[i];
    for (std::size_t r = 0; r < n; ++r) P[i] += p.Q()(i, r) * x[r];
  }
  Matrix<double> out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = (s * p.Q()(i, j) + x[i] * P[j] - x[j] * P[i]) / (p.K() * s * s);
  return out;
}

NavigationData euclidean_navigation(Vec C, double k) {
  const std::size_t n = C.size();
  return make_navigation(make_euclidean(n), euclidean_killing(std::move(C)), make_constant_scalar(n, k));
}

NavigationData cylinder_navigation(double k) {
  return make_navigation(make_cylinder(), make_constant_field({1.0, 0.0}), make_constant_scalar(2, k));
}

NavigationData torus_navigation(double k) {
  const double c = 1.0 / std::numbers::sqrt2;
  return make_navigation(make_torus(), make_constant_field({c, c}), make_constant_scalar(2, k));
}

NavigationData s3_navigation(double k) {
  return make_navigation(make_s3_chart(), make_constant_field({1.0, 1.0, 0.0}), make_constant_scalar(3, k));
}

NavigationData sphere_navigation(const SphereKillingParams& p, Hemisphere hemisphere, double k) {
  return make_navigation(make_sphere_projective(p.m(), p.K(), hemisphere),
                         hemisphere == Hemisphere::east ? sphere_killing(p) : western_killing(p),
                         make_constant_scalar(p.dim(), k));
}

CcReport cc_check(const NavigationData& nav, double K, std::size_t n_samples, std::uint64_t seed,
                  const CcTolerances& tol) {
  if (n_samples == 0) throw InputError("cc_check needs n_samples >= 1");
  CcReport rep;
  const std::vector<Vec> points = sample_points(*nav.sea, n_samples, seed);
  const KillingReport kr = killing_report(*nav.sea, *nav.wind, points);
  rep.killing_residual = kr.max_killing_residual;
  rep.unit_residual = kr.max_unit_residual;

  const std::size_t n = nav.dim();
  std::mt19937_64 plane_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  if (n >= 2) {
    for (const Vec& x : points) {
      for (int attempt = 0; attempt < 100; ++attempt) {
        const Vec u = gaussian_vec(n, plane_rng), v = gaussian_vec(n, plane_rng);
        try {
          const double sk = sectional_curvature(*nav.sea, x, u, v);
          rep.sectional_max_dev = std::max(rep.sectional_max_dev, std::abs(sk - K));
          ++rep.n_planes;
          break;
        } catch (const InputError&) {
        }
      }
    }
  }

  const ConicKropinaMetric metric(make_kropina_generator(nav_to_kropina(nav)));
  std::mt19937_64 flag_rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const auto [x, y] = sample_admissible(metric, flag_rng, 10000);
    const Vec X = sample_transverse(metric, x, y, flag_rng);
    rep.flag_max_dev = std::max(rep.flag_max_dev, std::abs(metric.flag_curvature(x, y, X) - K));
    ++rep.n_flags;
  }
  rep.is_cc = rep.killing_residual < tol.killing && rep.unit_residual < tol.killing &&
              rep.sectional_max_dev < tol.sectional && rep.n_planes > 0;
  rep.confirmed = rep.is_cc && rep.flag_max_dev < tol.flag;
  return rep;
}

SkewNormalForm moduli_normal_form(const SphereKillingParams& p) { return skew_normal_form(p.omega()); }

EuclideanModuli euclidean_moduli(std::span<const double> C) {
  const std::size_t n = C.size();
  if (n == 0 || !(std::abs(norm(C) - 1.0) <= 1e-12)) throw ValidationError("C must have unit length");
  EuclideanModuli out;
  // Householder reflection C ↦ e₁, then flip the last axis to land in SO(n).
  Vec v(C.begin(), C.end());
  v[0] -= 1.0;
  const double vv = dot(v, v);
  Matrix<double> R = Matrix<double>::identity(n);
  if (vv > 1e-30) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) R(i, j) -= 2.0 * v[i] * v[j] / vv;
    if (n >= 2)
      for (std::size_t j = 0; j < n; ++j) R(n - 1, j) = -R(n - 1, j);
  }
  out.rotation = R;
  out.representative = R * C;
  out.orthogonality_residual = max_abs_diff(transpose(R) * R, Matrix<double>::identity(n));
  // det by elimination on a copy.
  Matrix<double> a = R;
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(piv, j));
      det = -det;
    }
    det *= a(c, c);
    if (a(c, c) == 0.0) break;
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
    }
  }
  out.det = det;
  return out;
}

IsometryWitness IsometryWitness::identity(std::size_t n) {
  return affine(Matrix<double>::identity(n), Vec(n, 0.0));
}

IsometryWitness IsometryWitness::affine(Matrix<double> A, Vec c) {
  if (A.rows() != c.size() || A.cols() != c.size()) throw InputError("affine witness dimensions disagree");
  IsometryWitness w;
  w.map = [A, c](std::span<const double> x) {
    Vec y = A * x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += c[i];
    return y;
  };
  w.jacobian = [A](std::span<const double>) { return A; };
  return w;
}

IsometryReport conic_isometry_check(const IsometryWitness& witness, const KropinaPtr& kd1, const KropinaPtr& kd2,
                                    const std::vector<Vec>& points, double tol) {
  if (!witness.map || !witness.jacobian) throw InputError("witness needs a map and a Jacobian");
  if (points.empty()) throw InputError("isometry check needs at least one point");
  if (kd1->dim() != kd2->dim()) throw InputError("Kropina data dimensions disagree");
  const std::size_t n = kd1->dim();
  const NavigationData nav1 = kropina_to_nav(kd1);
  const NavigationData nav2 = kropina_to_nav(kd2);
  std::mt19937_64 rng(0x150);
  IsometryReport rep;

  for (const Vec& x : points) {
    kd1->require_valid(x);
    const Vec px = witness.map(x);
    kd2->require_valid(px);
    const Matrix<double> J = witness.jacobian(x);
    if (J.rows() != n || J.cols() != n) throw InputError("Jacobian has wrong shape");
    solve(J, Vec(n, 1.0));  // throws on a singular Jacobian

    const Matrix<double> a1 = kd1->a(x).matrix(), a2 = kd2->a(px).matrix();
    const Vec b1 = kd1->b(x), b2 = kd2->b(px);
    const double tau = std::log(kd2->b_squared(px) / kd1->b_squared(x));
    rep.tau.push_back(tau);
    if (witness.tau) rep.tau_residual = std::max(rep.tau_residual, std::abs(witness.tau(x) - tau));
    const double et = std::exp(tau);

    // (ii)
    Matrix<double> ea1 = a1;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ea1(i, j) *= et;
    const Vec pb2 = transpose(J) * b2;
    double db = 0.0;
    for (std::size_t i = 0; i < n; ++i) db = std::max(db, std::abs(pb2[i] - et * b1[i]));
    rep.pullback_residual = std::max(
        {rep.pullback_residual, max_abs_diff(pullback(J, a2), ea1) / max_abs(ea1), db / (et * max_abs(b1))});

    // (iii)
    const Matrix<double> h1 = nav1.sea->metric(x).matrix();
    const Matrix<double> h2 = nav2.sea->metric(px).matrix();
    const Vec jw1 = J * nav1.wind->components(x);
    const Vec w2 = nav2.wind->components(px);
    double dw = 0.0;
    for (std::size_t i = 0; i < n; ++i) dw = std::max(dw, std::abs(jw1[i] - w2[i]));
    rep.navigation_residual =
        std::max({rep.navigation_residual, max_abs_diff(pullback(J, h2), h1) / max_abs(h1), dw / max_abs(w2)});

    // (i) and cone preservation, on ±y for seeded y.
    for (int d = 0; d < 8; ++d) {
      Vec y = gaussian_vec(n, rng);
      const double alpha1 = std::sqrt(quad(a1, y, y));
      double beta1 = dot(b1, y);
      if (std::abs(beta1) <= 1e-6 * alpha1) continue;
      if (beta1 < 0.0) {
        for (auto& v : y) v = -v;
        beta1 = -beta1;
      }
      const Vec jy = J * y;
      const double beta2 = dot(b2, jy);
      if (!(beta2 > 0.0)) ++rep.domain_violations;  // y ∈ A₁ must land in A₂
      const double F1 = quad(a1, y, y) / beta1;
      const double F2 = quad(a2, jy, jy) / beta2;
      rep.isometry_residual = std::max(rep.isometry_residual, std::abs(F2 - F1) / F1);
      // −y lies outside A₁ and must map outside A₂.
      if (-beta2 > 0.0) ++rep.domain_violations;
    }
  }
  rep.pass_i = rep.isometry_residual < tol;
  rep.pass_ii = rep.pullback_residual < tol && (!witness.tau || rep.tau_residual < tol);
  rep.pass_iii = rep.navigation_residual < tol;
  rep.domain_preserved = rep.domain_violations == 0;
  rep.pass = rep.pass_i && rep.pass_ii && rep.pass_iii && rep.domain_preserved;
  return rep;
}

std::string to_string(Tristate t) {
  switch (t) {
    case Tristate::no: return "no";
    case Tristate::yes: return "yes";
    case Tristate::undetermined: return "undetermined";
  }
  return "undetermined";
}

ProjectiveFlatnessReport projective_flatness_decision(const NavigationData& nav, const std::vector<Vec>& points,
                                                      std::size_t n_hamel, std::uint64_t seed, double tol) {
  ProjectiveFlatnessReport rep;
  const KillingReport kr = killing_report(*nav.sea, *nav.wind, points);
  rep.parallel_residual = kr.max_parallel_residual;
  const std::size_t n = nav.dim();
  for (const Vec& x : points) {
    const Matrix<double> cd = covariant_derivative(*nav.sea, *nav.wind, x);
    const Matrix<double> h = nav.sea->metric(x).matrix();
    const Vec wu = nav.wind->components(x);
    const Vec wl = h * wu;
    Matrix<double> S(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) S(i, j) = 0.5 * (cd(i, j) - cd(j, i));
    Vec Si(n, 0.0);  // 𝚂_i = W^r 𝚂_ri
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < n; ++r) Si[i] += wu[r] * S(r, i);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        rep.s_condition_residual =
            std::max(rep.s_condition_residual, std::abs(S(i, j) - (wl[i] * Si[j] - wl[j] * Si[i])));
  }
  rep.riemann_proj_flat = nav.sea->constant_curvature() ? Tristate::yes : Tristate::undetermined;

  const ConicKropinaMetric metric(make_kropina_generator(nav_to_kropina(nav)));
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < n_hamel; ++s) {
    const auto [x, y] = sample_admissible(metric, rng, 10000);
    rep.hamel_residual = std::max(rep.hamel_residual, metric.hamel_residual(x, y));
    ++rep.n_hamel;
  }
  rep.decision = rep.parallel_residual < tol && rep.riemann_proj_flat == Tristate::yes;
  return rep;
}

}  // namespace kropina
