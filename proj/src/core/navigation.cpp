#include "core/navigation.hpp"

#include <cmath>
#include <utility>

namespace kropina {

namespace {

class NavKropina final : public JetImpl<NavKropina, KropinaData, KropinaJet> {
 public:
  explicit NavKropina(NavigationData nav) : nav_(std::move(nav)) {}

  std::size_t dim() const override { return nav_.dim(); }
  std::string tag() const override { return nav_.sea->tag(); }
  bool valid(std::span<const double> x) const override { return nav_.sea->valid(x); }
  Vec sample_point(std::mt19937_64& rng) const override { return nav_.sea->sample_point(rng); }
  std::optional<double> sea_constant_curvature() const override { return nav_.sea->constant_curvature(); }

  template <class T>
  KropinaJet<T> compute(std::span<const T> x) const {
    using std::exp;
    const std::size_t n = x.size();
    const MetricJet<T> mj = nav_.sea->jet(x);
    const FieldJet<T> fj = nav_.wind->jet(x);
    const ScalarJet<T> kj = nav_.exponent->jet(x);
    const T e = exp(-kj.value);

    std::vector<T> wl(n, T(0.0));
    Matrix<T> dwl(n, n);  // ∂_k W_i
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < n; ++r) {
        wl[i] += mj.h(i, r) * fj.w[r];
        for (std::size_t k = 0; k < n; ++k) dwl(i, k) += mj.dh[k](i, r) * fj.w[r] + mj.h(i, r) * fj.dw(r, k);
      }

    KropinaJet<T> out{Matrix<T>(n, n), std::vector<Matrix<T>>(n, Matrix<T>(n, n)), std::vector<T>(n, T(0.0)),
                      Matrix<T>(n, n)};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        out.a(i, j) = e * mj.h(i, j);
        for (std::size_t k = 0; k < n; ++k) out.da[k](i, j) = e * (mj.dh[k](i, j) - kj.grad[k] * mj.h(i, j));
      }
    for (std::size_t i = 0; i < n; ++i) {
      out.b[i] = 2.0 * e * wl[i];
      for (std::size_t k = 0; k < n; ++k) out.db(i, k) = 2.0 * e * (dwl(i, k) - kj.grad[k] * wl[i]);
    }
    return out;
  }

 private:
  NavigationData nav_;
};

class ConstantKropina final : public JetImpl<ConstantKropina, KropinaData, KropinaJet> {
 public:
  ConstantKropina(Matrix<double> a, Vec b) : a_(std::move(a)), b_(std::move(b)) {}

  std::size_t dim() const override { return b_.size(); }
  std::string tag() const override { return "constant"; }
  bool valid(std::span<const double> x) const override {
    for (double v : x)
      if (!std::isfinite(v)) return false;
    return true;
  }
  Vec sample_point(std::mt19937_64& rng) const override {
    Vec x(dim());
    for (auto& v : x) v = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    return x;
  }
  std::optional<double> sea_constant_curvature() const override { return 0.0; }

  template <class T>
  KropinaJet<T> compute(std::span<const T> x) const {
    const std::size_t n = x.size();
    KropinaJet<T> out{Matrix<T>(n, n), std::vector<Matrix<T>>(n, Matrix<T>(n, n)), std::vector<T>(n, T(0.0)),
                      Matrix<T>(n, n)};
    for (std::size_t i = 0; i < n; ++i) {
      out.b[i] = T(b_[i]);
      for (std::size_t j = 0; j < n; ++j) out.a(i, j) = T(a_(i, j));
    }
    return out;
  }

 private:
  Matrix<double> a_;
  Vec b_;
};

/// Pieces of the inverse conversion shared by the sea metric and the wind.
template <class T>
struct InverseParts {
  std::vector<T> bu;   // a^{ij} b_j
  Matrix<T> dbu;       // ∂_k bu^i
  T b2{};              // b²
  std::vector<T> db2;  // ∂_k b²
};

template <class T>
InverseParts<T> inverse_parts(const KropinaJet<T>& kj) {
  const std::size_t n = kj.b.size();
  const Matrix<T> ainv = spd_inverse(kj.a);
  InverseParts<T> p{ainv * kj.b, Matrix<T>(n, n), T(0.0), std::vector<T>(n, T(0.0))};
  p.b2 = dot(kj.b, p.bu);
  for (std::size_t k = 0; k < n; ++k) {
    // ∂_k bu = a⁻¹(∂_k b − ∂_k a · bu)
    std::vector<T> rhs(n, T(0.0));
    for (std::size_t j = 0; j < n; ++j) {
      rhs[j] = kj.db(j, k);
      for (std::size_t l = 0; l < n; ++l) rhs[j] -= kj.da[k](j, l) * p.bu[l];
    }
    const std::vector<T> d = ainv * rhs;
    for (std::size_t i = 0; i < n; ++i) p.dbu(i, k) = d[i];
    T s(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      s += 2.0 * p.bu[i] * kj.db(i, k);
      for (std::size_t l = 0; l < n; ++l) s -= p.bu[i] * kj.da[k](i, l) * p.bu[l];
    }
    p.db2[k] = s;
  }
  return p;
}

class KropinaSea final : public JetImpl<KropinaSea, RiemannianModel, MetricJet> {
 public:
  explicit KropinaSea(KropinaPtr kd) : kd_(std::move(kd)) {}
  std::size_t dim() const override { return kd_->dim(); }
  std::string tag() const override { return kd_->tag(); }
  bool valid(std::span<const double> x) const override { return kd_->valid(x); }
  Vec sample_point(std::mt19937_64& rng) const override { return kd_->sample_point(rng); }
  std::optional<double> constant_curvature() const override { return kd_->sea_constant_curvature(); }

  template <class T>
  MetricJet<T> compute(std::span<const T> x) const {
    const std::size_t n = x.size();
    const KropinaJet<T> kj = kd_->jet(x);
    const InverseParts<T> p = inverse_parts(kj);
    const T f = 4.0 / p.b2;
    MetricJet<T> out{Matrix<T>(n, n), std::vector<Matrix<T>>(n, Matrix<T>(n, n))};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        out.h(i, j) = f * kj.a(i, j);
        for (std::size_t k = 0; k < n; ++k) out.dh[k](i, j) = f * (kj.da[k](i, j) - p.db2[k] / p.b2 * kj.a(i, j));
      }
    return out;
  }

 private:
  KropinaPtr kd_;
};

class KropinaWind final : public JetImpl<KropinaWind, VectorFieldModel, FieldJet> {
 public:
  explicit KropinaWind(KropinaPtr kd) : kd_(std::move(kd)) {}
  std::size_t dim() const override { return kd_->dim(); }

  template <class T>
  FieldJet<T> compute(std::span<const T> x) const {
    const std::size_t n = x.size();
    const InverseParts<T> p = inverse_parts(kd_->jet(x));
    FieldJet<T> out{std::vector<T>(n, T(0.0)), Matrix<T>(n, n)};
    for (std::size_t i = 0; i < n; ++i) {
      out.w[i] = 0.5 * p.bu[i];
      for (std::size_t k = 0; k < n; ++k) out.dw(i, k) = 0.5 * p.dbu(i, k);
    }
    return out;
  }

 private:
  KropinaPtr kd_;
};

class KropinaExponent final : public JetImpl<KropinaExponent, ScalarFieldModel, ScalarJet> {
 public:
  explicit KropinaExponent(KropinaPtr kd) : kd_(std::move(kd)) {}
  std::size_t dim() const override { return kd_->dim(); }

  template <class T>
  ScalarJet<T> compute(std::span<const T> x) const {
    using std::log;
    const std::size_t n = x.size();
    const InverseParts<T> p = inverse_parts(kd_->jet(x));
    ScalarJet<T> out{log(4.0 / p.b2), std::vector<T>(n, T(0.0))};
    for (std::size_t k = 0; k < n; ++k) out.grad[k] = -(p.db2[k] / p.b2);
    return out;
  }

 private:
  KropinaPtr kd_;
};

std::vector<Vec> validation_points(const RiemannianModel& model) {
  return sample_points(model, kValidationSamples, kValidationSeed);
}

}  // namespace

NavigationData make_navigation(ModelPtr sea, FieldPtr wind, ScalarPtr exponent) {
  if (!sea || !wind) throw InputError("navigation data needs a sea metric and a wind");
  if (!exponent) exponent = make_constant_scalar(sea->dim(), 0.0);
  if (wind->dim() != sea->dim() || exponent->dim() != sea->dim())
    throw InputError("navigation data dimensions disagree");
  return {std::move(sea), std::move(wind), std::move(exponent)};
}

double wind_unit_residual(const NavigationData& nav, const std::vector<Vec>& points) {
  double worst = 0.0;
  for (const Vec& x : points) {
    nav.sea->require_valid(x);
    const Vec w = nav.wind->components(x);
    worst = std::max(worst, std::abs(quad(nav.sea->metric(x).matrix(), w, w) - 1.0));
  }
  return worst;
}

void KropinaData::require_valid(std::span<const double> x) const {
  if (x.size() != dim()) throw InputError("point has wrong dimension");
  if (!valid(x)) throw DomainError("point outside the validity region of the " + tag() + " chart");
}

SymMatrix KropinaData::a(std::span<const double> x) const {
  require_valid(x);
  return SymMatrix::symmetrized(jet(x).a);
}

Vec KropinaData::b(std::span<const double> x) const {
  require_valid(x);
  return jet(x).b;
}

double KropinaData::b_squared(std::span<const double> x) const {
  require_valid(x);
  const auto kj = jet(x);
  return dot(kj.b, solve(kj.a, kj.b));
}

KropinaPtr make_constant_kropina(const SymMatrix& a, Vec b) {
  if (a.dim() != b.size()) throw InputError("a and b dimensions disagree");
  for (double v : b)
    if (!std::isfinite(v)) throw InputError("b has non-finite entries");
  if (!cholesky_pd(a)) throw ValidationError("a is not positive definite");
  return std::make_shared<ConstantKropina>(a.matrix(), std::move(b));
}

KropinaPtr nav_to_kropina(const NavigationData& nav) {
  const double res = wind_unit_residual(nav, validation_points(*nav.sea));
  if (res > 1e-6) throw ValidationError("wind is not of unit length: max |h(W,W) - 1| = " + std::to_string(res));
  return std::make_shared<NavKropina>(nav);
}

NavigationData kropina_to_nav(KropinaPtr kd) {
  if (!kd) throw InputError("null Kropina data");
  std::mt19937_64 rng(kValidationSeed);
  for (std::size_t s = 0; s < kValidationSamples; ++s) {
    const Vec x = kd->sample_point(rng);
    if (!kd->valid(x)) continue;
    if (!cholesky_pd(kd->a(x))) throw ValidationError("a is not positive definite at a sample point");
    if (!(kd->b_squared(x) > 0.0)) throw ValidationError("b^2 <= 0 at a sample point");
  }
  auto sea = std::make_shared<KropinaSea>(kd);
  auto wind = std::make_shared<KropinaWind>(kd);
  auto k = std::make_shared<KropinaExponent>(kd);
  return make_navigation(std::move(sea), std::move(wind), std::move(k));
}

double nav_F(const NavigationData& nav, std::span<const double> x, std::span<const double> y) {
  nav.sea->require_valid(x);
  if (y.size() != nav.dim()) throw InputError("y has wrong dimension");
  const Matrix<double> h = nav.sea->metric(x).matrix();
  const Vec w = nav.wind->components(x);
  const double hyw = quad(h, y, std::span<const double>(w));
  if (!(hyw > 0.0)) throw OutsideConeError("h(y, W) <= 0: y is outside the conic domain");
  return quad(h, y, y) / (2.0 * hyw);
}

std::optional<IndicatrixSample> indicatrix_point(const NavigationData& nav, std::span<const double> x,
                                                 std::span<const double> u) {
  nav.sea->require_valid(x);
  const std::size_t n = nav.dim();
  if (u.size() != n) throw InputError("u has wrong dimension");
  const Matrix<double> h = nav.sea->metric(x).matrix();
  const Vec w = nav.wind->components(x);
  if (1.0 + quad(h, u, std::span<const double>(w)) <= 1e-4) return std::nullopt;
  IndicatrixSample s;
  s.u.assign(u.begin(), u.end());
  s.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.y[i] = w[i] + u[i];
  s.F = nav_F(nav, x, s.y);
  Vec d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = s.y[i] - w[i];
  s.dist = std::sqrt(quad(h, d, d));
  return s;
}

std::vector<IndicatrixSample> indicatrix_samples(const NavigationData& nav, std::span<const double> x,
                                                 std::size_t count, std::uint64_t seed) {
  nav.sea->require_valid(x);
  const std::size_t n = nav.dim();
  const Matrix<double> l = cholesky_factor(nav.sea->metric(x).matrix());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<IndicatrixSample> out;
  out.reserve(count);
  const std::size_t max_tries = 10000 * count;
  for (std::size_t tries = 0; out.size() < count; ++tries) {
    if (tries >= max_tries) throw SamplingError("indicatrix sampler found too few admissible directions");
    Vec z(n);
    for (auto& v : z) v = gauss(rng);
    const double zn = norm(z);
    if (zn == 0.0) continue;
    // Solve Lᵀ u = z / |z| so that uᵀ h u = 1.
    Vec u(n);
    for (std::size_t i = n; i-- > 0;) {
      double s = z[i] / zn;
      for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * u[k];
      u[i] = s / l(i, i);
    }
    if (auto p = indicatrix_point(nav, x, u)) out.push_back(std::move(*p));
  }
  return out;
}

}  // namespace kropina
