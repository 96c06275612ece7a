#include "core/riemannian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace kropina {

namespace {

template <class T>
MetricJet<T> empty_metric_jet(std::size_t n) {
  return {Matrix<T>(n, n), std::vector<Matrix<T>>(n, Matrix<T>(n, n))};
}

class FlatModel final : public JetImpl<FlatModel, RiemannianModel, MetricJet> {
 public:
  FlatModel(std::string tag, Vec lower, Vec upper)
      : tag_(std::move(tag)), lower_(std::move(lower)), upper_(std::move(upper)) {}

  std::size_t dim() const override { return lower_.size(); }
  std::string tag() const override { return tag_; }
  bool valid(std::span<const double> x) const override {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
  }
  Vec sample_point(std::mt19937_64& rng) const override {
    Vec x(dim());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::uniform_real_distribution<double>(lower_[i], upper_[i])(rng);
    return x;
  }
  std::optional<double> constant_curvature() const override { return 0.0; }

  template <class T>
  MetricJet<T> compute(std::span<const T> x) const {
    auto j = empty_metric_jet<T>(x.size());
    j.h = Matrix<T>::identity(x.size());
    return j;
  }

 private:
  std::string tag_;
  Vec lower_, upper_;
};

class SphereProjectiveModel final : public JetImpl<SphereProjectiveModel, RiemannianModel, MetricJet> {
 public:
  SphereProjectiveModel(std::size_t m, double K, Hemisphere hemisphere) : n_(2 * m - 1), K_(K), hemisphere_(hemisphere) {}

  std::size_t dim() const override { return n_; }
  std::string tag() const override { return "sphere_projective"; }
  bool valid(std::span<const double> x) const override {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
  }
  Vec sample_point(std::mt19937_64& rng) const override {
    Vec x(n_);
    for (auto& v : x) v = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    return x;
  }
  std::optional<double> constant_curvature() const override { return K_; }
  Hemisphere hemisphere() const { return hemisphere_; }

  template <class T>
  MetricJet<T> compute(std::span<const T> x) const {
    const std::size_t n = x.size();
    T s(1.0);
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    const T s2 = s * s;
    const T s3 = s2 * s;
    const double ik = 1.0 / K_;
    auto j = empty_metric_jet<T>(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        T v = -(x[a] * x[b]) / s2;
        if (a == b) v += 1.0 / s;
        j.h(a, b) = ik * v;
        j.h(b, a) = j.h(a, b);
      }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
          T v = 4.0 * x[a] * x[b] * x[k] / s3;
          if (a == b) v -= 2.0 * x[k] / s2;
          if (a == k) v -= x[b] / s2;
          if (b == k) v -= x[a] / s2;
          j.dh[k](a, b) = ik * v;
          j.dh[k](b, a) = j.dh[k](a, b);
        }
    return j;
  }

 private:
  std::size_t n_;
  double K_;
  Hemisphere hemisphere_;
};

constexpr double kS3Margin = 1e-6;

class S3ChartModel final : public JetImpl<S3ChartModel, RiemannianModel, MetricJet> {
 public:
  std::size_t dim() const override { return 3; }
  std::string tag() const override { return "s3_chart"; }
  bool valid(std::span<const double> x) const override {
    if (x.size() != 3 || !std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) return false;
    return x[2] > kS3Margin && x[2] < std::numbers::pi / 2 - kS3Margin;
  }
  Vec sample_point(std::mt19937_64& rng) const override {
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> polar(0.1, std::numbers::pi / 2 - 0.1);
    Vec x(3);
    x[0] = angle(rng);
    x[1] = angle(rng);
    x[2] = polar(rng);
    return x;
  }
  std::optional<double> constant_curvature() const override { return 1.0; }

  template <class T>
  MetricJet<T> compute(std::span<const T> x) const {
    using std::cos;
    using std::sin;
    const T c = cos(x[2]);
    const T s = sin(x[2]);
    auto j = empty_metric_jet<T>(3);
    j.h(0, 0) = c * c;
    j.h(1, 1) = s * s;
    j.h(2, 2) = T(1.0);
    j.dh[2](0, 0) = -2.0 * c * s;
    j.dh[2](1, 1) = 2.0 * c * s;
    return j;
  }
};

class ConstantField final : public JetImpl<ConstantField, VectorFieldModel, FieldJet> {
 public:
  explicit ConstantField(Vec c) : c_(std::move(c)) {}
  std::size_t dim() const override { return c_.size(); }

  template <class T>
  FieldJet<T> compute(std::span<const T> x) const {
    FieldJet<T> j{std::vector<T>(c_.begin(), c_.end()), Matrix<T>(x.size(), x.size())};
    return j;
  }

 private:
  Vec c_;
};

class SphereKillingField final : public JetImpl<SphereKillingField, VectorFieldModel, FieldJet> {
 public:
  SphereKillingField(Matrix<double> Q, Vec C, double sigma) : Q_(std::move(Q)), C_(std::move(C)), sigma_(sigma) {}
  std::size_t dim() const override { return C_.size(); }

  template <class T>
  FieldJet<T> compute(std::span<const T> x) const {
    const std::size_t n = C_.size();
    T xc(0.0);
    for (std::size_t r = 0; r < n; ++r) xc += C_[r] * x[r];
    FieldJet<T> j{std::vector<T>(n, T(0.0)), Matrix<T>(n, n)};
    for (std::size_t i = 0; i < n; ++i) {
      T w = sigma_ * (C_[i] + xc * x[i]);
      for (std::size_t r = 0; r < n; ++r) w += Q_(i, r) * x[r];
      j.w[i] = w;
      for (std::size_t k = 0; k < n; ++k) {
        T d = Q_(i, k) + sigma_ * C_[k] * x[i];
        if (i == k) d += sigma_ * xc;
        j.dw(i, k) = d;
      }
    }
    return j;
  }

 private:
  Matrix<double> Q_;
  Vec C_;
  double sigma_;
};

class ConstantScalar final : public JetImpl<ConstantScalar, ScalarFieldModel, ScalarJet> {
 public:
  ConstantScalar(std::size_t n, double value) : n_(n), value_(value) {}
  std::size_t dim() const override { return n_; }

  template <class T>
  ScalarJet<T> compute(std::span<const T> x) const {
    return {T(value_), std::vector<T>(x.size(), T(0.0))};
  }

 private:
  std::size_t n_;
  double value_;
};

void require_size(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) throw InputError(std::string(what) + " has wrong dimension");
  for (double c : v)
    if (!std::isfinite(c)) throw InputError(std::string(what) + " has non-finite entries");
}

Tensor3 christoffel_from(const MetricJet<double>& j) {
  const std::size_t n = j.h.rows();
  const Matrix<double> hinv = spd_inverse(j.h);
  Tensor3 g(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = b; c < n; ++c) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l)
          s += hinv(a, l) * (j.dh[b](l, c) + j.dh[c](l, b) - j.dh[l](b, c));
        g(a, b, c) = 0.5 * s;
        g(a, c, b) = g(a, b, c);
      }
  return g;
}

double fd_step(std::span<const double> x, double base) { return base * (1.0 + norm(x)); }

}  // namespace

SymMatrix RiemannianModel::metric(std::span<const double> x) const {
  require_valid(x);
  return SymMatrix(jet(x).h);
}

std::vector<Matrix<double>> RiemannianModel::metric_dx(std::span<const double> x) const {
  require_valid(x);
  return jet(x).dh;
}

void RiemannianModel::require_valid(std::span<const double> x) const {
  if (x.size() != dim()) throw InputError("point has wrong dimension for " + tag());
  if (!valid(x)) throw DomainError("point outside the validity region of the " + tag() + " chart");
}

Vec VectorFieldModel::components(std::span<const double> x) const { return jet(x).w; }
Matrix<double> VectorFieldModel::components_dx(std::span<const double> x) const { return jet(x).dw; }

ModelPtr make_euclidean(std::size_t n) {
  if (n == 0) throw InputError("euclidean model needs n >= 1");
  return std::make_shared<FlatModel>("euclidean", Vec(n, -2.0), Vec(n, 2.0));
}

ModelPtr make_cylinder() {
  return std::make_shared<FlatModel>("cylinder", Vec{0.0, -2.0}, Vec{2 * std::numbers::pi, 2.0});
}

ModelPtr make_torus() {
  return std::make_shared<FlatModel>("torus", Vec{0.0, 0.0}, Vec{2 * std::numbers::pi, 2 * std::numbers::pi});
}

ModelPtr make_s3_chart() { return std::make_shared<S3ChartModel>(); }

ModelPtr make_sphere_projective(std::size_t m, double K, Hemisphere hemisphere) {
  if (m < 2) throw InputError("sphere_projective needs m >= 2");
  if (!(K > 0.0) || !std::isfinite(K)) throw InputError("sphere_projective needs K > 0");
  return std::make_shared<SphereProjectiveModel>(m, K, hemisphere);
}

FieldPtr make_constant_field(Vec c) {
  require_size(c, c.size(), "constant field");
  return std::make_shared<ConstantField>(std::move(c));
}

FieldPtr make_sphere_killing_field(double /*K*/, Matrix<double> Q, Vec C, Hemisphere hemisphere) {
  if (Q.rows() != C.size() || Q.cols() != C.size()) throw InputError("Q and C dimensions disagree");
  return std::make_shared<SphereKillingField>(std::move(Q), std::move(C), hemisphere == Hemisphere::east ? 1.0 : -1.0);
}

ScalarPtr make_constant_scalar(std::size_t n, double value) {
  if (!std::isfinite(value)) throw InputError("non-finite scalar");
  return std::make_shared<ConstantScalar>(n, value);
}

Tensor3 christoffel(const RiemannianModel& model, std::span<const double> x) {
  model.require_valid(x);
  return christoffel_from(model.jet(x));
}

Matrix<double> covariant_derivative(const RiemannianModel& model, const VectorFieldModel& field,
                                    std::span<const double> x) {
  model.require_valid(x);
  if (field.dim() != model.dim()) throw InputError("field and model dimensions disagree");
  const auto mj = model.jet(x);
  const auto fj = field.jet(x);
  const Tensor3 g = christoffel_from(mj);
  const std::size_t n = model.dim();
  const Vec wl = mj.h * fj.w;
  Matrix<double> out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d = 0.0;
      for (std::size_t r = 0; r < n; ++r) d += mj.dh[j](i, r) * fj.w[r] + mj.h(i, r) * fj.dw(r, j);
      for (std::size_t r = 0; r < n; ++r) d -= g(r, i, j) * wl[r];
      out(i, j) = d;
    }
  return out;
}

KillingReport killing_report(const RiemannianModel& model, const VectorFieldModel& field,
                             const std::vector<Vec>& points) {
  if (points.empty()) throw InputError("killing_report needs at least one point");
  KillingReport rep;
  rep.sample_points = points;
  for (const Vec& x : points) {
    const Matrix<double> cd = covariant_derivative(model, field, x);
    const std::size_t n = cd.rows();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        rep.max_killing_residual = std::max(rep.max_killing_residual, std::abs(0.5 * (cd(i, j) + cd(j, i))));
        rep.max_parallel_residual = std::max(rep.max_parallel_residual, std::abs(cd(i, j)));
      }
    const Vec w = field.components(x);
    const double hw = quad(model.jet(std::span<const double>(x)).h, w, w);
    rep.max_unit_residual = std::max(rep.max_unit_residual, std::abs(hw - 1.0));
  }
  return rep;
}

Tensor4 riemann_tensor(const RiemannianModel& model, std::span<const double> x) {
  model.require_valid(x);
  const std::size_t n = model.dim();
  const double h = fd_step(x, 1e-4);
  const Tensor3 g = christoffel(model, x);
  std::vector<Tensor3> dg;
  dg.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Vec xp(x.begin(), x.end()), xm(x.begin(), x.end());
    xp[k] += h;
    xm[k] -= h;
    const Tensor3 gp = christoffel(model, xp);
    const Tensor3 gm = christoffel(model, xm);
    Tensor3 d(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) d(i, a, b) = (gp(i, a, b) - gm(i, a, b)) / (2 * h);
    dg.push_back(std::move(d));
  }
  Tensor4 R(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double v = dg[k](i, l, j) - dg[l](i, k, j);
          for (std::size_t r = 0; r < n; ++r) v += g(i, k, r) * g(r, l, j) - g(i, l, r) * g(r, k, j);
          R(i, j, k, l) = v;
        }
  return R;
}

double sectional_curvature(const RiemannianModel& model, std::span<const double> x, std::span<const double> u,
                           std::span<const double> v) {
  const std::size_t n = model.dim();
  require_size(u, n, "u");
  require_size(v, n, "v");
  model.require_valid(x);
  const Matrix<double> hm = model.jet(x).h;
  const double uu = quad(hm, u, u), vv = quad(hm, v, v), uv = quad(hm, u, v);
  const double den = uu * vv - uv * uv;
  if (den < 1e-12) throw InputError("degenerate plane");
  const Tensor4 R = riemann_tensor(model, x);
  double num = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double hu = 0.0;
    for (std::size_t m = 0; m < n; ++m) hu += hm(i, m) * u[m];
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) num += hu * R(i, j, k, l) * v[j] * u[k] * v[l];
  }
  return num / den;
}

double metric_compatibility_residual(const RiemannianModel& model, std::span<const double> x) {
  model.require_valid(x);
  const auto mj = model.jet(x);
  const Tensor3 g = christoffel_from(mj);
  const std::size_t n = model.dim();
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double v = mj.dh[k](i, j);
        for (std::size_t r = 0; r < n; ++r) v -= g(r, k, i) * mj.h(r, j) + g(r, k, j) * mj.h(i, r);
        worst = std::max(worst, std::abs(v));
      }
  return worst;
}

double integral_curve_geodesic_residual(const RiemannianModel& model, const VectorFieldModel& field,
                                        std::span<const double> x) {
  const Tensor3 g = christoffel(model, x);
  const auto fj = field.jet(x);
  const std::size_t n = model.dim();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      v += fj.dw(i, j) * fj.w[j];
      for (std::size_t k = 0; k < n; ++k) v += g(i, j, k) * fj.w[j] * fj.w[k];
    }
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

double metric_dx_consistency(const RiemannianModel& model, std::span<const double> x) {
  model.require_valid(x);
  const std::size_t n = model.dim();
  const double h = fd_step(x, 1e-6);
  const auto mj = model.jet(x);
  double scale = max_abs(mj.h), gap = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    Vec xp(x.begin(), x.end()), xm(x.begin(), x.end());
    xp[k] += h;
    xm[k] -= h;
    const auto hp = model.metric(xp).matrix();
    const auto hm = model.metric(xm).matrix();
    scale = std::max(scale, max_abs(mj.dh[k]));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        gap = std::max(gap, std::abs((hp(i, j) - hm(i, j)) / (2 * h) - mj.dh[k](i, j)));
  }
  return gap / scale;
}

double field_dx_consistency(const VectorFieldModel& field, std::span<const double> x) {
  const std::size_t n = field.dim();
  require_size(x, n, "point");
  const double h = fd_step(x, 1e-6);
  const auto fj = field.jet(x);
  double scale = std::max(max_abs(fj.dw), max_abs(fj.w)), gap = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    Vec xp(x.begin(), x.end()), xm(x.begin(), x.end());
    xp[k] += h;
    xm[k] -= h;
    const Vec wp = field.components(xp), wm = field.components(xm);
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, std::abs((wp[i] - wm[i]) / (2 * h) - fj.dw(i, k)));
  }
  return scale > 0.0 ? gap / scale : gap;
}

std::vector<Vec> sample_points(const RiemannianModel& model, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vec> pts;
  pts.reserve(count);
  while (pts.size() < count) {
    Vec x = model.sample_point(rng);
    if (model.valid(x)) pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace kropina
