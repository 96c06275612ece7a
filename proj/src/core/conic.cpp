#include "core/conic.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace kropina {

namespace {

template <class Derived>
class GeneratorImpl : public ConicGenerator {
 public:
  FiberJet<double> fiber(std::span<const double> x, std::span<const double> y) const override {
    return self().template fiber_t<double>(x, y);
  }
  FiberJet<D1> fiber(std::span<const D1> x, std::span<const D1> y) const override {
    return self().template fiber_t<D1>(x, y);
  }
  FiberJet<D2> fiber(std::span<const D2> x, std::span<const D2> y) const override {
    return self().template fiber_t<D2>(x, y);
  }
  FiberJet<D3> fiber(std::span<const D3> x, std::span<const D3> y) const override {
    return self().template fiber_t<D3>(x, y);
  }
  double F_value(std::span<const double> x, std::span<const double> y) const override {
    return self().template value_t<double>(x, y);
  }
  D1 F_value(std::span<const D1> x, std::span<const D1> y) const override {
    return self().template value_t<D1>(x, y);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

class KropinaGenerator final : public GeneratorImpl<KropinaGenerator> {
 public:
  explicit KropinaGenerator(KropinaPtr kd) : kd_(std::move(kd)) {}

  std::size_t dim() const override { return kd_->dim(); }
  std::string tag() const override { return kd_->tag(); }
  bool chart_valid(std::span<const double> x) const override { return kd_->valid(x); }
  Vec sample_point(std::mt19937_64& rng) const override { return kd_->sample_point(rng); }
  double domain_margin(std::span<const double> x, std::span<const double> y) const override {
    const auto kj = kd_->jet(x);
    const double alpha = std::sqrt(quad(kj.a, y, y));
    if (!(alpha > 0.0)) return -1.0;
    return dot(std::span<const double>(kj.b), y) / alpha;
  }

  template <class T>
  FiberJet<T> fiber_t(std::span<const T> x, std::span<const T> y) const {
    const std::size_t n = x.size();
    const KropinaJet<T> kj = kd_->jet(x);
    FiberJet<T> f;
    f.F = quad(kj.a, y, y) / dot(std::span<const T>(kj.b), y);
    f.g = kropina_fundamental<T>(kj.a, kj.b, y);
    // ∂g/∂x^l by pushing (∂_l a, ∂_l b) through the closed form.
    using L = Dual<T>;
    Matrix<L> al(n, n);
    std::vector<L> bl(n), yl(n);
    for (std::size_t i = 0; i < n; ++i) yl[i] = L(y[i], T(0.0));
    f.dg.reserve(n);
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t i = 0; i < n; ++i) {
        bl[i] = L(kj.b[i], kj.db(i, l));
        for (std::size_t j = 0; j < n; ++j) al(i, j) = L(kj.a(i, j), kj.da[l](i, j));
      }
      const Matrix<L> gl = kropina_fundamental<L>(al, bl, std::span<const L>(yl));
      Matrix<T> d(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d(i, j) = gl(i, j).d;
      f.dg.push_back(std::move(d));
    }
    return f;
  }

  template <class T>
  T value_t(std::span<const T> x, std::span<const T> y) const {
    const KropinaJet<T> kj = kd_->jet(x);
    return quad(kj.a, y, y) / dot(std::span<const T>(kj.b), y);
  }

 private:
  KropinaPtr kd_;
};

class QuadraticGenerator final : public GeneratorImpl<QuadraticGenerator> {
 public:
  explicit QuadraticGenerator(ModelPtr model) : model_(std::move(model)) {}

  std::size_t dim() const override { return model_->dim(); }
  std::string tag() const override { return model_->tag(); }
  bool chart_valid(std::span<const double> x) const override { return model_->valid(x); }
  Vec sample_point(std::mt19937_64& rng) const override { return model_->sample_point(rng); }
  double domain_margin(std::span<const double>, std::span<const double> y) const override {
    for (double v : y)
      if (v != 0.0) return std::numeric_limits<double>::infinity();
    return -1.0;
  }

  template <class T>
  FiberJet<T> fiber_t(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    MetricJet<T> mj = model_->jet(x);
    FiberJet<T> f;
    f.F = sqrt(quad(mj.h, y, y));
    f.g = std::move(mj.h);
    f.dg = std::move(mj.dh);
    return f;
  }

  template <class T>
  T value_t(std::span<const T> x, std::span<const T> y) const {
    using std::sqrt;
    return sqrt(quad(model_->jet(x).h, y, y));
  }

 private:
  ModelPtr model_;
};

Vec offset(std::span<const double> x, std::span<const double> dir, double t) {
  Vec out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += t * dir[i];
  return out;
}

Vec unit(std::size_t n, std::size_t k) {
  Vec e(n, 0.0);
  e[k] = 1.0;
  return e;
}

/// Central difference of a vector-valued f(s) at s = 0, optionally Richardson-extrapolated.
template <class Fn>
Vec central(Fn&& f, double h, bool richardson) {
  auto once = [&](double s) {
    Vec p = f(s);
    const Vec m = f(-s);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = (p[i] - m[i]) / (2 * s);
    return p;
  };
  Vec d = once(h);
  if (!richardson) return d;
  const Vec d2 = once(h / 2);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (4 * d2[i] - d[i]) / 3;
  return d;
}

}  // namespace

GeneratorPtr make_kropina_generator(KropinaPtr kd) {
  if (!kd) throw InputError("null Kropina data");
  return std::make_shared<KropinaGenerator>(std::move(kd));
}

GeneratorPtr make_quadratic_generator(ModelPtr model) {
  if (!model) throw InputError("null model");
  return std::make_shared<QuadraticGenerator>(std::move(model));
}

ConicKropinaMetric::ConicKropinaMetric(GeneratorPtr gen, FdConfig fd) : gen_(std::move(gen)), fd_(fd) {
  if (!gen_) throw InputError("null generator");
  if (!(fd_.step_x > 0.0) || !(fd_.step_y > 0.0)) throw InputError("finite-difference steps must be positive");
}

void ConicKropinaMetric::require_chart(std::span<const double> x) const {
  if (x.size() != dim()) throw InputError("x has wrong dimension");
  for (double v : x)
    if (!std::isfinite(v)) throw InputError("x has non-finite entries");
  if (!gen_->chart_valid(x)) throw DomainError("x outside the validity region of the " + gen_->tag() + " chart");
}

void ConicKropinaMetric::require_vector(std::span<const double> y) const {
  if (y.size() != dim()) throw InputError("tangent vector has wrong dimension");
  for (double v : y)
    if (!std::isfinite(v)) throw InputError("tangent vector has non-finite entries");
}

double ConicKropinaMetric::margin(std::span<const double> x, std::span<const double> y) const {
  require_chart(x);
  require_vector(y);
  return gen_->domain_margin(x, y);
}

bool ConicKropinaMetric::domain_contains(std::span<const double> x, std::span<const double> y) const {
  return margin(x, y) > kDomainEpsilon;
}

void ConicKropinaMetric::require_inside(std::span<const double> x, std::span<const double> y) const {
  if (!domain_contains(x, y)) throw OutsideConeError("y is outside the conic domain");
}

void ConicKropinaMetric::require_margin(std::span<const double> x, std::span<const double> y) const {
  const double m = margin(x, y);
  if (!(m > kDomainEpsilon)) throw OutsideConeError("y is outside the conic domain");
  if (!(m > kCurvatureMargin)) throw NearBoundaryError("y is too close to the cone boundary");
}

double ConicKropinaMetric::F(std::span<const double> x, std::span<const double> y) const {
  require_inside(x, y);
  return gen_->F_value(x, y);
}

SymMatrix ConicKropinaMetric::fundamental_tensor(std::span<const double> x, std::span<const double> y) const {
  require_inside(x, y);
  return SymMatrix(gen_->fiber(x, y).g);
}

Vec ConicKropinaMetric::spray(std::span<const double> x, std::span<const double> y) const {
  require_inside(x, y);
  return spray_from_fiber<double>(gen_->fiber(x, y), y);
}

Vec ConicKropinaMetric::spray_energy_route(std::span<const double> x, std::span<const double> y) const {
  require_inside(x, y);
  const std::size_t n = dim();
  const double hx = fd_.step_x * (1.0 + norm(x));

  // ∂F²/∂y^l by forward-mode differentiation of F alone.
  auto dy_energy = [&](std::span<const double> xp) {
    require_chart(xp);
    const std::vector<D1> xs(xp.begin(), xp.end());
    Vec out(n);
    for (std::size_t l = 0; l < n; ++l) {
      std::vector<D1> ys(y.begin(), y.end());
      ys[l].d = 1.0;
      const D1 f = gen_->F_value(std::span<const D1>(xs), std::span<const D1>(ys));
      out[l] = 2.0 * f.v * f.d;
    }
    return out;
  };
  auto energy = [&](std::span<const double> xp) {
    require_chart(xp);
    const double f = gen_->F_value(xp, y);
    return f * f;
  };

  const double ynorm = norm(y);
  const Vec mixed = central([&](double s) { return dy_energy(offset(x, y, s)); }, hx / ynorm, fd_.richardson);
  Vec dx(n);
  for (std::size_t l = 0; l < n; ++l) {
    const Vec e = unit(n, l);
    dx[l] = central([&](double s) { return Vec{energy(offset(x, e, s))}; }, hx, fd_.richardson)[0];
  }
  const Matrix<double> ginv = spd_inverse(gen_->fiber(x, y).g);
  Vec G(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l) G[i] += 0.25 * ginv(i, l) * (mixed[l] - dx[l]);
  return G;
}

CurvatureTensors ConicKropinaMetric::curvature_tensors(std::span<const double> x, std::span<const double> y) const {
  require_margin(x, y);
  const std::size_t n = dim();
  CurvatureTensors ct{Vec(n, 0.0), Matrix<double>(n, n), Tensor3(n), Tensor4(n)};
  std::vector<Tensor3> dxG(n, Tensor3(n)), dyG(n, Tensor3(n));  // ∂_{x^l} Γ, ∂_{y^r} Γ
  std::vector<D3> xs(n), ys(n);
  // Nesting levels: 1 = ∂/∂y^j, 2 = ∂/∂y^k, 3 = ∂/∂x^l or ∂/∂y^r.
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k)
      for (std::size_t dir = 0; dir < 2 * n; ++dir) {
        for (std::size_t p = 0; p < n; ++p) {
          xs[p] = seed3(x[p], 0.0, 0.0, dir == p ? 1.0 : 0.0);
          ys[p] = seed3(y[p], p == j ? 1.0 : 0.0, p == k ? 1.0 : 0.0, dir == n + p ? 1.0 : 0.0);
        }
        const std::span<const D3> ysp(ys);
        const std::vector<D3> G = spray_from_fiber<D3>(gen_->fiber(std::span<const D3>(xs), ysp), ysp);
        for (std::size_t i = 0; i < n; ++i) {
          if (dir == 0) {
            ct.G[i] = G[i].v.v.v;
            ct.N(i, j) = G[i].v.v.d;
            ct.N(i, k) = G[i].v.d.v;
            ct.Gamma(i, j, k) = G[i].v.d.d;
            ct.Gamma(i, k, j) = G[i].v.d.d;
          }
          Tensor3& t = dir < n ? dxG[dir] : dyG[dir - n];
          t(i, j, k) = G[i].d.d.d;
          t(i, k, j) = G[i].d.d.d;
        }
      }
  // δ_l Γ^i_jk = ∂_{x^l} Γ^i_jk − N^r_l ∂_{y^r} Γ^i_jk
  auto delta = [&](std::size_t l, std::size_t i, std::size_t j, std::size_t k) {
    double v = dxG[l](i, j, k);
    for (std::size_t r = 0; r < n; ++r) v -= ct.N(r, l) * dyG[r](i, j, k);
    return v;
  };
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double v = delta(l, i, j, k) - delta(k, i, j, l);
          for (std::size_t r = 0; r < n; ++r)
            v += ct.Gamma(r, j, k) * ct.Gamma(i, r, l) - ct.Gamma(r, j, l) * ct.Gamma(i, r, k);
          ct.R(j, i, k, l) = v;
        }
  return ct;
}

FlagFrame ConicKropinaMetric::make_flag_frame(std::span<const double> x, std::span<const double> y,
                                              std::span<const double> X) const {
  require_inside(x, y);
  require_vector(X);
  const std::size_t n = dim();
  const FiberJet<double> f = gen_->fiber(x, y);
  FlagFrame fr;
  fr.x.assign(x.begin(), x.end());
  fr.y.assign(y.begin(), y.end());
  fr.X.assign(X.begin(), X.end());
  fr.F = f.F;
  fr.l_lower = f.g * y;
  fr.l_upper.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fr.l_lower[i] /= f.F;
    fr.l_upper[i] = y[i] / f.F;
  }
  fr.angular = Matrix<double>::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l) fr.angular(i, l) -= fr.l_upper[i] * fr.l_lower[l];
  return fr;
}

namespace {

/// R_0^i_0l = R_j^i_kl y^j y^k, entry (i, l).
Matrix<double> flag_operator(const Tensor4& R, std::span<const double> y) {
  const std::size_t n = y.size();
  Matrix<double> out(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) out(i, l) += R(j, i, k, l) * y[j] * y[k];
  return out;
}

}  // namespace

double ConicKropinaMetric::flag_curvature(const FlagFrame& frame) const {
  const std::span<const double> x(frame.x), y(frame.y), X(frame.X);
  require_margin(x, y);
  require_vector(X);
  const Matrix<double> g = gen_->fiber(x, y).g;
  const double gyy = quad(g, y, y), gXX = quad(g, X, X), gyX = quad(g, y, X);
  const double den = gyy * gXX - gyX * gyX;
  if (!(den > 1e-10 * gyy * gXX)) throw DegenerateError("flag is degenerate: X is g-parallel to y");
  const Matrix<double> R0 = flag_operator(curvature_tensors(x, y).R, y);
  const Vec gX = g * X;
  return quad(R0, std::span<const double>(gX), X) / den;
}

ScalarFlagResidual ConicKropinaMetric::scalar_flag_residual(std::span<const double> x, std::span<const double> y,
                                                            double K) const {
  require_margin(x, y);
  const FlagFrame fr = make_flag_frame(x, y, y);
  const Matrix<double> R0 = flag_operator(curvature_tensors(x, y).R, y);
  const std::size_t n = dim();
  ScalarFlagResidual out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l) {
      const double ref = K * fr.F * fr.F * fr.angular(i, l);
      out.residual = std::max(out.residual, std::abs(R0(i, l) - ref));
      out.reference_norm = std::max(out.reference_norm, std::abs(ref));
    }
  return out;
}

double ConicKropinaMetric::hamel_residual(std::span<const double> x, std::span<const double> y) const {
  require_margin(x, y);
  const std::size_t n = dim();
  auto Fs = [&](const Vec& xp, const Vec& yp) {
    if (!gen_->chart_valid(xp)) throw NearBoundaryError("difference stencil leaves the chart");
    if (!(gen_->domain_margin(xp, yp) > kDomainEpsilon))
      throw NearBoundaryError("difference stencil leaves the conic domain");
    return gen_->F_value(xp, yp);
  };
  auto residuals = [&](double hx, double hy) {
    Vec res(n);
    for (std::size_t j = 0; j < n; ++j) {
      const Vec ej = unit(n, j);
      const Vec yp = offset(y, ej, hy), ym = offset(y, ej, -hy);
      const double fxj = (Fs(offset(x, ej, hx), Vec(y.begin(), y.end())) -
                          Fs(offset(x, ej, -hx), Vec(y.begin(), y.end()))) /
                         (2 * hx);
      double mixed = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const Vec er = unit(n, r);
        const Vec xp = offset(x, er, hx), xm = offset(x, er, -hx);
        const double frj = (Fs(xp, yp) - Fs(xp, ym) - Fs(xm, yp) + Fs(xm, ym)) / (4 * hx * hy);
        mixed += frj * y[r];
      }
      res[j] = mixed - fxj;
    }
    return res;
  };
  const double hx = fd_.step_x * (1.0 + norm(x));
  const double hy = fd_.step_y * (1.0 + norm(y));
  Vec res = residuals(hx, hy);
  if (fd_.richardson) {
    const Vec half = residuals(hx / 2, hy / 2);
    for (std::size_t j = 0; j < n; ++j) res[j] = (4 * half[j] - res[j]) / 3;
  }
  return max_abs(res);
}

std::pair<Vec, Vec> sample_admissible(const ConicKropinaMetric& metric, std::mt19937_64& rng, std::size_t max_tries) {
  const std::size_t n = metric.dim();
  std::normal_distribution<double> gauss;
  for (std::size_t t = 0; t < max_tries; ++t) {
    Vec x = metric.generator().sample_point(rng);
    Vec y(n);
    for (auto& v : y) v = gauss(rng);
    if (!metric.generator().chart_valid(x)) continue;
    double m = metric.margin(x, y);
    if (m < 0.0) {
      for (auto& v : y) v = -v;
      m = metric.margin(x, y);
    }
    if (m >= kSampleMargin) return {std::move(x), std::move(y)};
  }
  throw SamplingError("no admissible (x, y) found in " + std::to_string(max_tries) + " tries");
}

Vec sample_transverse(const ConicKropinaMetric& metric, std::span<const double> x, std::span<const double> y,
                      std::mt19937_64& rng) {
  const std::size_t n = metric.dim();
  const Matrix<double> g = metric.fundamental_tensor(x, y).matrix();
  std::normal_distribution<double> gauss;
  for (int t = 0; t < 1000; ++t) {
    Vec X(n);
    for (auto& v : X) v = gauss(rng);
    const double gyy = quad(g, y, y), gXX = quad(g, std::span<const double>(X), std::span<const double>(X));
    const double gyX = quad(g, y, std::span<const double>(X));
    if (gyy * gXX - gyX * gyX > 1e-4 * gyy * gXX) return X;
  }
  throw SamplingError("no transverse direction found");
}

}  // namespace kropina
