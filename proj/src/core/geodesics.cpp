#include "core/geodesics.hpp"

#include <cmath>
#include <optional>

#include "core/format.hpp"

namespace kropina {

namespace {

struct State {
  Vec x, y;
};

enum class Exit { none, chart, domain };

class Stepper {
 public:
  explicit Stepper(const ConicKropinaMetric& m) : m_(m) {}

  Exit guard(const Vec& x, const Vec& y) const {
    for (double v : x)
      if (!std::isfinite(v)) return Exit::chart;
    for (double v : y)
      if (!std::isfinite(v)) return Exit::domain;
    if (!m_.generator().chart_valid(x)) return Exit::chart;
    if (!(m_.generator().domain_margin(x, y) > kDomainEpsilon)) return Exit::domain;
    return Exit::none;
  }

  /// One RK4 step; every stage and the end state must pass the guard.
  Exit step(const State& s, double h, State& out) const {
    const std::size_t n = s.x.size();
    // g_y loses numerical definiteness before β reaches zero; that counts as leaving the cone.
    auto deriv = [&](const Vec& x, const Vec& y, Vec& dx, Vec& dy) {
      dx = y;
      try {
        dy = spray_from_fiber<double>(m_.generator().fiber(x, y), y);
      } catch (const InputError&) {
        return false;
      }
      for (double& v : dy) v *= -2.0;
      return true;
    };
    Vec k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
    Vec tx(n), ty(n);
    auto stage = [&](const Vec& kx, const Vec& ky, double c) {
      for (std::size_t i = 0; i < n; ++i) {
        tx[i] = s.x[i] + c * kx[i];
        ty[i] = s.y[i] + c * ky[i];
      }
      return guard(tx, ty);
    };
    if (!deriv(s.x, s.y, k1x, k1y)) return Exit::domain;
    if (Exit e = stage(k1x, k1y, h / 2); e != Exit::none) return e;
    if (!deriv(tx, ty, k2x, k2y)) return Exit::domain;
    if (Exit e = stage(k2x, k2y, h / 2); e != Exit::none) return e;
    if (!deriv(tx, ty, k3x, k3y)) return Exit::domain;
    if (Exit e = stage(k3x, k3y, h); e != Exit::none) return e;
    if (!deriv(tx, ty, k4x, k4y)) return Exit::domain;
    out.x.resize(n);
    out.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.x[i] = s.x[i] + h / 6 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]);
      out.y[i] = s.y[i] + h / 6 * (k1y[i] + 2 * k2y[i] + 2 * k3y[i] + k4y[i]);
    }
    return guard(out.x, out.y);
  }

 private:
  const ConicKropinaMetric& m_;
};

}  // namespace

std::string to_string(GeodesicStatus s) {
  switch (s) {
    case GeodesicStatus::completed: return "completed";
    case GeodesicStatus::left_domain: return "left_domain";
    case GeodesicStatus::left_chart: return "left_chart";
  }
  return "unknown";
}

GeodesicResult integrate(const ConicKropinaMetric& metric, std::span<const double> x0, std::span<const double> y0,
                         double t_max, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dt must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InputError("t_max must be positive");
  try {
    if (!(metric.margin(x0, y0) > kCurvatureMargin)) throw InputError("initial velocity is not inside the conic domain");
  } catch (const DomainError& e) {
    throw InputError(std::string("initial point: ") + e.what());
  }

  const Stepper stepper(metric);
  GeodesicResult res;
  State s{Vec(x0.begin(), x0.end()), Vec(y0.begin(), y0.end())};
  double t = 0.0;
  const double F0 = metric.F(s.x, s.y);
  res.samples.push_back({t, s.x, s.y, F0});

  while (t_max - t > 1e-12 * t_max) {
    const double h0 = std::min(dt, t_max - t);
    State next;
    Exit e = stepper.step(s, h0, next);
    double h = h0;
    for (int halving = 0; halving < 10 && e != Exit::none; ++halving) {
      h /= 2;
      e = stepper.step(s, h, next);
    }
    if (e != Exit::none) {
      // Largest admissible step in [lo, hi], down to 1e-8 in t.
      double lo = 0.0, hi = h;
      Exit last = e;
      while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        State probe;
        const Exit pe = stepper.step(s, mid, probe);
        if (pe == Exit::none) {
          lo = mid;
        } else {
          hi = mid;
          last = pe;
        }
      }
      res.status = last == Exit::chart ? GeodesicStatus::left_chart : GeodesicStatus::left_domain;
      res.t_exit = t + lo;
      break;
    }
    t += h;
    if (t_max - t <= 1e-12 * t_max) t = t_max;
    s = std::move(next);
    const double F = metric.F(s.x, s.y);
    res.max_rel_drift = std::max(res.max_rel_drift, std::abs(F - F0) / F0);
    res.samples.push_back({t, s.x, s.y, F});
  }
  if (res.status == GeodesicStatus::completed) res.t_exit = t;
  res.f_length = f_length(metric, res.samples);
  return res;
}

double f_length(const ConicKropinaMetric& metric, const std::vector<CurveSample>& samples) {
  double total = 0.0;
  double prev_F = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const CurveSample& c = samples[i];
    if (!metric.domain_contains(c.x, c.y)) throw InputError("curve sample " + std::to_string(i) + " is not admissible");
    const double F = metric.F(c.x, c.y);
    if (i > 0) {
      const double dt = c.t - samples[i - 1].t;
      if (!(dt >= 0.0)) throw InputError("curve sample times must be nondecreasing");
      total += 0.5 * (prev_F + F) * dt;
    }
    prev_F = F;
  }
  return total;
}

std::string geodesic_csv(const std::vector<CurveSample>& samples) {
  std::string out = "t";
  const std::size_t n = samples.empty() ? 0 : samples.front().x.size();
  for (std::size_t i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (std::size_t i = 1; i <= n; ++i) out += ",y" + std::to_string(i);
  out += ",F\n";
  for (const CurveSample& c : samples) {
    out += fmt17(c.t);
    for (double v : c.x) out += "," + fmt17(v);
    for (double v : c.y) out += "," + fmt17(v);
    out += "," + fmt17(c.F) + "\n";
  }
  return out;
}

}  // namespace kropina
