#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/conic.hpp"

namespace kropina {

enum class GeodesicStatus { completed, left_domain, left_chart };

std::string to_string(GeodesicStatus s);

struct CurveSample {
  double t = 0.0;
  Vec x;
  Vec y;  // ẋ
  double F = 0.0;
};

struct GeodesicResult {
  std::vector<CurveSample> samples;
  GeodesicStatus status = GeodesicStatus::completed;
  double t_exit = 0.0;         // meaningful unless completed
  double f_length = 0.0;
  double max_rel_drift = 0.0;  // max |F(t) − F(0)| / F(0)
};

/// Classical RK4 for ẍ^i + 2G^i(x, ẋ) = 0. A step whose stages leave the chart or the
/// cone is retried with dt halved up to 10 times; after that the exit time is bisected
/// to 1e-8 and integration stops. Throws InputError when (x0, y0) is not inside the
/// cone with margin 1e-6 or dt, t_max are not positive.
GeodesicResult integrate(const ConicKropinaMetric& metric, std::span<const double> x0, std::span<const double> y0,
                         double t_max, double dt);

/// Composite trapezoid value of ∫F(x(t), ẋ(t)) dt over the samples (their F fields are
/// recomputed). Throws InputError on an inadmissible sample or decreasing times.
double f_length(const ConicKropinaMetric& metric, const std::vector<CurveSample>& samples);

/// Columns t, x1..xn, y1..yn, F at 17 significant digits.
std::string geodesic_csv(const std::vector<CurveSample>& samples);

}  // namespace kropina
