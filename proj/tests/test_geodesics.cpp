#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "core/errors.hpp"
#include "core/geodesics.hpp"
#include "support.hpp"

using namespace kropina;

namespace {

/// Largest distance of the samples from the line x0 + t y0.
double line_deviation(const GeodesicResult& r, const Vec& x0, const Vec& y0) {
  double worst = 0.0;
  for (const CurveSample& s : r.samples)
    for (std::size_t i = 0; i < x0.size(); ++i) worst = std::max(worst, std::abs(s.x[i] - x0[i] - s.t * y0[i]));
  return worst;
}

}  // namespace

TEST_CASE("geodesics of constant Kropina data are straight rays") {
  const ConicKropinaMetric e = kt::kropina_metric(euclidean_navigation({1.0, 0.0}));
  const Vec x0{0.0, 0.0}, y0{1.0, 1.0};
  const GeodesicResult r = integrate(e, x0, y0, 2.0, 1e-2);
  CHECK(r.status == GeodesicStatus::completed);
  CHECK(r.t_exit == 2.0);
  CHECK(r.samples.size() == 201);
  CHECK(line_deviation(r, x0, y0) < 1e-12);
  CHECK(r.max_rel_drift < 1e-14);
  CHECK(r.f_length == doctest::Approx(2.0).epsilon(1e-12));

  // Collinearity of the velocity with y0 in three dimensions.
  const ConicKropinaMetric e3 = kt::kropina_metric(euclidean_navigation({0.0, 0.6, 0.8}));
  const Vec z0{1.0, -1.0, 0.5}, v0{0.2, 1.0, 1.0};
  const GeodesicResult r3 = integrate(e3, z0, v0, 3.0, 1e-2);
  for (const CurveSample& s : r3.samples) CHECK(kt::max_abs_diff(s.y, v0) < 1e-12);
}

TEST_CASE("the cylinder wind line is a geodesic on the universal cover") {
  const ConicKropinaMetric c = kt::kropina_metric(cylinder_navigation());
  const GeodesicResult r = integrate(c, Vec{0.5, 0.0}, Vec{1.0, 0.0}, 10.0, 1e-2);
  CHECK(r.status == GeodesicStatus::completed);
  CHECK(r.samples.back().x[0] == doctest::Approx(10.5).epsilon(1e-12));
  CHECK(line_deviation(r, Vec{0.5, 0.0}, Vec{1.0, 0.0}) < 1e-12);
  CHECK(r.f_length == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("S3 chart geodesics leave the chart where the straight line crosses its edge") {
  const ConicKropinaMetric m = kt::kropina_metric(s3_navigation());
  const GeodesicResult r = integrate(m, Vec{0.0, 0.0, 0.3}, Vec{1.0, 1.0, -1.0}, 10.0, 1e-3);
  CHECK(r.status == GeodesicStatus::left_chart);
  CHECK(r.t_exit == doctest::Approx(0.3).epsilon(1e-4));
  CHECK(r.max_rel_drift < 1e-10);

  const GeodesicResult r2 = integrate(m, Vec{0.0, 0.0, 0.3}, Vec{1.0, 1.0, 0.5}, 10.0, 1e-3);
  CHECK(r2.status == GeodesicStatus::completed);
  CHECK(r2.max_rel_drift < 1e-6);
}

TEST_CASE("F is conserved along geodesics of both constant-curvature families") {
  std::mt19937_64 rng(21);
  for (const auto& [name, nav] : kt::catalog_navs()) {
    CAPTURE(name);
    const ConicKropinaMetric m = kt::kropina_metric(nav);
    for (int s = 0; s < 3; ++s) {
      auto [x, y] = sample_admissible(m, rng);
      // Slow starts keep the curve well inside the chart for the whole run.
      y = kt::scaled(y, 0.05 / m.F(x, y));
      const GeodesicResult r = integrate(m, x, y, 2.0, 1e-3);
      CHECK(r.max_rel_drift < 1e-6);
    }
  }
}

TEST_CASE("f_length is additive and invariant under constant reparametrization") {
  const ConicKropinaMetric m = kt::kropina_metric(sphere_navigation(kt::sphere_params()));
  const Vec x0{0.1, 0.2, -0.1}, y0{0.1, 0.02, 0.01};
  const GeodesicResult r = integrate(m, x0, y0, 4.0, 1e-3);
  REQUIRE(r.status == GeodesicStatus::completed);
  const std::size_t mid = r.samples.size() / 2;
  const std::vector<CurveSample> a(r.samples.begin(), r.samples.begin() + mid + 1);
  const std::vector<CurveSample> b(r.samples.begin() + mid, r.samples.end());
  CHECK(f_length(m, a) + f_length(m, b) == doctest::Approx(r.f_length).epsilon(1e-13));

  // Doubling the speed halves the time to cover the same curve.
  const GeodesicResult fast = integrate(m, x0, kt::scaled(y0, 2.0), 2.0, 5e-4);
  REQUIRE(fast.status == GeodesicStatus::completed);
  CHECK(fast.f_length == doctest::Approx(r.f_length).epsilon(1e-8));
  CHECK(kt::max_abs_diff(fast.samples.back().x, r.samples.back().x) < 1e-9);
  CHECK(r.f_length == doctest::Approx(4.0 * r.samples.front().F).epsilon(1e-6));
}

TEST_CASE("integrate rejects bad inputs") {
  const ConicKropinaMetric e = kt::kropina_metric(euclidean_navigation({1.0, 0.0}));
  CHECK_THROWS_AS(integrate(e, Vec{0, 0}, Vec{-1, 0}, 1.0, 1e-2), InputError);
  CHECK_THROWS_AS(integrate(e, Vec{0, 0}, Vec{1e-9, 1}, 1.0, 1e-2), InputError);
  CHECK_THROWS_AS(integrate(e, Vec{0, 0}, Vec{1, 1}, 0.0, 1e-2), InputError);
  CHECK_THROWS_AS(integrate(e, Vec{0, 0}, Vec{1, 1}, 1.0, -1e-2), InputError);
  CHECK_THROWS_AS(integrate(e, Vec{0, 0, 0}, Vec{1, 1}, 1.0, 1e-2), InputError);
  const ConicKropinaMetric s3 = kt::kropina_metric(s3_navigation());
  CHECK_THROWS_AS(integrate(s3, Vec{0, 0, 2.0}, Vec{1, 1, 0}, 1.0, 1e-2), InputError);

  std::vector<CurveSample> backwards{{1.0, {0, 0}, {1, 1}, 0}, {0.5, {0, 0}, {1, 1}, 0}};
  CHECK_THROWS_AS(f_length(e, backwards), InputError);
  std::vector<CurveSample> outside{{0.0, {0, 0}, {1, 1}, 0}, {1.0, {0, 0}, {-1, 1}, 0}};
  CHECK_THROWS_AS(f_length(e, outside), InputError);
}

TEST_CASE("geodesic CSV layout") {
  const ConicKropinaMetric e = kt::kropina_metric(euclidean_navigation({1.0, 0.0}));
  const GeodesicResult r = integrate(e, Vec{0.0, 0.0}, Vec{1.0, 1.0}, 0.5, 0.25);
  const std::string csv = geodesic_csv(r.samples);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x1,x2,y1,y2,F");
  std::getline(in, line);
  CHECK(line == "0,0,0,1,1,1");
  std::getline(in, line);
  CHECK(line == "0.25,0.25,0.25,1,1,1");
  std::size_t rows = 0;
  for (std::istringstream all(csv); std::getline(all, line);) ++rows;
  CHECK(rows == 4);
}
