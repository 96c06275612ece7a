// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "core/errors.hpp"
#include "core/geodesics.hpp"
#include "support.hpp"

using namespace kropina;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Folds one measured quantity into the outcome.
void expect(Outcome& o, bool ok, const std::string& what) {
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what;
  if (!ok) {
    o.pass = false;
    o.detail += " [violated]";
  }
}

std::string g(double v) { return fmt::format("{:.3g}", v); }

double flag_dev(const ConicKropinaMetric& m, double K, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    const auto [x, y] = sample_admissible(m, rng);
    worst = std::max(worst, std::abs(m.flag_curvature(x, y, sample_transverse(m, x, y, rng)) - K));
  }
  return worst;
}

Outcome criterion1() {
  Outcome o;
  const double d1 = flag_dev(kt::kropina_metric(sphere_navigation(kt::sphere_params(1.0))), 1.0, 50, 101);
  const double d4 = flag_dev(kt::kropina_metric(sphere_navigation(kt::sphere_params(4.0))), 4.0, 50, 102);
  expect(o, d1 <= 1e-3, "K=1 max|K-1|=" + g(d1));
  expect(o, d4 <= 4e-3, "K=4 max|K-4|=" + g(d4));
  return o;
}

Outcome criterion2() {
  Outcome o;
  const double d2 = flag_dev(kt::kropina_metric(euclidean_navigation({1.0, 0.0})), 0.0, 50, 201);
  const double d3 = flag_dev(kt::kropina_metric(euclidean_navigation({0.0, 0.6, 0.8})), 0.0, 50, 202);
  expect(o, d2 <= 1e-5, "E2 max|K|=" + g(d2));
  expect(o, d3 <= 1e-5, "E3 max|K|=" + g(d3));
  return o;
}

Outcome criterion3() {
  Outcome o;
  const ConicKropinaMetric s = kt::kropina_metric(sphere_navigation(kt::sphere_params()));
  const ConicKropinaMetric e = kt::kropina_metric(euclidean_navigation({1.0, 0.0}));
  std::mt19937_64 rng(301);
  double good = 0.0, flat = 0.0, bad = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 50; ++k) {
    const auto [xs, ys] = sample_admissible(s, rng);
    const ScalarFlagResidual r1 = s.scalar_flag_residual(xs, ys, 1.0);
    good = std::max(good, r1.residual / r1.reference_norm);
    const ScalarFlagResidual r2 = s.scalar_flag_residual(xs, ys, 2.0);
    bad = std::min(bad, r2.residual / r2.reference_norm);
    const auto [xe, ye] = sample_admissible(e, rng);
    flat = std::max(flat, e.scalar_flag_residual(xe, ye, 0.0).residual);
  }
  expect(o, good < 1e-3, "sphere rel=" + g(good));
  expect(o, flat < 1e-5, "flat abs=" + g(flat));
  expect(o, bad > 0.1, "wrong-K min rel=" + g(bad));
  return o;
}

Outcome criterion4() {
  Outcome o;
  double worst_k = 0.0, worst_u = 0.0;
  for (const auto& [name, nav] : kt::catalog_navs()) {
    const KillingReport r = killing_report(*nav.sea, *nav.wind, sample_points(*nav.sea, 100, 401));
    worst_k = std::max(worst_k, r.max_killing_residual);
    worst_u = std::max(worst_u, r.max_unit_residual);
    if (!(r.max_killing_residual < 1e-8 && r.max_unit_residual < 1e-8)) expect(o, false, name);
  }
  expect(o, worst_k < 1e-8, "max killing=" + g(worst_k));
  expect(o, worst_u < 1e-8, "max unit=" + g(worst_u));
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::size_t chol_fail = 0, total = 0;
  double euler = 0.0, homog = 0.0;
  std::mt19937_64 rng(501);
  for (const auto& [name, nav] : kt::catalog_navs()) {
    const ConicKropinaMetric m = kt::kropina_metric(nav);
    for (int s = 0; s < 1000; ++s, ++total) {
      const auto [x, y] = sample_admissible(m, rng);
      const SymMatrix gy = m.fundamental_tensor(x, y);
      if (!cholesky_pd(gy)) ++chol_fail;
      const double F = m.F(x, y);
      euler = std::max(euler, std::abs(quad(gy.matrix(), y, y) - F * F) / (F * F));
      const Matrix<double> g7 = m.fundamental_tensor(x, kt::scaled(y, 7.0)).matrix();
      homog = std::max(homog, kt::max_abs_diff(g7, gy.matrix()) / max_abs(gy.matrix()));
    }
  }
  expect(o, chol_fail == 0, fmt::format("cholesky failures {}/{}", chol_fail, total));
  expect(o, euler <= 1e-9, "g(y,y)=F^2 rel=" + g(euler));
  expect(o, homog <= 1e-9, "0-homogeneity rel=" + g(homog));
  return o;
}

Outcome criterion6() {
  Outcome o;
  double roundtrip = 0.0, bsq = 0.0, kdep = 0.0, ind = 0.0;
  std::mt19937_64 rng(601);
  for (const auto& [name, nav] : kt::catalog_navs()) {
    const KropinaPtr kd = nav_to_kropina(nav);
    const NavigationData back = kropina_to_nav(kd);
    const std::size_t n = nav.dim();
    for (const Vec& x : sample_points(*nav.sea, 20, 602)) {
      roundtrip = std::max({roundtrip, kt::max_abs_diff(back.sea->metric(x).matrix(), nav.sea->metric(x).matrix()),
                            kt::max_abs_diff(back.wind->components(x), nav.wind->components(x))});
      for (const double k : {-1.0, 0.0, 0.7}) {
        const NavigationData nk = make_navigation(nav.sea, nav.wind, make_constant_scalar(n, k));
        const KropinaPtr kk = nav_to_kropina(nk);
        bsq = std::max(bsq, std::abs(kk->b_squared(x) - 4.0 * std::exp(-k)));
        Vec y = kt::gaussian(n, rng);
        if (dot(kk->b(x), y) < 0.0) y = kt::scaled(y, -1.0);
        if (dot(kk->b(x), y) < 1e-3 * norm(y)) continue;
        const double Fk = quad(kk->a(x).matrix(), y, y) / dot(kk->b(x), y);
        const double F0 = quad(kd->a(x).matrix(), y, y) / dot(kd->b(x), y);
        kdep = std::max(kdep, std::abs(Fk - F0) / F0);
      }
    }
    for (const Vec& x : sample_points(*nav.sea, 5, 603))
      for (const IndicatrixSample& s : indicatrix_samples(nav, x, 100, 604)) ind = std::max(ind, std::abs(s.dist - 1.0));
  }
  expect(o, roundtrip <= 1e-10, "roundtrip=" + g(roundtrip));
  expect(o, bsq <= 1e-10, "b^2-4e^-k=" + g(bsq));
  expect(o, kdep <= 1e-12, "k-dependence=" + g(kdep));
  expect(o, ind <= 1e-9, "|y-W|_h-1=" + g(ind));
  return o;
}

Outcome criterion7() {
  Outcome o;
  // Richardson-extrapolated x-differences in the energy route.
  const FdConfig fd{1e-4, 1e-5, true};
  for (const auto& [label, nav] : {kt::NamedNav{"sphere", sphere_navigation(kt::sphere_params())},
                                   kt::NamedNav{"euclidean", euclidean_navigation({0.6, 0.8})}}) {
    const ConicKropinaMetric m(make_kropina_generator(nav_to_kropina(nav)), fd);
    std::mt19937_64 rng(701);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      const auto [x, y] = sample_admissible(m, rng);
      const Vec G = m.spray(x, y), E = m.spray_energy_route(x, y);
      const double F = m.F(x, y);
      worst = std::max(worst, kt::max_abs_diff(G, E) / std::max(kt::max_abs(G), 1e-8 * F * F));
    }
    expect(o, worst < 1e-5, label + " rel=" + g(worst));
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::mt19937_64 rng(801);
  for (const auto& [label, nav] : {kt::NamedNav{"sphere", sphere_navigation(kt::sphere_params())},
                                   kt::NamedNav{"euclidean", euclidean_navigation({0.6, 0.8})}}) {
    const ConicKropinaMetric m = kt::kropina_metric(nav);
    double drift = 0.0, line = 0.0;
    std::size_t exits = 0;
    for (int s = 0; s < 10; ++s) {
      auto [x, y] = sample_admissible(m, rng);
      y = kt::scaled(y, 0.05 / m.F(x, y));
      const GeodesicResult r = integrate(m, x, y, 5.0, 1e-3);
      if (r.status != GeodesicStatus::completed) ++exits;
      drift = std::max(drift, r.max_rel_drift);
      for (const CurveSample& c : r.samples)
        for (std::size_t i = 0; i < x.size(); ++i) line = std::max(line, std::abs(c.x[i] - x[i] - c.t * y[i]));
    }
    expect(o, drift < 1e-6 && exits == 0, fmt::format("{} drift={} early exits={}", label, g(drift), exits));
    if (label == "euclidean") expect(o, line < 1e-6, "collinearity=" + g(line));
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(901);
  double flat = 0.0;
  for (const NavigationData& nav : {euclidean_navigation({0.6, 0.8}), cylinder_navigation(), torus_navigation()}) {
    const ConicKropinaMetric m = kt::kropina_metric(nav);
    for (int s = 0; s < 100; ++s) {
      const auto [x, y] = sample_admissible(m, rng);
      flat = std::max(flat, m.hamel_residual(x, y));
    }
  }
  const ConicKropinaMetric sphere = kt::kropina_metric(sphere_navigation(kt::sphere_params()));
  double curved = 0.0;
  for (int s = 0; s < 100; ++s) {
    const auto [x, y] = sample_admissible(sphere, rng);
    curved = std::max(curved, sphere.hamel_residual(x, y));
  }
  expect(o, flat < 1e-6, "flat max=" + g(flat));
  expect(o, curved > 1e-2, "sphere max=" + g(curved));
  return o;
}

Outcome criterion10() {
  Outcome o;
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (const std::size_t m : {2u, 3u})
    for (const double K : {1.0, 4.0})
      for (int s = 0; s < 100; ++s) {
        const SkewNormalForm f = moduli_normal_form(SphereKillingParams::random_conjugate(m, K, rng));
        for (double b : f.blocks) worst = std::max(worst, std::abs(b - std::sqrt(K)));
        if (f.blocks.size() != m) worst = std::numeric_limits<double>::infinity();
      }
  expect(o, worst <= 1e-9, "sphere max|a-sqrt(K)|=" + g(worst));

  double e_worst = 0.0;
  for (std::size_t n = 2; n <= 7; ++n)
    for (int s = 0; s < 20; ++s) {
      Vec C = kt::gaussian(n, rng);
      C = kt::scaled(C, 1.0 / norm(C));
      const EuclideanModuli em = euclidean_moduli(C);
      Vec e1(n, 0.0);
      e1[0] = 1.0;
      e_worst = std::max({e_worst, kt::max_abs_diff(em.representative, e1), em.orthogonality_residual,
                          std::abs(em.det - 1.0)});
    }
  expect(o, e_worst <= 1e-9, "euclidean orbit=" + g(e_worst));
  return o;
}

Outcome criterion11() {
  Outcome o;
  const std::vector<Vec> pts = sample_points(*make_euclidean(2), 10, 1101);
  const KropinaPtr k1 = nav_to_kropina(euclidean_navigation({1.0, 0.0}));
  std::mt19937_64 rng(1102);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi), kdist(-1.0, 1.0);
  std::size_t agree = 0, expected = 0;
  for (int s = 0; s < 20; ++s) {
    const double a = angle(rng), k = s % 4 < 2 ? kdist(rng) : 0.0;
    const bool matched = s % 2 == 0;
    const double c = std::cos(a), sn = std::sin(a);
    const Vec W2{c, sn};
    const double aw = matched ? a : a + 0.5;
    const Matrix<double> R = kt::mat({{std::cos(aw), -std::sin(aw)}, {std::sin(aw), std::cos(aw)}});
    const IsometryReport r = conic_isometry_check(IsometryWitness::affine(R, {0.2, -0.4}), k1,
                                                  nav_to_kropina(euclidean_navigation(W2, k)), pts);
    if (r.pass_i == r.pass_ii && r.pass_ii == r.pass_iii) ++agree;
    if (r.pass == matched) ++expected;
  }
  expect(o, agree == 20, fmt::format("conditions agree {}/20", agree));
  expect(o, expected == 20, fmt::format("expected verdict {}/20", expected));
  return o;
}

Outcome criterion12() {
  Outcome o;
  for (const double K : {1.0, 4.0}) {
    const ModelPtr sphere = make_sphere_projective(2, K, Hemisphere::east);
    const double dev = flag_dev(ConicKropinaMetric(make_quadratic_generator(sphere)), K, 20, 1201);
    expect(o, dev <= 1e-4, fmt::format("K={} max dev={}", K, g(dev)));
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string command_of(const fs::path& config) {
  const std::string text = slurp(config);
  const auto key = text.find("\"command\"");
  const auto open = text.find('"', text.find(':', key) + 1);
  return text.substr(open + 1, text.find('"', open + 1) - open - 1);
}

Outcome criterion13() {
  Outcome o;
  const fs::path work = fs::path(KROPINA_ACCEPTANCE_WORKDIR) / "determinism";
  fs::create_directories(work);
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(KROPINA_CONFIG_DIR))
    if (entry.path().extension() == ".json") configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  std::size_t identical = 0;
  for (const fs::path& cfg : configs) {
    std::string outputs[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = work / fmt::format("{}.{}", cfg.stem().string(), run);
      const fs::path err = work / fmt::format("{}.{}.stderr", cfg.stem().string(), run);
      fs::remove(out);
      fs::remove(fs::path(out.string() + ".json"));
      const std::string cmd = fmt::format("\"{}\" {} --config \"{}\" --out \"{}\" 2> \"{}\"", KROPINA_CLI_PATH,
                                          command_of(cfg), cfg.string(), out.string(), err.string());
      const int status = std::system(cmd.c_str());
      outputs[run] = std::to_string(status) + "\n" + slurp(out) + "\n" + slurp(out.string() + ".json") + "\n" + slurp(err);
    }
    if (outputs[0] == outputs[1]) ++identical;
    else expect(o, false, cfg.filename().string());
  }
  expect(o, identical == configs.size() && !configs.empty(),
         fmt::format("byte-identical {}/{} configs", identical, configs.size()));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {
      criterion1, criterion2, criterion3,  criterion4,  criterion5,  criterion6, criterion7,
      criterion8, criterion9, criterion10, criterion11, criterion12, criterion13};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
