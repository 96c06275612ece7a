#include "app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include <json.hpp>

#include "core/format.hpp"
#include "core/geodesics.hpp"

namespace kropina::app {

namespace {

using ojson = nlohmann::ordered_json;

ojson to_json(const Matrix<double>& m) {
  ojson rows = ojson::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string fmt12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join12(const Vec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt12(v[i]);
  return s;
}

double max_abs_diff(const Matrix<double>& a, const Matrix<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double orthogonality_residual(const Matrix<double>& B) {
  const Matrix<double> btb = transpose(B) * B;
  double m = 0.0;
  for (std::size_t i = 0; i < btb.rows(); ++i)
    for (std::size_t j = 0; j < btb.cols(); ++j) m = std::max(m, std::abs(btb(i, j) - (i == j ? 1.0 : 0.0)));
  return m;
}

/// Report skeleton shared by every command; keys appear in this order.
struct Report {
  std::string check;
  ojson residuals = ojson::object();
  bool decision = false;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
  ojson tolerances = ojson::object();
  ojson extras = ojson::object();

  std::string dump() const {
    ojson j;
    j["check"] = check;
    j["residuals"] = residuals;
    j["decision"] = decision;
    j["seed"] = seed;
    j["n_samples"] = n_samples;
    j["tolerances"] = tolerances;
    for (const auto& [k, v] : extras.items()) j[k] = v;
    return j.dump(2) + "\n";
  }
};

Report start(const std::string& check, const RunConfig& c) {
  Report r;
  r.check = check;
  r.seed = c.sampling.seed;
  r.n_samples = c.sampling.n_samples;
  r.extras["model"] = c.model.tag;
  return r;
}

CommandResult finish(const Report& r, int exit_code, std::string summary, const RunConfig& c) {
  CommandResult out;
  out.exit_code = exit_code;
  out.summary = std::move(summary);
  out.report_json = r.dump();
  out.report_path = c.output.report;
  out.csv_path = c.output.csv;
  return out;
}

double k_at(const NavigationData& nav, const Vec& x) { return nav.exponent->jet(std::span<const double>(x)).value; }

NavigationData navigation_of(const BuiltModel& bm) { return bm.nav ? *bm.nav : kropina_to_nav(bm.kropina); }

/// Configured point (checked against the chart) or the first seeded chart sample.
Vec point_of(const RunConfig& c, const BuiltModel& bm) {
  if (c.point) {
    if (c.point->size() != bm.kropina->dim()) throw ConfigError("point has the wrong dimension");
    bm.kropina->require_valid(*c.point);
    return *c.point;
  }
  std::mt19937_64 rng(c.sampling.seed);
  return bm.kropina->sample_point(rng);
}

CommandResult check_cc(const RunConfig& c) {
  const BuiltModel bm = build_model(c.model);
  const NavigationData nav = navigation_of(bm);
  const std::optional<double> K = c.check_K ? c.check_K : bm.constant_curvature;
  if (!K) throw ConfigError("check.K is required for a base without known constant curvature");
  const Tolerances& t = c.sampling.tolerances;
  const CcReport cc = cc_check(nav, *K, c.sampling.n_samples, c.sampling.seed, {t.killing, t.sectional, t.flag});

  Report r = start("check-cc", c);
  r.residuals["killing_residual"] = cc.killing_residual;
  r.residuals["unit_residual"] = cc.unit_residual;
  r.residuals["sectional_curvature_max_dev"] = cc.sectional_max_dev;
  r.residuals["flag_curvature_max_dev"] = cc.flag_max_dev;
  r.decision = cc.confirmed;
  r.tolerances = {{"killing", t.killing}, {"sectional", t.sectional}, {"flag", t.flag}};
  r.extras["K"] = *K;
  r.extras["is_cc"] = cc.is_cc;
  r.extras["confirmed"] = cc.confirmed;
  r.extras["n_planes"] = cc.n_planes;
  r.extras["n_flags"] = cc.n_flags;
  const std::string summary = std::string("check-cc: ") + (cc.confirmed ? "confirmed" : "not confirmed") +
                              " K=" + fmt12(*K) + " flag_curvature_max_dev=" + fmt12(cc.flag_max_dev);
  return finish(r, cc.confirmed ? kExitOk : kExitCheckFailed, summary, c);
}

/// Max chart distance of x(t) − x0 from the line spanned by y0.
double collinearity_residual(const GeodesicResult& g, const Vec& x0, const Vec& y0) {
  const double ny = norm(std::span<const double>(y0));
  double m = 0.0;
  for (const CurveSample& s : g.samples) {
    Vec d(x0.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = s.x[i] - x0[i];
    const double along = dot(std::span<const double>(d), std::span<const double>(y0)) / ny;
    double perp2 = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double e = d[i] - along * y0[i] / ny;
      perp2 += e * e;
    }
    m = std::max(m, std::sqrt(perp2));
  }
  return m;
}

CommandResult geodesic(const RunConfig& c) {
  const Integration& in = c.integration;
  if (!in.x0 || !in.y0) throw ConfigError("integration.x0 and integration.y0 are required");
  const BuiltModel bm = build_model(c.model);
  const std::size_t n = bm.kropina->dim();
  if (in.x0->size() != n || in.y0->size() != n) throw ConfigError("x0 and y0 must match the model dimension");
  const ConicKropinaMetric metric(make_kropina_generator(bm.kropina), c.fd);
  const GeodesicResult g = integrate(metric, *in.x0, *in.y0, in.t_max, in.dt);

  Report r = start("geodesic", c);
  const double tol = c.sampling.tolerances.drift;
  r.residuals["F_drift"] = g.max_rel_drift;
  r.residuals["collinearity"] = collinearity_residual(g, *in.x0, *in.y0);
  r.decision = g.max_rel_drift < tol;
  r.tolerances = {{"drift", tol}};
  r.extras["status"] = to_string(g.status);
  if (g.status != GeodesicStatus::completed) r.extras["t_exit"] = g.t_exit;
  r.extras["f_length"] = g.f_length;
  r.extras["t_max"] = in.t_max;
  r.extras["dt"] = in.dt;
  r.extras["n_points"] = g.samples.size();
  const std::string summary = "geodesic: " + to_string(g.status) + " f_length=" + fmt12(g.f_length) +
                              " F_drift=" + fmt12(g.max_rel_drift);
  CommandResult out = finish(r, r.decision ? kExitOk : kExitCheckFailed, summary, c);
  out.csv = geodesic_csv(g.samples);
  return out;
}

CommandResult convert(const RunConfig& c) {
  const BuiltModel bm = build_model(c.model);
  const Vec x = point_of(c, bm);
  const double tol = c.sampling.tolerances.roundtrip;
  std::mt19937_64 rng(kValidationSeed);
  std::vector<Vec> pts;
  for (std::size_t s = 0; s < kValidationSamples; ++s) pts.push_back(bm.kropina->sample_point(rng));

  Report r = start("convert", c);
  double roundtrip = 0.0;
  double identity = 0.0;  // |b² − 4e^{−k}|
  if (!bm.nav) {
    const NavigationData nav = kropina_to_nav(bm.kropina);
    const KropinaPtr back = nav_to_kropina(nav);
    for (const Vec& p : pts) {
      roundtrip = std::max(roundtrip, max_abs_diff(back->a(p).matrix(), bm.kropina->a(p).matrix()));
      roundtrip = std::max(roundtrip, max_abs_diff(back->b(p), bm.kropina->b(p)));
      identity = std::max(identity, std::abs(bm.kropina->b_squared(p) - 4.0 * std::exp(-k_at(nav, p))));
    }
    r.extras["direction"] = "kropina_to_navigation";
    r.extras["point"] = x;
    r.extras["k"] = k_at(nav, x);
    r.extras["h"] = to_json(nav.sea->metric(x).matrix());
    r.extras["W"] = nav.wind->components(x);
  } else {
    const NavigationData& nav = *bm.nav;
    const NavigationData back = kropina_to_nav(bm.kropina);
    for (const Vec& p : pts) {
      roundtrip = std::max(roundtrip, max_abs_diff(back.sea->metric(p).matrix(), nav.sea->metric(p).matrix()));
      roundtrip = std::max(roundtrip, max_abs_diff(back.wind->components(p), nav.wind->components(p)));
      roundtrip = std::max(roundtrip, std::abs(k_at(back, p) - k_at(nav, p)));
      identity = std::max(identity, std::abs(bm.kropina->b_squared(p) - 4.0 * std::exp(-k_at(nav, p))));
    }
    r.extras["direction"] = "navigation_to_kropina";
    r.extras["point"] = x;
    r.extras["a"] = to_json(bm.kropina->a(x).matrix());
    r.extras["b"] = bm.kropina->b(x);
    r.extras["b_squared"] = bm.kropina->b_squared(x);
  }
  r.residuals["roundtrip"] = roundtrip;
  r.residuals["b_squared_identity"] = identity;
  r.decision = roundtrip < tol && identity < tol;
  r.n_samples = kValidationSamples;
  r.tolerances = {{"roundtrip", tol}};
  const std::string summary = std::string("convert: ") + (r.decision ? "ok" : "failed") +
                              " roundtrip=" + fmt12(roundtrip) + " b_squared_identity=" + fmt12(identity);
  return finish(r, r.decision ? kExitOk : kExitCheckFailed, summary, c);
}

CommandResult moduli(const RunConfig& c) {
  const BuiltModel bm = build_model(c.model);
  const double tol = c.sampling.tolerances.moduli;
  Report r = start("moduli", c);
  r.tolerances = {{"moduli", tol}};
  r.n_samples = 0;
  std::string summary;
  if (bm.sphere) {
    const SkewNormalForm nf = moduli_normal_form(*bm.sphere);
    const double root = std::sqrt(bm.sphere->K());
    double block_dev = 0.0;
    for (double a : nf.blocks) block_dev = std::max(block_dev, std::abs(a - root));
    const Matrix<double>& B = nf.transform;
    const double transform = max_abs_diff(transpose(B) * bm.sphere->omega().matrix() * B, nf.block_matrix());
    const double ortho = orthogonality_residual(B);
    r.residuals["block_deviation"] = block_dev;
    r.residuals["transform"] = transform;
    r.residuals["orthogonality"] = ortho;
    r.decision = block_dev < tol && transform < tol && ortho < tol;
    r.extras["blocks"] = nf.blocks;
    r.extras["transform"] = to_json(B);
    summary = "moduli: " + join12(nf.blocks);
  } else if (bm.euclidean_C) {
    const EuclideanModuli em = euclidean_moduli(*bm.euclidean_C);
    Vec e1(em.representative.size(), 0.0);
    e1[0] = 1.0;
    const double rep_dev = max_abs_diff(em.representative, e1);
    r.residuals["representative_deviation"] = rep_dev;
    r.residuals["orthogonality"] = em.orthogonality_residual;
    r.residuals["determinant"] = std::abs(em.det - 1.0);
    r.decision = rep_dev < tol && em.orthogonality_residual < tol && std::abs(em.det - 1.0) < tol;
    r.extras["representative"] = em.representative;
    r.extras["rotation"] = to_json(em.rotation);
    summary = "moduli: " + join12(em.representative);
  } else {
    throw ConfigError("moduli needs a sphere_projective or euclidean model");
  }
  return finish(r, r.decision ? kExitOk : kExitCheckFailed, summary, c);
}

CommandResult hamel(const RunConfig& c) {
  const BuiltModel bm = build_model(c.model);
  const NavigationData nav = navigation_of(bm);
  const ConicKropinaMetric metric(make_kropina_generator(bm.kropina), c.fd);
  std::mt19937_64 rng(c.sampling.seed);
  double hmax = 0.0, hsum = 0.0, hmin = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < c.sampling.n_samples; ++s) {
    const auto [x, y] = sample_admissible(metric, rng);
    const double v = metric.hamel_residual(x, y);
    hmax = std::max(hmax, v);
    hmin = std::min(hmin, v);
    hsum += v;
  }
  const double tol = c.sampling.tolerances.parallel;
  const ProjectiveFlatnessReport pf =
      projective_flatness_decision(nav, sample_points(*nav.sea, c.sampling.n_samples, c.sampling.seed), 0,
                                   c.sampling.seed, tol);

  Report r = start("hamel", c);
  r.residuals["hamel_max"] = hmax;
  r.residuals["hamel_mean"] = hsum / static_cast<double>(c.sampling.n_samples);
  r.residuals["hamel_min"] = hmin;
  r.residuals["parallel"] = pf.parallel_residual;
  r.residuals["s_condition"] = pf.s_condition_residual;
  r.decision = pf.decision;
  r.tolerances = {{"parallel", tol}};
  r.extras["base_projectively_flat"] = to_string(pf.riemann_proj_flat);
  const std::string summary = "hamel: max=" + fmt12(hmax) + " mean=" + fmt12(hsum / double(c.sampling.n_samples)) +
                              " min=" + fmt12(hmin) + " projectively_flat=" + (pf.decision ? "true" : "false");
  return finish(r, kExitOk, summary, c);
}

CommandResult indicatrix(const RunConfig& c) {
  const BuiltModel bm = build_model(c.model);
  const NavigationData nav = navigation_of(bm);
  const Vec x = point_of(c, bm);
  const auto samples = indicatrix_samples(nav, x, c.sampling.n_samples, c.sampling.seed);
  const std::size_t n = x.size();

  std::string csv;
  for (std::size_t i = 0; i < n; ++i) csv += "u" + std::to_string(i + 1) + ",";
  for (std::size_t i = 0; i < n; ++i) csv += "y" + std::to_string(i + 1) + ",";
  csv += "F,dist_h\n";
  double f_dev = 0.0, d_dev = 0.0;
  for (const IndicatrixSample& s : samples) {
    for (double v : s.u) csv += fmt17(v) + ",";
    for (double v : s.y) csv += fmt17(v) + ",";
    csv += fmt17(s.F) + "," + fmt17(s.dist) + "\n";
    f_dev = std::max(f_dev, std::abs(s.F - 1.0));
    d_dev = std::max(d_dev, std::abs(s.dist - 1.0));
  }

  const double tol = c.sampling.tolerances.indicatrix;
  Report r = start("indicatrix", c);
  r.residuals["F_unit_max_dev"] = f_dev;
  r.residuals["dist_h_max_dev"] = d_dev;
  r.decision = f_dev < tol && d_dev < tol;
  r.tolerances = {{"indicatrix", tol}};
  r.extras["point"] = x;
  r.extras["n_points"] = samples.size();
  const std::string summary = std::string("indicatrix: ") + (r.decision ? "ok" : "failed") + " points=" +
                              std::to_string(samples.size()) + " F_unit_max_dev=" + fmt12(f_dev);
  CommandResult out = finish(r, r.decision ? kExitOk : kExitCheckFailed, summary, c);
  out.csv = std::move(csv);
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"check-cc", "geodesic", "convert", "moduli", "hamel", "indicatrix"};
  return names;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return kExitConfig;
    case ErrorKind::sampling: return kExitSampling;
    default: return kExitCheckFailed;
  }
}

CommandResult run_command(const std::string& command, const RunConfig& config) {
  if (config.command && *config.command != command)
    throw ConfigError("config is for command '" + *config.command + "', not '" + command + "'");
  if (command == "check-cc") return check_cc(config);
  if (command == "geodesic") return geodesic(config);
  if (command == "convert") return convert(config);
  if (command == "moduli") return moduli(config);
  if (command == "hamel") return hamel(config);
  if (command == "indicatrix") return indicatrix(config);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace kropina::app
