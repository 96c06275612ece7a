#include "app/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace kropina::app {

namespace {

using json = nlohmann::json;

/// Typed, key-checked view of one JSON object.
class Section {
 public:
  Section(const json& j, std::string where, std::set<std::string> allowed) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
    for (const auto& [key, value] : j_.items())
      if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where_);
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) const { return j_.at(key); }
  std::string path(const std::string& key) const { return where_ + "." + key; }

  double number(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path(key) + " must be finite");
    return d;
  }
  double positive(const std::string& key) const {
    const double d = number(key);
    if (!(d > 0.0)) throw ConfigError(path(key) + " must be positive");
    return d;
  }
  std::uint64_t uint(const std::string& key) const {
    const json& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError(path(key) + " must be a nonnegative integer");
  }
  std::string string(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(path(key) + " must be a string");
    return v.get<std::string>();
  }
  bool boolean(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key) + " must be a boolean");
    return v.get<bool>();
  }
  Vec vector(const std::string& key) const { return to_vector(j_.at(key), path(key)); }
  std::vector<Vec> matrix(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(path(key) + " must be a nonempty array of rows");
    std::vector<Vec> rows;
    for (std::size_t i = 0; i < v.size(); ++i) rows.push_back(to_vector(v[i], path(key) + "[" + std::to_string(i) + "]"));
    for (const Vec& r : rows)
      if (r.size() != rows.size()) throw ConfigError(path(key) + " must be square");
    return rows;
  }

 private:
  static Vec to_vector(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a nonempty array of numbers");
    Vec out;
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError(where + " must contain only numbers");
      out.push_back(e.get<double>());
      if (!std::isfinite(out.back())) throw ConfigError(where + " must be finite");
    }
    return out;
  }

  const json& j_;
  std::string where_;
};

ModelSpec model_from(const json& j) {
  if (!j.is_object() || !j.contains("tag")) throw ConfigError("model needs a tag");
  if (!j.at("tag").is_string()) throw ConfigError("model.tag must be a string");
  const std::string tag = j.at("tag").get<std::string>();
  std::set<std::string> keys;
  if (tag == "euclidean") {
    keys = {"tag", "n", "C", "k"};
  } else if (tag == "cylinder" || tag == "torus" || tag == "s3_chart") {
    keys = {"tag", "k"};
  } else if (tag == "sphere_projective") {
    keys = {"tag", "m", "K", "Q", "C", "k", "hemisphere"};
  } else if (tag == "kropina_constant") {
    keys = {"tag", "a", "b"};
  } else {
    throw ConfigError("unknown model tag '" + tag + "'");
  }
  const Section s(j, "model", keys);
  ModelSpec m;
  m.tag = tag;
  if (s.has("k")) m.k = s.number("k");
  if (tag == "euclidean") {
    if (s.has("C")) m.C = s.vector("C");
    if (s.has("n")) {
      m.n = s.uint("n");
      if (m.n == 0) throw ConfigError("model.n must be positive");
      if (m.C && m.C->size() != m.n) throw ConfigError("model.C does not have n entries");
    } else if (m.C) {
      m.n = m.C->size();
    }
  } else if (tag == "sphere_projective") {
    if (s.has("m")) m.m = s.uint("m");
    if (m.m < 2) throw ConfigError("model.m must be at least 2");
    if (s.has("K")) m.K = s.positive("K");
    if (s.has("Q") != s.has("C")) throw ConfigError("model.Q and model.C must be given together");
    if (s.has("Q")) {
      m.Q = s.matrix("Q");
      m.C = s.vector("C");
      if (m.Q->size() != 2 * m.m - 1 || m.C->size() != 2 * m.m - 1)
        throw ConfigError("model.Q and model.C must have dimension 2m-1");
    }
    if (s.has("hemisphere")) {
      const std::string h = s.string("hemisphere");
      if (h == "east") m.hemisphere = Hemisphere::east;
      else if (h == "west") m.hemisphere = Hemisphere::west;
      else throw ConfigError("model.hemisphere must be 'east' or 'west'");
    }
  } else if (tag == "kropina_constant") {
    if (!s.has("a") || !s.has("b")) throw ConfigError("kropina_constant needs a and b");
    m.a = s.matrix("a");
    m.b = s.vector("b");
    if (m.a->size() != m.b->size()) throw ConfigError("model.a and model.b dimensions disagree");
    m.n = m.b->size();
  }
  return m;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

Matrix<double> to_matrix(const std::vector<Vec>& rows) {
  Matrix<double> m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace

ModelSpec parse_model(const std::string& text) { return model_from(parse_json(text)); }

RunConfig parse_config(const std::string& text) {
  const json j = parse_json(text);
  const Section top(j, "config", {"command", "model", "check", "sampling", "integration", "point", "fd", "output"});
  RunConfig c;
  if (top.has("command")) c.command = top.string("command");
  if (!top.has("model")) throw ConfigError("config needs a model section");
  c.model = model_from(top.raw("model"));
  if (top.has("check")) {
    const Section s(top.raw("check"), "check", {"K"});
    if (s.has("K")) c.check_K = s.number("K");
  }
  if (top.has("sampling")) {
    const Section s(top.raw("sampling"), "sampling", {"seed", "n_samples", "tolerances"});
    if (s.has("seed")) c.sampling.seed = s.uint("seed");
    if (s.has("n_samples")) {
      c.sampling.n_samples = s.uint("n_samples");
      if (c.sampling.n_samples == 0) throw ConfigError("sampling.n_samples must be positive");
    }
    if (s.has("tolerances")) {
      const Section t(s.raw("tolerances"), "sampling.tolerances",
                      {"killing", "sectional", "flag", "parallel", "roundtrip", "indicatrix", "drift", "moduli"});
      Tolerances& tol = c.sampling.tolerances;
      if (t.has("killing")) tol.killing = t.positive("killing");
      if (t.has("sectional")) tol.sectional = t.positive("sectional");
      if (t.has("flag")) tol.flag = t.positive("flag");
      if (t.has("parallel")) tol.parallel = t.positive("parallel");
      if (t.has("roundtrip")) tol.roundtrip = t.positive("roundtrip");
      if (t.has("indicatrix")) tol.indicatrix = t.positive("indicatrix");
      if (t.has("drift")) tol.drift = t.positive("drift");
      if (t.has("moduli")) tol.moduli = t.positive("moduli");
    }
  }
  if (top.has("integration")) {
    const Section s(top.raw("integration"), "integration", {"x0", "y0", "t_max", "dt"});
    if (s.has("x0")) c.integration.x0 = s.vector("x0");
    if (s.has("y0")) c.integration.y0 = s.vector("y0");
    if (s.has("t_max")) c.integration.t_max = s.positive("t_max");
    if (s.has("dt")) c.integration.dt = s.positive("dt");
  }
  if (top.has("point")) c.point = top.vector("point");
  if (top.has("fd")) {
    const Section s(top.raw("fd"), "fd", {"step_x", "step_y", "richardson"});
    if (s.has("step_x")) c.fd.step_x = s.positive("step_x");
    if (s.has("step_y")) c.fd.step_y = s.positive("step_y");
    if (s.has("richardson")) c.fd.richardson = s.boolean("richardson");
  }
  if (top.has("output")) {
    const Section s(top.raw("output"), "output", {"report", "csv"});
    if (s.has("report")) c.output.report = s.string("report");
    if (s.has("csv")) c.output.csv = s.string("csv");
  }
  return c;
}

BuiltModel build_model(const ModelSpec& spec) {
  BuiltModel bm;
  if (spec.tag == "euclidean") {
    Vec C = spec.C ? *spec.C : Vec(spec.n, 0.0);
    if (!spec.C) C[0] = 1.0;
    bm.euclidean_C = C;
    bm.nav = euclidean_navigation(std::move(C), spec.k);
  } else if (spec.tag == "cylinder") {
    bm.nav = cylinder_navigation(spec.k);
  } else if (spec.tag == "torus") {
    bm.nav = torus_navigation(spec.k);
  } else if (spec.tag == "s3_chart") {
    bm.nav = s3_navigation(spec.k);
  } else if (spec.tag == "sphere_projective") {
    bm.sphere = spec.Q ? SphereKillingParams::make(spec.m, spec.K, SkewMatrix(to_matrix(*spec.Q)), *spec.C)
                       : SphereKillingParams::canonical(spec.m, spec.K);
    bm.nav = sphere_navigation(*bm.sphere, spec.hemisphere, spec.k);
  } else if (spec.tag == "kropina_constant") {
    bm.kropina = make_constant_kropina(SymMatrix(to_matrix(*spec.a)), *spec.b);
    bm.constant_curvature = 0.0;
    return bm;
  } else {
    throw ConfigError("unknown model tag '" + spec.tag + "'");
  }
  bm.kropina = nav_to_kropina(*bm.nav);
  bm.constant_curvature = bm.nav->sea->constant_curvature();
  return bm;
}

}  // namespace kropina::app
