#include "kropina/kropina.h"

#include <algorithm>
#include <exception>
#include <new>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "core/conic.hpp"

struct kr_metric {
  kropina::ConicKropinaMetric metric;
};

struct kr_report {
  int exit_code = 0;
  std::string summary;
  std::string json;
  std::optional<std::string> csv;
  std::optional<std::string> report_path;
  std::optional<std::string> csv_path;
};

namespace {

thread_local std::string g_last_error;

kr_status status_of(kropina::ErrorKind k) {
  using kropina::ErrorKind;
  switch (k) {
    case ErrorKind::input: return KR_ERR_INPUT;
    case ErrorKind::domain: return KR_ERR_DOMAIN;
    case ErrorKind::outside_cone: return KR_ERR_OUTSIDE_CONE;
    case ErrorKind::near_boundary: return KR_ERR_NEAR_BOUNDARY;
    case ErrorKind::degenerate: return KR_ERR_DEGENERATE;
    case ErrorKind::validation: return KR_ERR_VALIDATION;
    case ErrorKind::sampling: return KR_ERR_SAMPLING;
    case ErrorKind::config: return KR_ERR_CONFIG;
  }
  return KR_ERR_INTERNAL;
}

/// Runs `f`, translating exceptions into a status and the thread's last error.
template <class Fn>
kr_status guarded(Fn&& f) {
  try {
    f();
    g_last_error.clear();
    return KR_OK;
  } catch (const kropina::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return KR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return KR_ERR_INTERNAL;
  }
}

std::span<const double> vec(const kr_metric* m, const double* p) { return {p, m->metric.dim()}; }

void require(bool ok, const char* what) {
  if (!ok) throw kropina::InputError(what);
}

const char* kind_name(kropina::ErrorKind k) {
  using kropina::ErrorKind;
  switch (k) {
    case ErrorKind::input: return "input";
    case ErrorKind::domain: return "domain";
    case ErrorKind::outside_cone: return "outside_cone";
    case ErrorKind::near_boundary: return "near_boundary";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::validation: return "validation";
    case ErrorKind::sampling: return "sampling";
    case ErrorKind::config: return "config";
  }
  return "internal";
}

}  // namespace

extern "C" {

const char* kr_last_error(void) { return g_last_error.c_str(); }

kr_status kr_metric_create(const char* model_json, kr_metric** out) {
  return guarded([&] {
    require(model_json && out, "null argument");
    *out = nullptr;
    const kropina::app::BuiltModel bm = kropina::app::build_model(kropina::app::parse_model(model_json));
    *out = new kr_metric{kropina::ConicKropinaMetric(kropina::make_kropina_generator(bm.kropina))};
  });
}

void kr_metric_destroy(kr_metric* m) { delete m; }

size_t kr_metric_dim(const kr_metric* m) { return m ? m->metric.dim() : 0; }

kr_status kr_metric_domain_contains(const kr_metric* m, const double* x, const double* y, int* out) {
  return guarded([&] {
    require(m && x && y && out, "null argument");
    *out = m->metric.domain_contains(vec(m, x), vec(m, y)) ? 1 : 0;
  });
}

kr_status kr_metric_F(const kr_metric* m, const double* x, const double* y, double* out) {
  return guarded([&] {
    require(m && x && y && out, "null argument");
    *out = m->metric.F(vec(m, x), vec(m, y));
  });
}

kr_status kr_metric_fundamental_tensor(const kr_metric* m, const double* x, const double* y, double* out) {
  return guarded([&] {
    require(m && x && y && out, "null argument");
    const kropina::SymMatrix g = m->metric.fundamental_tensor(vec(m, x), vec(m, y));
    const std::size_t n = g.dim();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] = g(i, j);
  });
}

kr_status kr_metric_spray(const kr_metric* m, const double* x, const double* y, double* out) {
  return guarded([&] {
    require(m && x && y && out, "null argument");
    const kropina::Vec G = m->metric.spray(vec(m, x), vec(m, y));
    std::copy(G.begin(), G.end(), out);
  });
}

kr_status kr_metric_flag_curvature(const kr_metric* m, const double* x, const double* y, const double* X,
                                   double* out) {
  return guarded([&] {
    require(m && x && y && X && out, "null argument");
    *out = m->metric.flag_curvature(vec(m, x), vec(m, y), vec(m, X));
  });
}

kr_status kr_metric_hamel_residual(const kr_metric* m, const double* x, const double* y, double* out) {
  return guarded([&] {
    require(m && x && y && out, "null argument");
    *out = m->metric.hamel_residual(vec(m, x), vec(m, y));
  });
}

kr_status kr_run_command(const char* command, const char* config_json, const uint64_t* seed_override,
                         kr_report** out) {
  if (!out) {
    g_last_error = "null argument";
    return KR_ERR_INPUT;
  }
  *out = nullptr;
  kr_report* rep = new (std::nothrow) kr_report;
  if (!rep) {
    g_last_error = "out of memory";
    return KR_ERR_INTERNAL;
  }
  const std::string cmd = command ? command : "";
  std::optional<kropina::ErrorKind> failed;
  const kr_status st = guarded([&] {
    try {
      if (!command || !config_json) throw kropina::InputError("null argument");
      kropina::app::RunConfig cfg = kropina::app::parse_config(config_json);
      rep->report_path = cfg.output.report;
      if (seed_override) cfg.sampling.seed = *seed_override;
      kropina::app::CommandResult r = kropina::app::run_command(cmd, cfg);
      rep->exit_code = r.exit_code;
      rep->summary = std::move(r.summary);
      rep->json = std::move(r.report_json);
      rep->csv = std::move(r.csv);
      rep->report_path = std::move(r.report_path);
      rep->csv_path = std::move(r.csv_path);
    } catch (const kropina::Error& e) {
      failed = e.kind();
      throw;
    }
  });
  if (st != KR_OK) {
    // Failure report: decision false plus the error; written to the configured report path.
    const char* kind = failed ? kind_name(*failed) : "internal";
    rep->exit_code = failed ? kropina::app::exit_code_for(*failed) : kropina::app::kExitCheckFailed;
    nlohmann::ordered_json j;
    j["check"] = cmd;
    j["decision"] = false;
    j["error"] = {{"kind", kind}, {"message", g_last_error}};
    j["exit_code"] = rep->exit_code;
    rep->json = j.dump(2) + "\n";
    rep->summary = cmd + ": error (" + kind + "): " + g_last_error;
    rep->csv.reset();
    rep->csv_path.reset();
  }
  *out = rep;
  return st;
}

void kr_report_destroy(kr_report* r) { delete r; }

int kr_report_exit_code(const kr_report* r) { return r ? r->exit_code : 2; }

const char* kr_report_summary(const kr_report* r) { return r ? r->summary.c_str() : ""; }

const char* kr_report_json(const kr_report* r) { return r ? r->json.c_str() : ""; }

const char* kr_report_csv(const kr_report* r) { return r && r->csv ? r->csv->c_str() : nullptr; }

const char* kr_report_artifact_path(const kr_report* r, kr_artifact which) {
  if (!r) return nullptr;
  const std::optional<std::string>& p = which == KR_ARTIFACT_CSV ? r->csv_path : r->report_path;
  return p ? p->c_str() : nullptr;
}

}  // extern "C"
