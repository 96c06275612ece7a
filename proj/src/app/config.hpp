#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/classify.hpp"
#include "core/conic.hpp"
#include "core/navigation.hpp"

namespace kropina::app {

/// Model section. `tag` selects the catalog entry; unused fields must be absent.
struct ModelSpec {
  std::string tag;  // euclidean | cylinder | torus | s3_chart | sphere_projective | kropina_constant
  std::size_t n = 2;
  std::size_t m = 2;
  double K = 1.0;
  std::optional<std::vector<std::vector<double>>> Q;
  std::optional<Vec> C;
  double k = 0.0;
  Hemisphere hemisphere = Hemisphere::east;
  std::optional<std::vector<std::vector<double>>> a;
  std::optional<Vec> b;
};

struct Tolerances {
  double killing = 1e-8;
  double sectional = 1e-4;
  double flag = 1e-3;
  double parallel = 1e-8;
  double roundtrip = 1e-10;
  double indicatrix = 1e-9;
  double drift = 1e-6;
  double moduli = 1e-9;
};

struct Sampling {
  std::uint64_t seed = 0;
  std::size_t n_samples = 50;
  Tolerances tolerances;
};

struct Integration {
  std::optional<Vec> x0, y0;
  double t_max = 5.0;
  double dt = 1e-3;
};

struct Output {
  std::optional<std::string> report;
  std::optional<std::string> csv;
};

struct RunConfig {
  std::optional<std::string> command;
  ModelSpec model;
  std::optional<double> check_K;
  Sampling sampling;
  Integration integration;
  std::optional<Vec> point;
  FdConfig fd;
  Output output;
};

/// Parses one JSON document. Throws ConfigError on malformed JSON, unknown keys, wrong
/// types, or non-positive tolerances.
RunConfig parse_config(const std::string& text);
ModelSpec parse_model(const std::string& text);

/// Everything a command needs about the model, built from a spec.
struct BuiltModel {
  std::optional<NavigationData> nav;            // absent for kropina_constant
  KropinaPtr kropina;
  std::optional<SphereKillingParams> sphere;    // sphere_projective only
  std::optional<Vec> euclidean_C;               // euclidean only
  std::optional<double> constant_curvature;
};

/// Throws ValidationError for inadmissible model data (e.g. violated Killing constraints).
BuiltModel build_model(const ModelSpec& spec);

}  // namespace kropina::app
