// Batch front end: `kropina <command> --config <path> [--out <path>] [--seed <u64>]`.
//
// The summary line goes to stderr. The primary artifact (CSV for geodesic and
// indicatrix, the JSON report otherwise) goes to --out, else to the path named in the
// config, else to stdout. For CSV commands the JSON report goes to the config's report
// path, else next to --out as <out>.json.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kropina/kropina.h"

namespace {

constexpr int kExitConfig = 2;

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

std::optional<std::string> path_of(const kr_report* r, kr_artifact which) {
  const char* p = kr_report_artifact_path(r, which);
  return p ? std::optional<std::string>(p) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kropina metric checks, conversions and geodesics"};
  std::string command, config_path;
  std::optional<std::string> out_path;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "check-cc | geodesic | convert | moduli | hamel | indicatrix")->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_path, "Path for the primary artifact");
  app.add_option("--seed", seed, "Overrides sampling.seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config " << config_path << "\n";
    return kExitConfig;
  }
  std::ostringstream text;
  text << in.rdbuf();

  kr_report* raw = nullptr;
  kr_run_command(command.c_str(), text.str().c_str(), seed ? &*seed : nullptr, &raw);
  if (!raw) {
    std::cerr << "error: " << kr_last_error() << "\n";
    return kExitConfig;
  }
  const std::unique_ptr<kr_report, decltype(&kr_report_destroy)> report(raw, &kr_report_destroy);

  const char* csv = kr_report_csv(report.get());
  const std::string json = kr_report_json(report.get());
  std::optional<std::string> report_path = path_of(report.get(), KR_ARTIFACT_REPORT);
  std::optional<std::string> csv_path = path_of(report.get(), KR_ARTIFACT_CSV);
  if (csv) {
    if (out_path) {
      csv_path = out_path;
      if (!report_path) report_path = *out_path + ".json";
    }
  } else if (out_path) {
    report_path = out_path;
  }

  bool ok = true;
  if (csv) {
    if (csv_path) ok = write_file(*csv_path, csv) && ok;
    else std::cout << csv;
    if (report_path) ok = write_file(*report_path, json) && ok;
  } else {
    if (report_path) ok = write_file(*report_path, json) && ok;
    else std::cout << json;
  }
  std::cerr << kr_report_summary(report.get()) << "\n";
  if (!ok) {
    std::cerr << "error: cannot write an output file\n";
    return kExitConfig;
  }
  return kr_report_exit_code(report.get());
}
