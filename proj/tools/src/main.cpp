// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "adleg/experiment.hpp"
#include "adleg_tools/acceptance.hpp"

namespace {

int run_command(const std::string& path, const std::string& csv_out, const std::string& report_out, bool timing) {
  adleg::ExperimentConfig config = adleg::load_config(path);
  if (!csv_out.empty()) config.csv_path = csv_out;
  if (!report_out.empty()) config.report_path = report_out;
  if (timing) config.timing = true;
  const adleg::RunReport report = adleg::run_experiment(config);
  if (!report.config.csv_path.empty()) adleg::emit_report(report, adleg::ReportFormat::csv, report.config.csv_path);
  if (!report.config.report_path.empty())
    adleg::emit_report(report, adleg::ReportFormat::structured, report.config.report_path);
  if (report.config.csv_path.empty() && report.config.report_path.empty()) std::cout << adleg::report_to_csv(report);
  for (const auto& v : report.verdicts)
    std::cerr << adleg::to_string(v.state) << "  " << v.name << "  measured " << v.measured << "  bound " << v.bound
              << (v.detail.empty() ? "" : "  (" + v.detail + ")") << '\n';
  if (report.truncated) std::cerr << "truncated: " << report.truncation_reason << '\n';
  std::cerr << report.iterations() << " iterations, " << (report.passed() ? "all verdicts pass" : "FAILED") << '\n';
  return report.passed() ? 0 : 1;
}

int catalog_command() {
  for (const auto& e : adleg::catalog()) std::cout << e.name << "  " << e.description << '\n';
  return 0;
}

int check_command() {
  bool ok = true;
  adleg::acceptance::run_all([&](const adleg::acceptance::CriterionResult& r) {
    std::cout << adleg::acceptance::format(r) << std::endl;
    ok = ok && r.passed;
  });
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive Legendre-Galerkin solver for -(nu u')' + sigma u = f on (-1, 1)"};
  app.require_subcommand(1);

  std::string config_path;
  std::string csv_out;
  std::string report_out;
  bool timing = false;
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--csv", csv_out, "Write the per-iteration CSV here");
  run->add_option("--report", report_out, "Write the structured JSON report here");
  run->add_flag("--timing", timing, "Record wall times in the report");

  auto* cat = app.add_subcommand("catalog", "List built-in problems");
  auto* check = app.add_subcommand("check", "Run the acceptance suite");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return run_command(config_path, csv_out, report_out, timing);
    if (*cat) return catalog_command();
    if (*check) return check_command();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
