// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adleg/adaptive.hpp"
#include "adleg/sparsity.hpp"
#include "adleg/stiffness.hpp"

namespace adleg {

/// Smooth scalar function with its derivative, looked up by name.
struct NamedFunction {
  std::string name;
  std::string formula;
  std::function<double(double)> value;
  std::function<double(double)> derivative;  // empty when not needed
};

const std::vector<NamedFunction>& named_functions();
const NamedFunction& lookup_function(const std::string& name);

/// BS coefficients of u in H^1_0, u_k = -<Du, phi_{k-1}>, dropping entries
/// below rel_drop * max.
BSVector manufactured_coefficients(const std::function<double(double)>& du, double rel_drop = 1e-15);

/// nu or sigma: classical Legendre coefficients or a named function.
struct CoefficientSpec {
  std::vector<double> poly;
  std::string function;

  bool is_function() const noexcept { return !function.empty(); }
  bool operator==(const CoefficientSpec&) const = default;
};

struct ExperimentConfig {
  std::string problem = "inline";  // catalog name or "inline"
  std::optional<CoefficientSpec> nu;
  std::optional<CoefficientSpec> sigma;
  std::optional<std::string> f;  // named right-hand side
  std::optional<std::string> u;  // named manufactured solution
  AdaptiveConfig adaptive;
  std::string csv_path;
  std::string report_path;
  std::uint64_t seed = 0;
  std::optional<int> k_ref;
  bool timing = false;

  bool operator==(const ExperimentConfig&) const = default;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  CoefficientSpec nu;
  CoefficientSpec sigma;
  std::string u;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);

/// Config with every field resolved against the catalog and validated.
ExperimentConfig resolve(const ExperimentConfig& config);
ProblemSpec build_problem(const ExperimentConfig& config);

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

enum class VerdictState { pass, fail, not_applicable };
const char* to_string(VerdictState state) noexcept;

struct Verdict {
  std::string name;
  VerdictState state = VerdictState::not_applicable;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - measured
  std::string detail;

  bool operator==(const Verdict&) const = default;
};

struct ReportRow {
  int n = 0;
  std::optional<double> ratio_energy;  // measured |||u - u_n||| / |||u - u_{n-1}|||
  std::optional<SparsityParams> residual_class;
  VerdictState verdict = VerdictState::not_applicable;

  bool operator==(const ReportRow&) const = default;
};

struct OperatorSummary {
  double alpha_lower = 0.0;
  double alpha_upper = 0.0;
  std::optional<int> band;
  double eta_L = 0.0;
  double c_L = 0.0;
  std::optional<double> eta_L_bar;
  double C_A = 0.0;
  double C_Ainv = 0.0;

  bool operator==(const OperatorSummary&) const = default;
};

struct RunReport {
  ExperimentConfig config;
  OperatorSummary op;
  double rho = 0.0;
  int J_theta = 0;
  int k_ref = 0;
  std::vector<IterationRecord> records;
  std::vector<ReportRow> rows;  // parallel to records
  std::optional<SparsityParams> solution_class;
  std::vector<Verdict> verdicts;
  bool truncated = false;
  std::string truncation_reason;
  double total_wall_time = 0.0;

  int iterations() const noexcept { return records.empty() ? 0 : static_cast<int>(records.size()) - 1; }
  bool passed() const noexcept;
  bool operator==(const RunReport&) const = default;
};

/// Builds the problem, computes the reference, runs the configured
/// algorithm and evaluates the verdicts. A failing run yields a
/// truncated report instead of an exception, except for configurations
/// rejected before the first iteration.
RunReport run_experiment(const ExperimentConfig& config);

enum class ReportFormat { csv, structured };

std::string report_to_csv(const RunReport& report);
std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);
void emit_report(const RunReport& report, ReportFormat format, const std::string& path);

}  // namespace adleg
