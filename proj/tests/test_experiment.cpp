// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include "adleg/error.hpp"
#include "adleg/experiment.hpp"
#include "doctest.h"

using namespace adleg;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an adleg::Error");
  return ErrorKind::invalid_argument;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const std::string kHeader =
    "n,card_lambda,res_lo,res_hi,err_h1_lo,err_h1_hi,err_energy_lo,err_energy_hi,ratio_energy,"
    "bound_rho,verdict";

}  // namespace

TEST_CASE("minimal inline config is valid") {
  const auto c = parse_config(R"({"nu": {"poly": [1]}, "sigma": {"poly": [0]}, "u": "sin_pi",
                                  "adaptive": {"theta": 0.5, "tol": 1e-8}})");
  CHECK(c.problem == "inline");
  CHECK(c.adaptive.theta == 0.5);
  CHECK(c.adaptive.tol == 1e-8);
  CHECK(c.u == std::optional<std::string>("sin_pi"));
  CHECK_NOTHROW(build_problem(c));
}

TEST_CASE("config validation") {
  CHECK(kind_of([] { parse_config(R"({"nu": {"poly": [1]}, "f": "one", "u": "sin_pi"})"); }) ==
        ErrorKind::validation_error);
  CHECK(kind_of([] { parse_config(R"({"problem": "P1", "bogus": 1})"); }) == ErrorKind::parse_error);
  CHECK(kind_of([] { parse_config(R"({"problem": "P1", "adaptive": {"theta": 1.5}})"); }) ==
        ErrorKind::validation_error);
  CHECK(kind_of([] { parse_config(R"({"problem": "P9"})"); }) == ErrorKind::validation_error);
  CHECK(kind_of([] { parse_config("{\"problem\": \n  \"P1\",, }"); }) == ErrorKind::parse_error);
  try {
    parse_config("{\"problem\": \n  \"P1\",, }", "cfg.json");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("cfg.json: line 2, column") != std::string::npos);
  }
  const auto decimal = parse_config(R"({"problem": "P1", "adaptive": {"tol": "1e-9"}})");
  CHECK(decimal.adaptive.tol == 1e-9);
}

TEST_CASE("config round-trips through its JSON form") {
  const auto c = parse_config(R"({"problem": "P2", "adaptive": {"algorithm": "pc_adleg", "theta": 0.9995,
                                  "tol": 1e-9, "max_iter": 50}, "seed": 7, "k_ref": 300})");
  CHECK(parse_config(config_to_json(c)) == c);
}

TEST_CASE("catalog") {
  const auto& cat = catalog();
  REQUIRE(cat.size() >= 3);
  CHECK(catalog_entry("P1").u == "sin_pi");
  CHECK(catalog_entry("P2").u == "bubble_exp");
  CHECK(catalog_entry("P3").nu.function == "inv_two_minus_x");

  ExperimentConfig c;
  c.problem = "P2";
  const StiffnessOperator A(build_problem(c));
  REQUIRE(A.exact_band());
  CHECK(*A.exact_band() <= 3);
  c.problem = "P1";
  CHECK(StiffnessOperator(build_problem(c)).decay().diagonal());
  c.problem = "P3";
  CHECK_FALSE(StiffnessOperator(build_problem(c)).exact_band().has_value());
}

TEST_CASE("manufactured sin(pi x) is exponentially sparse") {
  const auto u = manufactured_coefficients(lookup_function("sin_pi").derivative);
  const auto p = fit_decay(u);
  CHECK(p.t == doctest::Approx(1.0).epsilon(0.1));
  CHECK(p.eta > 0.0);
  for (double x : {-0.7, 0.1, 0.5}) CHECK(eval_bs_function(u, x) == doctest::Approx(std::sin(M_PI * x)).epsilon(1e-12));
}

TEST_CASE("PC-ADLEG with theta 0.3 is rejected at run start") {
  const auto c = parse_config(R"({"nu": {"poly": [1]}, "u": "sin_pi",
                                  "adaptive": {"algorithm": "pc_adleg", "theta": 0.3, "tol": 1e-8}})");
  CHECK(kind_of([&] { run_experiment(c); }) == ErrorKind::theta_too_small);
}

TEST_CASE("identity problem terminates below the tolerance") {
  const auto c = parse_config(R"({"nu": {"poly": [1]}, "u": "sin_pi", "adaptive": {"theta": 0.5, "tol": 1e-8}})");
  const auto r = run_experiment(c);
  CHECK(r.passed());
  CHECK(r.records.back().residual_norm.upper <= 1e-8);
}

TEST_CASE("catalog run: monotone errors, ratios below rho, deterministic output") {
  auto c = parse_config(R"({"problem": "P2", "adaptive": {"theta": 0.5, "tol": 1e-9}})");
  const auto r = run_experiment(c);
  CHECK(r.passed());
  for (std::size_t i = 1; i < r.records.size(); ++i)
    CHECK(*r.records[i].measured_error_energy <= *r.records[i - 1].measured_error_energy);
  for (const auto& row : r.rows)
    if (row.ratio_energy) CHECK(*row.ratio_energy <= r.rho);

  const auto csv = report_to_csv(r);
  const auto rows = lines(csv);
  CHECK(rows.front() == kHeader);
  CHECK(rows.size() == static_cast<std::size_t>(r.iterations()) + 1);
  CHECK(report_to_csv(run_experiment(c)) == csv);
  CHECK(report_to_json(run_experiment(c)) == report_to_json(r));
}

TEST_CASE("empty run writes a header-only CSV") {
  const auto r = run_experiment(parse_config(R"({"problem": "P1", "adaptive": {"tol": 1e3}})"));
  CHECK(r.iterations() == 0);
  CHECK(lines(report_to_csv(r)) == std::vector<std::string>{kHeader});
  const auto pc = run_experiment(
      parse_config(R"({"problem": "P1", "adaptive": {"algorithm": "pc_adleg", "theta": 0.999, "tol": 1e3}})"));
  CHECK(lines(report_to_csv(pc)).front().rfind("n,card_lambda,card_lambda_hat,res_lo", 0) == 0);
}

TEST_CASE("structured report round-trips") {
  for (const char* text : {R"({"problem": "P3", "adaptive": {"theta": 0.5, "tol": 1e-9}})",
                           R"({"problem": "P1", "adaptive": {"algorithm": "pc_adleg", "theta": 0.999, "tol": 1e-9}})"}) {
    const auto r = run_experiment(parse_config(text));
    const auto json = report_to_json(r);
    const auto back = report_from_json(json);
    CHECK(back == r);
    CHECK(report_to_json(back) == json);
  }
}

TEST_CASE("verdict names") {
  const auto r = run_experiment(parse_config(R"({"problem": "P3", "adaptive": {"theta": 0.5, "tol": 1e-9}})"));
  std::vector<std::string> names;
  for (const auto& v : r.verdicts) names.push_back(v.name);
  for (const char* expected : {"contraction", "error_equivalence", "termination", "residual_class"})
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
  CHECK(std::string(to_string(VerdictState::not_applicable)) == "n/a");
}
