// SPDX-License-Identifier: Apache-2.0
#include "adleg/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace adleg {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- functions

const std::vector<NamedFunction>& named_functions() {
  using std::numbers::pi;
  static const std::vector<NamedFunction> table = {
      {"zero", "0", [](double) { return 0.0; }, [](double) { return 0.0; }},
      {"one", "1", [](double) { return 1.0; }, [](double) { return 0.0; }},
      {"x", "x", [](double x) { return x; }, [](double) { return 1.0; }},
      {"two_plus_x", "2 + x", [](double x) { return 2.0 + x; }, [](double) { return 1.0; }},
      {"inv_two_minus_x", "1 / (2 - x)", [](double x) { return 1.0 / (2.0 - x); },
       [](double x) { return 1.0 / ((2.0 - x) * (2.0 - x)); }},
      {"exp", "exp(x)", [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); }},
      {"sin_pi", "sin(pi x)", [](double x) { return std::sin(pi * x); },
       [](double x) { return pi * std::cos(pi * x); }},
      {"cos_half_pi", "cos(pi x / 2)", [](double x) { return std::cos(0.5 * pi * x); },
       [](double x) { return -0.5 * pi * std::sin(0.5 * pi * x); }},
      {"bubble", "1 - x^2", [](double x) { return 1.0 - x * x; }, [](double x) { return -2.0 * x; }},
      {"bubble_exp", "(1 - x^2) exp(x)", [](double x) { return (1.0 - x * x) * std::exp(x); },
       [](double x) { return (1.0 - 2.0 * x - x * x) * std::exp(x); }},
  };
  return table;
}

const NamedFunction& lookup_function(const std::string& name) {
  for (const auto& f : named_functions())
    if (f.name == name) return f;
  throw Error(ErrorKind::validation_error, "unknown function '" + name + "'");
}

BSVector manufactured_coefficients(const std::function<double(double)>& du, double rel_drop) {
  constexpr int kDegree = 64;
  static const QuadratureRule rule = gauss_legendre_rule(96);
  const LegendreSeries c = legendre_transform(du, kDegree, rule);
  double largest = 0.0;
  for (std::size_t j = 1; j < c.coeffs.size(); ++j) largest = std::max(largest, std::abs(c.coeffs[j]));
  const double floor = rel_drop * largest;
  // The expansion ends where two consecutive coefficients sit at the noise floor.
  std::size_t end = c.coeffs.size();
  for (std::size_t j = 1; j + 1 < c.coeffs.size(); ++j)
    if (std::abs(c.coeffs[j]) <= floor && std::abs(c.coeffs[j + 1]) <= floor) {
      end = j;
      break;
    }
  BSVector u(Role::primal);
  for (std::size_t j = 1; j < end; ++j)
    if (std::abs(c.coeffs[j]) > floor) u.set(static_cast<int>(j) + 1, -c.coeffs[j]);
  return u;
}

// ------------------------------------------------------------------ catalog

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"P1", "nu = 1, sigma = 0, u = sin(pi x); identity operator", {{1.0}, {}}, {{}, {}}, "sin_pi"},
      {"P2", "nu = 2 + x, sigma = 1 + x/2, u = (1 - x^2) exp(x); banded operator", {{2.0, 1.0}, {}},
       {{1.0, 0.5}, {}}, "bubble_exp"},
      {"P3", "nu = 1 / (2 - x) resampled, sigma = 0, u = sin(pi x); dense operator", {{}, "inv_two_minus_x"},
       {{}, {}}, "sin_pi"},
  };
  return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw Error(ErrorKind::validation_error, "unknown catalog problem '" + name + "'");
}

namespace {

void validate_adaptive(const AdaptiveConfig& a) {
  if (!(a.theta > 0.0 && a.theta < 1.0))
    throw Error(ErrorKind::validation_error, "adaptive.theta must lie in (0, 1)");
  if (!(a.tol >= 0.0)) throw Error(ErrorKind::validation_error, "adaptive.tol must be >= 0");
  if (a.max_iter < 0) throw Error(ErrorKind::validation_error, "adaptive.max_iter must be >= 0");
  if (!(a.coarsening_multiplier > 0.0))
    throw Error(ErrorKind::validation_error, "adaptive.coarsening_multiplier must be > 0");
}

void validate_coefficient(const CoefficientSpec& c, const char* field) {
  if (c.is_function() && !c.poly.empty())
    throw Error(ErrorKind::validation_error, std::string(field) + ": give either poly or function, not both");
  if (c.is_function()) lookup_function(c.function);
  for (double v : c.poly)
    if (!std::isfinite(v)) throw Error(ErrorKind::validation_error, std::string(field) + ": non-finite coefficient");
}

}  // namespace

ExperimentConfig resolve(const ExperimentConfig& config) {
  ExperimentConfig out = config;
  if (out.f && out.u) throw Error(ErrorKind::validation_error, "exactly one of f and u may be given, found both");
  if (out.problem != "inline") {
    const CatalogEntry& e = catalog_entry(out.problem);
    if (!out.nu) out.nu = e.nu;
    if (!out.sigma) out.sigma = e.sigma;
    if (!out.f && !out.u) out.u = e.u;
  }
  if (!out.nu) throw Error(ErrorKind::validation_error, "nu is required for inline problems");
  if (!out.sigma) out.sigma = CoefficientSpec{};
  if (!out.f && !out.u) throw Error(ErrorKind::validation_error, "exactly one of f and u is required, found neither");
  validate_coefficient(*out.nu, "nu");
  validate_coefficient(*out.sigma, "sigma");
  if (out.u && !lookup_function(*out.u).derivative)
    throw Error(ErrorKind::validation_error, "u: '" + *out.u + "' has no derivative");
  if (out.f) lookup_function(*out.f);
  validate_adaptive(out.adaptive);
  if (out.k_ref && *out.k_ref < 2) throw Error(ErrorKind::validation_error, "k_ref must be >= 2");
  return out;
}

namespace {

Coefficient make_coefficient(const CoefficientSpec& spec) {
  if (spec.is_function()) {
    const NamedFunction& f = lookup_function(spec.function);
    return Coefficient::function(f.value, f.formula);
  }
  return Coefficient::polynomial(spec.poly, "polynomial");
}

}  // namespace

ProblemSpec build_problem(const ExperimentConfig& config) {
  const ExperimentConfig c = resolve(config);
  RhsDescriptor rhs;
  if (c.u) {
    const NamedFunction& u = lookup_function(*c.u);
    rhs = ManufacturedRhs{manufactured_coefficients(u.derivative), u.formula};
  } else {
    const NamedFunction& f = lookup_function(*c.f);
    rhs = FunctionRhs{f.value, f.formula};
  }
  return make_problem(c.problem, make_coefficient(*c.nu), make_coefficient(*c.sigma), std::move(rhs));
}

// ------------------------------------------------------------- json helpers

namespace {

Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double parse_decimal(const std::string& s, const std::string& field) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    throw Error(ErrorKind::parse_error, "field '" + field + "': '" + s + "' is not a decimal number");
  return v;
}

double get_number(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_decimal(j.get<std::string>(), field);
  throw Error(ErrorKind::parse_error, "field '" + field + "': expected a number");
}

int get_int(const Json& j, const std::string& field) {
  if (j.is_number_integer()) return j.get<int>();
  const double v = get_number(j, field);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw Error(ErrorKind::parse_error, "field '" + field + "': expected an integer");
  return static_cast<int>(v);
}

std::string get_string(const Json& j, const std::string& field) {
  if (!j.is_string()) throw Error(ErrorKind::parse_error, "field '" + field + "': expected a string");
  return j.get<std::string>();
}

bool get_bool(const Json& j, const std::string& field) {
  if (!j.is_boolean()) throw Error(ErrorKind::parse_error, "field '" + field + "': expected true or false");
  return j.get<bool>();
}

template <class T, class F>
std::optional<T> get_optional(const Json& j, F&& f) {
  if (j.is_null()) return std::nullopt;
  return f(j);
}

template <class T>
Json optional_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_floating_point_v<T>)
    return number(*v);
  else
    return *v;
}

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::parse_error, "field '" + where + "': expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known)
      throw Error(ErrorKind::parse_error,
                  "unknown field '" + (where.empty() ? it.key() : where + "." + it.key()) + "'");
  }
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "adleg") return Algorithm::adleg;
  if (s == "pc_adleg") return Algorithm::pc_adleg;
  throw Error(ErrorKind::validation_error, "adaptive.algorithm must be adleg or pc_adleg, got '" + s + "'");
}

Json coefficient_json(const CoefficientSpec& c) {
  Json j = Json::object();
  if (c.is_function()) {
    j["function"] = c.function;
  } else {
    Json arr = Json::array();
    for (double v : c.poly) arr.push_back(number(v));
    j["poly"] = arr;
  }
  return j;
}

CoefficientSpec coefficient_from(const Json& j, const std::string& field) {
  reject_unknown(j, {"poly", "function"}, field);
  CoefficientSpec c;
  if (j.contains("poly")) {
    if (!j["poly"].is_array()) throw Error(ErrorKind::parse_error, "field '" + field + ".poly': expected an array");
    for (std::size_t i = 0; i < j["poly"].size(); ++i)
      c.poly.push_back(get_number(j["poly"][i], field + ".poly[" + std::to_string(i) + "]"));
  }
  if (j.contains("function")) c.function = get_string(j["function"], field + ".function");
  return c;
}

Json adaptive_json(const AdaptiveConfig& a) {
  Json j = Json::object();
  j["algorithm"] = to_string(a.algorithm);
  j["theta"] = number(a.theta);
  j["tol"] = number(a.tol);
  j["max_iter"] = a.max_iter;
  j["coarsening_multiplier"] = number(a.coarsening_multiplier);
  return j;
}

AdaptiveConfig adaptive_from(const Json& j) {
  reject_unknown(j, {"algorithm", "theta", "tol", "max_iter", "coarsening_multiplier"}, "adaptive");
  AdaptiveConfig a;
  if (j.contains("algorithm")) a.algorithm = parse_algorithm(get_string(j["algorithm"], "adaptive.algorithm"));
  if (j.contains("theta")) a.theta = get_number(j["theta"], "adaptive.theta");
  if (j.contains("tol")) a.tol = get_number(j["tol"], "adaptive.tol");
  if (j.contains("max_iter")) a.max_iter = get_int(j["max_iter"], "adaptive.max_iter");
  if (j.contains("coarsening_multiplier"))
    a.coarsening_multiplier = get_number(j["coarsening_multiplier"], "adaptive.coarsening_multiplier");
  return a;
}

Json config_json(const ExperimentConfig& c) {
  Json j = Json::object();
  j["problem"] = c.problem;
  j["nu"] = c.nu ? coefficient_json(*c.nu) : Json(nullptr);
  j["sigma"] = c.sigma ? coefficient_json(*c.sigma) : Json(nullptr);
  j["f"] = optional_json(c.f);
  j["u"] = optional_json(c.u);
  j["adaptive"] = adaptive_json(c.adaptive);
  j["output"] = Json{{"csv", c.csv_path}, {"report", c.report_path}};
  j["seed"] = c.seed;
  j["k_ref"] = optional_json(c.k_ref);
  j["timing"] = c.timing;
  return j;
}

ExperimentConfig config_from(const Json& j) {
  reject_unknown(j, {"problem", "nu", "sigma", "f", "u", "adaptive", "output", "seed", "k_ref", "timing"}, "");
  ExperimentConfig c;
  if (j.contains("problem")) c.problem = get_string(j["problem"], "problem");
  if (j.contains("nu") && !j["nu"].is_null()) c.nu = coefficient_from(j["nu"], "nu");
  if (j.contains("sigma") && !j["sigma"].is_null()) c.sigma = coefficient_from(j["sigma"], "sigma");
  if (j.contains("f") && !j["f"].is_null()) c.f = get_string(j["f"], "f");
  if (j.contains("u") && !j["u"].is_null()) c.u = get_string(j["u"], "u");
  if (j.contains("adaptive")) c.adaptive = adaptive_from(j["adaptive"]);
  if (j.contains("output")) {
    reject_unknown(j["output"], {"csv", "report"}, "output");
    if (j["output"].contains("csv")) c.csv_path = get_string(j["output"]["csv"], "output.csv");
    if (j["output"].contains("report")) c.report_path = get_string(j["output"]["report"], "output.report");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw Error(ErrorKind::parse_error, "field 'seed': expected an unsigned integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("k_ref") && !j["k_ref"].is_null()) c.k_ref = get_int(j["k_ref"], "k_ref");
  if (j.contains("timing")) c.timing = get_bool(j["timing"], "timing");
  return c;
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse_error, origin + ": " + line_column(text, e.byte) + ": malformed JSON");
  }
  ExperimentConfig c;
  try {
    c = config_from(j);
  } catch (const Error& e) {
    throw Error(e.kind(), origin + ": " + std::string(e.what()).substr(std::string(to_string(e.kind())).size() + 2));
  }
  resolve(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

// --------------------------------------------------------------- run logic

const char* to_string(VerdictState state) noexcept {
  switch (state) {
    case VerdictState::pass: return "pass";
    case VerdictState::fail: return "fail";
    case VerdictState::not_applicable: return "n/a";
  }
  return "n/a";
}

bool RunReport::passed() const noexcept {
  if (truncated) return false;
  for (const auto& v : verdicts)
    if (v.state == VerdictState::fail) return false;
  for (const auto& r : rows)
    if (r.verdict == VerdictState::fail) return false;
  return true;
}

namespace {

constexpr double kRatioSlack = 1e-8;

Verdict ratio_verdict(std::string name, double worst, double bound, int checked, std::string detail) {
  Verdict v;
  v.name = std::move(name);
  v.measured = worst;
  v.bound = bound;
  v.margin = bound - worst;
  v.detail = std::move(detail);
  v.state = checked == 0 ? VerdictState::not_applicable
                         : (worst <= bound + kRatioSlack ? VerdictState::pass : VerdictState::fail);
  return v;
}

// Fitted residual class at least as good as predicted: t within 0.15 and,
// unless t is clearly better, eta within a factor 2.
bool conforms(const SparsityParams& fitted, const SparsityParams& predicted) {
  if (fitted.t < predicted.t - 0.15) return false;
  return fitted.t > predicted.t + 0.15 || fitted.eta >= predicted.eta / 2.0;
}

void evaluate(RunReport& report, const StiffnessOperator& A, double u_ref_energy) {
  const AdaptiveConfig& cfg = report.config.adaptive;
  const bool pc = cfg.algorithm == Algorithm::pc_adleg;
  const double a_lo = A.alpha_lower();
  const double a_hi = A.alpha_upper();
  const auto& recs = report.records;

  // Contraction, row by row.
  double worst = 0.0;
  int checked = 0;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    ReportRow& row = report.rows[i];
    const auto& prev = recs[i - 1].measured_error_energy;
    const auto& cur = recs[i].measured_error_energy;
    if (!prev || !cur || *prev <= 1e-13 * u_ref_energy) continue;
    row.ratio_energy = *cur / *prev;
    row.verdict = *row.ratio_energy <= report.rho + kRatioSlack ? VerdictState::pass : VerdictState::fail;
    worst = std::max(worst, *row.ratio_energy);
    ++checked;
  }
  report.verdicts.push_back(ratio_verdict("contraction", worst, report.rho, checked, "measured energy-error ratio"));

  // Residual/error equivalence.
  {
    double worst_upper = 0.0;
    bool lower_ok = true;
    int n = 0;
    for (const auto& r : recs) {
      if (!r.measured_error_h1) continue;
      const double slack = 1e-12 * u_ref_energy;
      if (r.error_h1.upper > 0.0) worst_upper = std::max(worst_upper, (*r.measured_error_h1 - slack) / r.error_h1.upper);
      else if (*r.measured_error_h1 > slack) worst_upper = std::numeric_limits<double>::infinity();
      lower_ok = lower_ok && r.error_h1.lower * (1.0 - 1e-8) <= *r.measured_error_h1 + slack;
      ++n;
    }
    Verdict v = ratio_verdict("error_equivalence", worst_upper, 1.0, n, "measured H1 error / certified upper bound");
    if (!lower_ok) {
      v.state = VerdictState::fail;
      v.detail += "; lower bound violated";
    }
    report.verdicts.push_back(std::move(v));
  }

  if (pc) {
    const double shrink = std::sqrt(1.0 - cfg.theta * cfg.theta);
    double worst_pred = 0.0;
    double worst_coarse = 0.0;
    int n_pred = 0;
    int n_coarse = 0;
    for (std::size_t i = 1; i < recs.size(); ++i) {
      const double bound = (2.0 / a_lo) * shrink * recs[i - 1].residual_norm.upper;
      if (recs[i].predictor_error_h1 && bound > 0.0) {
        worst_pred = std::max(worst_pred, *recs[i].predictor_error_h1 / bound);
        ++n_pred;
      }
      if (recs[i].measured_error_energy && recs[i].coarsening_epsilon && *recs[i].coarsening_epsilon > 0.0) {
        worst_coarse =
            std::max(worst_coarse, *recs[i].measured_error_energy / (3.0 * std::sqrt(a_hi) * *recs[i].coarsening_epsilon));
        ++n_coarse;
      }
    }
    report.verdicts.push_back(ratio_verdict("predictor_bound", worst_pred, 1.0, n_pred,
                                            "||u - u_hat|| / ((2/alpha_*) sqrt(1 - theta^2) ||r||)"));
    report.verdicts.push_back(ratio_verdict("coarsening_error", worst_coarse, 1.0, n_coarse,
                                            "|||u - u_n||| / (3 sqrt(alpha^*) eps)"));

    double worst_card = 0.0;
    int n_card = 0;
    if (report.solution_class) {
      for (std::size_t i = 1; i < recs.size(); ++i) {
        const auto& eps = recs[i].coarsening_epsilon;
        if (!eps || *eps <= 0.0 || *eps > report.solution_class->class_norm) continue;
        const double bound = phi_inverse(*eps / report.solution_class->class_norm, report.solution_class->eta,
                                         report.solution_class->t) + 1.0;
        worst_card = std::max(worst_card, static_cast<double>(recs[i].lambda_after.size()) / bound);
        ++n_card;
      }
    }
    report.verdicts.push_back(ratio_verdict("coarsening_cardinality", worst_card, 1.0, n_card,
                                            "|Lambda_n| / (phi^-1(eps / ||u||) + 1)"));
  }

  // Residual class conformance for dense operators.
  {
    Verdict v;
    v.name = "residual_class";
    v.bound = 0.0;
    if (A.decay().diagonal()) {
      v.detail = "diagonal operator";
    } else if (A.exact_band()) {
      v.detail = "banded operator: predicted class is extrapolated";
    } else if (!report.solution_class) {
      v.detail = "solution class unavailable";
    } else {
      try {
        // A class with rate eta contains every class with a larger rate, so
        // the solution is propagated at a rate just below eta_bar_L.
        const double limit = A.decay().eta_L_bar.value_or(A.decay().eta_L);
        SparsityParams source = *report.solution_class;
        source.eta = std::min(source.eta, 0.999 * limit);
        const SparsityParams predicted = predict_residual_class(source, OperatorKind::dense(limit));
        int n = 0;
        int bad = 0;
        for (const auto& row : report.rows) {
          if (!row.residual_class) continue;
          ++n;
          if (!conforms(*row.residual_class, predicted)) ++bad;
        }
        v.measured = bad;
        v.margin = -bad;
        v.state = n == 0 ? VerdictState::not_applicable : (bad == 0 ? VerdictState::pass : VerdictState::fail);
        v.detail = std::to_string(n) + " residual fits against predicted t=" + std::to_string(predicted.t) +
                   " eta=" + std::to_string(predicted.eta);
      } catch (const Error& e) {
        v.detail = e.what();
      }
    }
    report.verdicts.push_back(std::move(v));
  }

  {
    Verdict v;
    v.name = "termination";
    v.measured = recs.empty() ? 0.0 : recs.back().residual_norm.upper;
    v.bound = cfg.tol;
    v.margin = v.bound - v.measured;
    v.state = !report.truncated && v.measured <= v.bound ? VerdictState::pass : VerdictState::fail;
    v.detail = report.truncated ? report.truncation_reason : "final residual upper bound vs tol";
    report.verdicts.push_back(std::move(v));
  }
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config) {
  RunReport report;
  report.config = resolve(config);
  const ProblemSpec problem = build_problem(report.config);
  const StiffnessOperator A(problem);
  const DecayClass& d = A.decay();
  report.op = {A.alpha_lower(), A.alpha_upper(), A.exact_band(), d.eta_L, d.c_L, d.eta_L_bar, d.C_A, d.C_Ainv};
  report.rho = contraction_bound(report.config.adaptive, A.alpha_lower(), A.alpha_upper());
  if (report.config.adaptive.algorithm == Algorithm::pc_adleg) {
    if (!(report.rho < 1.0))
      throw Error(ErrorKind::theta_too_small,
                  "6 (alpha^*/alpha_*) sqrt(1 - theta^2) = " + std::to_string(report.rho) + " >= 1");
    report.J_theta = compute_J_theta(report.config.adaptive.theta, d, A.alpha_lower(), A.alpha_upper());
  }

  const BSVector f = assemble_rhs(A);
  const GalerkinSolution reference = report.config.k_ref ? gal(A, f, IndexSet::range(2, *report.config.k_ref))
                                                         : reference_solution(A, f);
  report.k_ref = reference.lambda.empty() ? 0 : reference.lambda.max();
  const double u_ref_energy = energy_norm(A, reference.u);
  try {
    report.solution_class = fit_decay(reference.u);
  } catch (const Error&) {
  }

  const IterationObserver observe = [&](const IterationRecord& rec, const GalerkinSolution&, const BSVector& r) {
    ReportRow row;
    row.n = rec.n;
    try {
      row.residual_class = fit_decay(r);
    } catch (const Error&) {
    }
    report.rows.push_back(std::move(row));
  };

  try {
    AdaptiveResult result = run_adaptive(A, f, report.config.adaptive, &reference, observe);
    report.records = std::move(result.records);
  } catch (const RunAborted& e) {
    report.records = e.partial();
    report.truncated = true;
    report.truncation_reason = e.what();
  }
  report.rows.resize(report.records.size());
  for (auto& r : report.records) {
    if (!report.config.timing) r.wall_time = 0.0;
    report.total_wall_time += r.wall_time;
  }
  evaluate(report, A, u_ref_energy);
  return report;
}

// ------------------------------------------------------------ report output

namespace {

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json index_set_json(const IndexSet& s) { return Json(s.indices()); }

IndexSet index_set_from(const Json& j) { return IndexSet(j.get<std::vector<int>>()); }

Json interval_json(const NormInterval& v) { return Json::array({number(v.lower), number(v.upper)}); }

NormInterval interval_from(const Json& j, const std::string& field) {
  return {get_number(j.at(0), field), get_number(j.at(1), field)};
}

Json sparsity_json(const SparsityParams& p) {
  Json j = Json::object();
  j["eta"] = number(p.eta);
  j["t"] = number(p.t);
  j["class_norm"] = number(p.class_norm);
  j["r_squared"] = number(p.r_squared);
  j["samples"] = p.samples;
  j["extrapolated"] = p.extrapolated;
  j["finite_support"] = p.finite_support;
  return j;
}

SparsityParams sparsity_from(const Json& j) {
  SparsityParams p;
  p.eta = get_number(j.at("eta"), "eta");
  p.t = get_number(j.at("t"), "t");
  p.class_norm = get_number(j.at("class_norm"), "class_norm");
  p.r_squared = get_number(j.at("r_squared"), "r_squared");
  p.samples = j.at("samples").get<int>();
  p.extrapolated = j.at("extrapolated").get<bool>();
  p.finite_support = j.at("finite_support").get<bool>();
  return p;
}

Json record_json(const IterationRecord& r) {
  Json j = Json::object();
  j["n"] = r.n;
  j["lambda_before"] = index_set_json(r.lambda_before);
  j["lambda_hat"] = index_set_json(r.lambda_hat);
  j["lambda_after"] = index_set_json(r.lambda_after);
  j["residual_norm"] = interval_json(r.residual_norm);
  j["error_h1"] = interval_json(r.error_h1);
  j["error_energy"] = interval_json(r.error_energy);
  j["marked_cardinality"] = r.marked_cardinality;
  j["J_theta_used"] = r.J_theta_used;
  j["wall_time"] = number(r.wall_time);
  j["coarsening_epsilon"] = optional_json(r.coarsening_epsilon);
  j["measured_error_h1"] = optional_json(r.measured_error_h1);
  j["measured_error_energy"] = optional_json(r.measured_error_energy);
  j["predictor_error_h1"] = optional_json(r.predictor_error_h1);
  return j;
}

std::optional<double> optional_number(const Json& j, const std::string& field) {
  if (j.is_null()) return std::nullopt;
  return get_number(j, field);
}

IterationRecord record_from(const Json& j) {
  IterationRecord r;
  r.n = j.at("n").get<int>();
  r.lambda_before = index_set_from(j.at("lambda_before"));
  r.lambda_hat = index_set_from(j.at("lambda_hat"));
  r.lambda_after = index_set_from(j.at("lambda_after"));
  r.residual_norm = interval_from(j.at("residual_norm"), "residual_norm");
  r.error_h1 = interval_from(j.at("error_h1"), "error_h1");
  r.error_energy = interval_from(j.at("error_energy"), "error_energy");
  r.marked_cardinality = j.at("marked_cardinality").get<int>();
  r.J_theta_used = j.at("J_theta_used").get<int>();
  r.wall_time = get_number(j.at("wall_time"), "wall_time");
  r.coarsening_epsilon = optional_number(j.at("coarsening_epsilon"), "coarsening_epsilon");
  r.measured_error_h1 = optional_number(j.at("measured_error_h1"), "measured_error_h1");
  r.measured_error_energy = optional_number(j.at("measured_error_energy"), "measured_error_energy");
  r.predictor_error_h1 = optional_number(j.at("predictor_error_h1"), "predictor_error_h1");
  return r;
}

VerdictState verdict_state_from(const std::string& s) {
  if (s == "pass") return VerdictState::pass;
  if (s == "fail") return VerdictState::fail;
  if (s == "n/a") return VerdictState::not_applicable;
  throw Error(ErrorKind::parse_error, "unknown verdict '" + s + "'");
}

}  // namespace

std::string report_to_csv(const RunReport& report) {
  const bool pc = report.config.adaptive.algorithm == Algorithm::pc_adleg;
  std::ostringstream out;
  out << "n,card_lambda";
  if (pc) out << ",card_lambda_hat";
  out << ",res_lo,res_hi,err_h1_lo,err_h1_hi,err_energy_lo,err_energy_hi,ratio_energy,bound_rho,verdict\n";
  for (std::size_t i = 1; i < report.records.size(); ++i) {
    const IterationRecord& r = report.records[i];
    const ReportRow& row = report.rows[i];
    out << r.n << ',' << r.lambda_after.size();
    if (pc) out << ',' << r.lambda_hat.size();
    out << ',' << fmt_double(r.residual_norm.lower) << ',' << fmt_double(r.residual_norm.upper) << ','
        << fmt_double(r.error_h1.lower) << ',' << fmt_double(r.error_h1.upper) << ','
        << fmt_double(r.error_energy.lower) << ',' << fmt_double(r.error_energy.upper) << ','
        << (row.ratio_energy ? fmt_double(*row.ratio_energy) : std::string()) << ',' << fmt_double(report.rho)
        << ',' << to_string(row.verdict) << '\n';
  }
  return out.str();
}

std::string report_to_json(const RunReport& report) {
  Json j = Json::object();
  j["config"] = config_json(report.config);
  const OperatorSummary& op = report.op;
  j["operator"] = Json{{"alpha_lower", number(op.alpha_lower)}, {"alpha_upper", number(op.alpha_upper)},
                       {"band", optional_json(op.band)},      {"eta_L", number(op.eta_L)},
                       {"c_L", number(op.c_L)},              {"eta_L_bar", optional_json(op.eta_L_bar)},
                       {"C_A", number(op.C_A)},              {"C_Ainv", number(op.C_Ainv)}};
  j["rho"] = number(report.rho);
  j["J_theta"] = report.J_theta;
  j["k_ref"] = report.k_ref;
  j["solution_class"] = report.solution_class ? sparsity_json(*report.solution_class) : Json(nullptr);
  Json records = Json::array();
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    Json r = record_json(report.records[i]);
    const ReportRow& row = report.rows[i];
    r["ratio_energy"] = optional_json(row.ratio_energy);
    r["residual_class"] = row.residual_class ? sparsity_json(*row.residual_class) : Json(nullptr);
    r["verdict"] = to_string(row.verdict);
    records.push_back(std::move(r));
  }
  j["records"] = std::move(records);
  Json verdicts = Json::array();
  for (const Verdict& v : report.verdicts)
    verdicts.push_back(Json{{"name", v.name},
                            {"state", to_string(v.state)},
                            {"measured", number(v.measured)},
                            {"bound", number(v.bound)},
                            {"margin", number(v.margin)},
                            {"detail", v.detail}});
  j["verdicts"] = std::move(verdicts);
  j["truncated"] = report.truncated;
  j["truncation_reason"] = report.truncation_reason;
  j["totals"] = Json{{"iterations", report.iterations()},
                     {"final_cardinality", report.records.empty() ? 0 : report.records.back().lambda_after.size()},
                     {"final_residual", report.records.empty() ? Json(nullptr)
                                                               : number(report.records.back().residual_norm.upper)},
                     {"wall_time", number(report.total_wall_time)},
                     {"passed", report.passed()}};
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse_error, line_column(text, e.byte) + ": malformed report");
  }
  try {
    RunReport report;
    report.config = config_from(j.at("config"));
    const Json& op = j.at("operator");
    report.op.alpha_lower = get_number(op.at("alpha_lower"), "alpha_lower");
    report.op.alpha_upper = get_number(op.at("alpha_upper"), "alpha_upper");
    if (!op.at("band").is_null()) report.op.band = op.at("band").get<int>();
    report.op.eta_L = get_number(op.at("eta_L"), "eta_L");
    report.op.c_L = get_number(op.at("c_L"), "c_L");
    report.op.eta_L_bar = optional_number(op.at("eta_L_bar"), "eta_L_bar");
    report.op.C_A = get_number(op.at("C_A"), "C_A");
    report.op.C_Ainv = get_number(op.at("C_Ainv"), "C_Ainv");
    report.rho = get_number(j.at("rho"), "rho");
    report.J_theta = j.at("J_theta").get<int>();
    report.k_ref = j.at("k_ref").get<int>();
    if (!j.at("solution_class").is_null()) report.solution_class = sparsity_from(j.at("solution_class"));
    for (const Json& r : j.at("records")) {
      report.records.push_back(record_from(r));
      ReportRow row;
      row.n = report.records.back().n;
      row.ratio_energy = optional_number(r.at("ratio_energy"), "ratio_energy");
      if (!r.at("residual_class").is_null()) row.residual_class = sparsity_from(r.at("residual_class"));
      row.verdict = verdict_state_from(r.at("verdict").get<std::string>());
      report.rows.push_back(std::move(row));
    }
    for (const Json& v : j.at("verdicts")) {
      Verdict verdict;
      verdict.name = v.at("name").get<std::string>();
      verdict.state = verdict_state_from(v.at("state").get<std::string>());
      verdict.measured = get_number(v.at("measured"), "measured");
      verdict.bound = get_number(v.at("bound"), "bound");
      verdict.margin = get_number(v.at("margin"), "margin");
      verdict.detail = v.at("detail").get<std::string>();
      report.verdicts.push_back(std::move(verdict));
    }
    report.truncated = j.at("truncated").get<bool>();
    report.truncation_reason = j.at("truncation_reason").get<std::string>();
    report.total_wall_time = get_number(j.at("totals").at("wall_time"), "wall_time");
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string("report: ") + e.what());
  }
}

void emit_report(const RunReport& report, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
  out << (format == ReportFormat::csv ? report_to_csv(report) : report_to_json(report));
  if (!out) throw Error(ErrorKind::io_error, "write failed for " + path);
}

}  // namespace adleg
