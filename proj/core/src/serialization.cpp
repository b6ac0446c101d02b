#include "smallforms/serialization.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "smallforms/errors.hpp"
#include "smallforms/version.hpp"

namespace smallforms {

namespace {

constexpr int kSchemaVersion = 1;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) out.push_back(part);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

bool looks_floating(const std::string& entry) {
  return entry.find_first_of(".eE") != std::string::npos;
}

double parse_double_strict(const std::string& text, const char* what) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &used);
  } catch (const std::exception&) {
    fail(errkind::parse, std::string("bad ") + what + ": '" + text + "'");
  }
  if (used != t.size()) {
    fail(errkind::parse, std::string("bad ") + what + ": '" + text + "'");
  }
  return value;
}

long long parse_ll_strict(const std::string& text, const char* what) {
  const std::string t = trim(text);
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(t, &used);
  } catch (const std::exception&) {
    fail(errkind::parse, std::string("bad ") + what + ": '" + text + "'");
  }
  if (used != t.size()) {
    fail(errkind::parse, std::string("bad ") + what + ": '" + text + "'");
  }
  return value;
}

std::vector<double> parse_table_values(const std::string& payload,
                                       std::size_t* cut_index) {
  std::string body = payload;
  *cut_index = 1;
  if (!body.empty() && body[0] == '@') {
    const std::string path = body.substr(1);
    std::ifstream in(path);
    if (!in) fail(errkind::io, "cannot read table file: " + path);
    std::ostringstream all;
    all << in.rdbuf();
    body = all.str();
  }
  std::vector<double> values;
  std::istringstream lines(body);
  std::string line;
  bool first_line = true;
  while (std::getline(lines, line)) {
    const std::string t = trim(line);
    if (first_line && t.rfind("#cut=", 0) == 0) {
      *cut_index = static_cast<std::size_t>(
          parse_ll_strict(t.substr(5), "table cut index"));
      first_line = false;
      continue;
    }
    first_line = false;
    if (t.empty() || t[0] == '#') continue;
    for (const std::string& cell : split(t, ',')) {
      const std::string c = trim(cell);
      if (c.empty()) continue;
      values.push_back(parse_double_strict(c, "table value"));
    }
  }
  return values;
}

SeriesClass series_class_from_name(const std::string& name) {
  if (name == "Convergent") return SeriesClass::Convergent;
  if (name == "Divergent") return SeriesClass::Divergent;
  if (name == "Boundary") return SeriesClass::Boundary;
  if (name == "Unknown") return SeriesClass::Unknown;
  fail(errkind::parse, "unknown series class: " + name);
}

Agreement agreement_from_name(const std::string& name) {
  if (name == "consistent") return Agreement::Consistent;
  if (name == "inconsistent") return Agreement::Inconsistent;
  if (name == "not-applicable") return Agreement::NotApplicable;
  fail(errkind::parse, "unknown agreement value: " + name);
}

const Json& require_field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    fail(errkind::parse, std::string("missing field: ") + name);
  }
  return j.at(name);
}

template <typename T>
T field_as(const Json& j, const char* name) {
  try {
    return require_field(j, name).get<T>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(errkind::parse, std::string("field '") + name + "': " + e.what());
  }
}

Json rationals_to_json(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const Rational& v : values) out.push_back(format_rational(v));
  return out;
}

Json matq_to_json(const MatQ& a) {
  Json out = Json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < a.cols(); ++j) {
      row.push_back(format_rational(a.at(i, j)));
    }
    out.push_back(std::move(row));
  }
  return out;
}

Json matd_to_json(const MatD& a) {
  Json out = Json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < a.cols(); ++j) row.push_back(a.at(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

IntegerVector vector_from_json(const Json& j, const char* name) {
  IntegerVector out;
  try {
    out.components = require_field(j, name).get<std::vector<long long>>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(errkind::parse, std::string("field '") + name + "': " + e.what());
  }
  return out;
}

std::string csv_num(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

}  // namespace

// ---- literal parsers -------------------------------------------------------

FormMatrix parse_matrix_literal(const std::string& text) {
  const std::string body = trim(text);
  if (body.empty()) fail(errkind::parse, "empty matrix literal");
  std::vector<std::vector<std::string>> cells;
  bool floating = false;
  for (const std::string& row : split(body, ';')) {
    std::vector<std::string> entries;
    for (const std::string& cell : split(row, ',')) {
      const std::string c = trim(cell);
      if (c.empty()) fail(errkind::parse, "empty matrix entry in '" + text + "'");
      if (looks_floating(c)) floating = true;
      entries.push_back(c);
    }
    if (entries.empty()) fail(errkind::parse, "empty matrix row in '" + text + "'");
    cells.push_back(std::move(entries));
  }
  const std::size_t cols = cells.front().size();
  for (const auto& row : cells) {
    if (row.size() != cols) {
      fail(errkind::parse, "ragged matrix literal: '" + text + "'");
    }
  }
  if (floating) {
    MatD entries(cells.size(), cols);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        entries.at(i, j) = parse_double_strict(cells[i][j], "matrix entry");
      }
    }
    return FormMatrix::floating(std::move(entries));
  }
  MatQ entries(cells.size(), cols);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      entries.at(i, j) = parse_rational(cells[i][j]);
    }
  }
  return FormMatrix::exact(std::move(entries));
}

ApproxFunction parse_psi_literal(const std::string& text) {
  const std::string body = trim(text);
  const std::size_t colon = body.find(':');
  if (colon == std::string::npos) {
    fail(errkind::parse,
         "psi literal needs a family prefix (powerlog:|table:|percoord:), got '" +
             text + "'");
  }
  const std::string family = body.substr(0, colon);
  const std::string payload = body.substr(colon + 1);
  if (family == "powerlog") {
    const std::vector<std::string> parts = split(payload, ',');
    if (parts.size() != 3) {
      fail(errkind::parse,
           "powerlog literal needs c,tau,kappa, got '" + payload + "'");
    }
    const std::string c = trim(parts[0]);
    const double tau = parse_double_strict(parts[1], "tau");
    const double kappa = parse_double_strict(parts[2], "kappa");
    if (looks_floating(c)) {
      return ApproxFunction::power_log(parse_double_strict(c, "coefficient"),
                                       tau, kappa);
    }
    return ApproxFunction::power_log(parse_rational(c), tau, kappa);
  }
  if (family == "table") {
    std::size_t cut = 1;
    std::vector<double> values = parse_table_values(payload, &cut);
    return ApproxFunction::table(std::move(values), cut);
  }
  if (family == "percoord") {
    std::string inner = trim(payload);
    if (inner.size() < 2 || inner.front() != '[' || inner.back() != ']') {
      fail(errkind::parse,
           "percoord literal needs [lit|lit|...], got '" + payload + "'");
    }
    inner = inner.substr(1, inner.size() - 2);
    std::vector<ApproxFunction> parts;
    for (const std::string& part : split(inner, '|')) {
      const std::string p = trim(part);
      if (p.rfind("percoord", 0) == 0) {
        fail(errkind::parse, "percoord literals cannot nest");
      }
      parts.push_back(parse_psi_literal(p));
    }
    return ApproxFunction::per_coordinate(std::move(parts));
  }
  fail(errkind::parse, "unknown psi family: '" + family + "'");
}

DimensionFunction parse_f_literal(const std::string& text) {
  const std::vector<std::string> parts = split(trim(text), ',');
  if (parts.empty() || parts.size() > 2) {
    fail(errkind::parse, "f literal needs 's' or 's,kappa', got '" + text + "'");
  }
  const double s = parse_double_strict(parts[0], "dimension exponent");
  const double kappa =
      parts.size() == 2 ? parse_double_strict(parts[1], "dimension log weight")
                        : 0.0;
  return DimensionFunction(s, kappa);
}

HeightWindow parse_window_literal(const std::string& text) {
  const std::vector<std::string> parts = split(trim(text), ':');
  if (parts.size() != 2) {
    fail(errkind::parse, "window literal needs lo:hi, got '" + text + "'");
  }
  return HeightWindow(parse_ll_strict(parts[0], "window low"),
                      parse_ll_strict(parts[1], "window high"));
}

IntegerVector parse_vector_literal(const std::string& text) {
  IntegerVector out;
  for (const std::string& part : split(trim(text), ',')) {
    out.components.push_back(parse_ll_strict(part, "vector entry"));
  }
  if (out.components.empty()) fail(errkind::parse, "empty vector literal");
  return out;
}

// ---- JSON views ------------------------------------------------------------

Json to_json(const ApproxFunction& psi) {
  switch (psi.family()) {
    case ApproxFamily::PowerLog:
      return Json{{"family", "power-log"},
                  {"c", format_rational(psi.coefficient())},
                  {"tau", psi.tau()},
                  {"kappa", psi.kappa()}};
    case ApproxFamily::Table:
      return Json{{"family", "table"},
                  {"values", psi.table_values()},
                  {"cut_index", psi.table_cut_index()}};
    case ApproxFamily::PerCoordinate: {
      Json parts = Json::array();
      for (const ApproxFunction& part : psi.coordinates()) {
        parts.push_back(to_json(part));
      }
      return Json{{"family", "per-coordinate"}, {"parts", std::move(parts)}};
    }
  }
  fail(errkind::internal, "unhandled psi family");
}

ApproxFunction approx_function_from_json(const Json& j) {
  const std::string family = field_as<std::string>(j, "family");
  if (family == "power-log") {
    return ApproxFunction::power_log(
        parse_rational(field_as<std::string>(j, "c")),
        field_as<double>(j, "tau"), field_as<double>(j, "kappa"));
  }
  if (family == "table") {
    return ApproxFunction::table(
        field_as<std::vector<double>>(j, "values"),
        field_as<std::size_t>(j, "cut_index"));
  }
  if (family == "per-coordinate") {
    std::vector<ApproxFunction> parts;
    for (const Json& part : require_field(j, "parts")) {
      parts.push_back(approx_function_from_json(part));
    }
    return ApproxFunction::per_coordinate(std::move(parts));
  }
  fail(errkind::parse, "unknown psi family in JSON: " + family);
}

Json to_json(const ProblemSpec& spec) {
  return Json{{"m", spec.m},
              {"n", spec.n},
              {"variant", variant_name(spec.variant)},
              {"psi", to_json(spec.psi)}};
}

ProblemSpec problem_spec_from_json(const Json& j) {
  return ProblemSpec(field_as<int>(j, "m"), field_as<int>(j, "n"),
                     variant_from_name(field_as<std::string>(j, "variant")),
                     approx_function_from_json(require_field(j, "psi")));
}

Json to_json(const HeightWindow& window) {
  return Json{{"q_min", window.q_min}, {"q_max", window.q_max}};
}

HeightWindow height_window_from_json(const Json& j) {
  return HeightWindow(field_as<long long>(j, "q_min"),
                      field_as<long long>(j, "q_max"));
}

Json to_json(const SolutionRecord& record) {
  Json out{{"q", record.q.components},
           {"height", record.q.height()},
           {"form_values", record.form_values},
           {"bounds", record.bounds},
           {"margin", record.margin},
           {"uncertain", record.uncertain},
           {"exact", record.exact}};
  if (record.exact) {
    out["form_values_exact"] = rationals_to_json(record.form_values_exact);
    out["bounds_exact"] = rationals_to_json(record.bounds_exact);
    if (record.margin_exact) {
      out["margin_exact"] = format_rational(*record.margin_exact);
    }
  }
  return out;
}

Json to_json(const EnumerationReport& report) {
  Json solutions = Json::array();
  for (const SolutionRecord& record : report.solutions) {
    solutions.push_back(to_json(record));
  }
  return Json{{"m", report.m},
              {"n", report.n},
              {"variant", variant_name(report.variant)},
              {"window", to_json(report.window)},
              {"exact", report.exact},
              {"solution_count", report.solution_count()},
              {"solutions", std::move(solutions)},
              {"shell_counts", report.shell_counts},
              {"vectors_scanned", report.vectors_scanned},
              {"uncertain", report.uncertain}};
}

Json to_json(const CriterionSeries& series) {
  Json out{{"kind", criterion_kind_name(series.kind)},
           {"m", series.m},
           {"n", series.n},
           {"psi", to_json(series.psi)}};
  if (series.f) {
    out["f"] = Json{{"s", series.f->s()}, {"kappa", series.f->kappa()}};
  } else {
    out["f"] = nullptr;
  }
  return out;
}

Json to_json(const SeriesVerdict& verdict) {
  Json hypotheses = Json::array();
  for (const HypothesisCheck& check : verdict.hypotheses) {
    hypotheses.push_back(Json{{"name", check.name},
                              {"satisfied", check.satisfied},
                              {"detail", check.detail}});
  }
  Json sums = Json::array();
  for (const PartialSum& ps : verdict.partial_sums) {
    sums.push_back(Json{{"upto", ps.upto}, {"sum", ps.sum}});
  }
  Json out{{"classification", series_class_name(verdict.classification)},
           {"term_formula", verdict.term_formula},
           {"partial_sum_start", verdict.partial_sum_start},
           {"partial_sums", std::move(sums)},
           {"hypotheses", std::move(hypotheses)},
           {"hypotheses_ok", verdict.hypotheses_ok()},
           {"zero_case", verdict.zero_case},
           {"full_case", verdict.full_case}};
  out["power_exponent"] =
      verdict.power_exponent ? Json(*verdict.power_exponent) : Json(nullptr);
  out["log_exponent"] =
      verdict.log_exponent ? Json(*verdict.log_exponent) : Json(nullptr);
  return out;
}

Json classification_json(const CriterionSeries& series,
                         const SeriesVerdict& verdict) {
  return Json{{"criterion", to_json(series)}, {"verdict", to_json(verdict)}};
}

Json critical_exponent_json(CriterionKind kind, int m, int n, double tau,
                            const CriticalExponent& value) {
  return Json{{"kind", criterion_kind_name(kind)},
              {"m", m},
              {"n", n},
              {"tau", tau},
              {"s_star", value.s_star},
              {"within_ambient", value.within_ambient},
              {"ambient", value.ambient}};
}

Json to_json(const RestrictedMatrix& rx) {
  Json out{{"m", rx.m},
           {"n", rx.n},
           {"exact", rx.exact},
           {"epsilon", format_rational(rx.epsilon)},
           {"cap", format_rational(rx.cap)},
           {"det_top", rx.det_top},
           {"top", matd_to_json(rx.top_float)},
           {"bottom", matd_to_json(rx.bottom_float)},
           {"xhat", matd_to_json(rx.xhat_float)}};
  if (rx.exact) {
    out["det_top_exact"] = format_rational(*rx.det_top_exact);
    out["top_exact"] = matq_to_json(*rx.top_exact);
    out["bottom_exact"] = matq_to_json(*rx.bottom_exact);
    out["xhat_exact"] = matq_to_json(*rx.xhat_exact);
  }
  return out;
}

Json to_json(const LiftCertificate& cert) {
  Json out{{"schema_version", kSchemaVersion},
           {"type", "lift-certificate"},
           {"r", cert.r.components},
           {"p", cert.p.components},
           {"q", cert.q.components},
           {"form_values", cert.form_values},
           {"bound", cert.bound},
           {"exact", cert.exact},
           {"q_height", cert.q_height},
           {"holds_at_q_height", cert.holds_at_q_height}};
  if (cert.exact) {
    out["form_values_exact"] = rationals_to_json(cert.form_values_exact);
    if (cert.bound_exact) out["bound_exact"] = format_rational(*cert.bound_exact);
  }
  return out;
}

LiftCertificate certificate_from_json(const Json& j) {
  if (field_as<int>(j, "schema_version") != kSchemaVersion) {
    fail(errkind::parse, "unsupported certificate schema version");
  }
  if (field_as<std::string>(j, "type") != "lift-certificate") {
    fail(errkind::parse, "not a lift certificate document");
  }
  LiftCertificate cert;
  cert.r = vector_from_json(j, "r");
  cert.p = vector_from_json(j, "p");
  cert.q = vector_from_json(j, "q");
  cert.form_values = field_as<std::vector<double>>(j, "form_values");
  cert.bound = field_as<double>(j, "bound");
  cert.exact = field_as<bool>(j, "exact");
  cert.q_height = field_as<long long>(j, "q_height");
  cert.holds_at_q_height = field_as<bool>(j, "holds_at_q_height");
  if (cert.exact) {
    for (const std::string& v :
         field_as<std::vector<std::string>>(j, "form_values_exact")) {
      cert.form_values_exact.push_back(parse_rational(v));
    }
    cert.bound_exact = parse_rational(field_as<std::string>(j, "bound_exact"));
  }
  return cert;
}

Json to_json(const DependenceWitness& witness) {
  Json out{{"rank", witness.rank}, {"coefficients", witness.coefficients}};
  if (witness.coefficients_exact) {
    out["coefficients_exact"] = rationals_to_json(*witness.coefficients_exact);
  } else {
    out["coefficients_exact"] = nullptr;
  }
  return out;
}

Json to_json(const FractionEstimate& estimate) {
  return Json{{"fraction", estimate.fraction},
              {"ci_low", estimate.ci_low},
              {"ci_high", estimate.ci_high},
              {"hits", estimate.hits},
              {"samples", estimate.samples}};
}

Json to_json(const ExperimentPlan& plan) {
  Json windows = Json::array();
  for (const HeightWindow& w : plan.windows) windows.push_back(to_json(w));
  return Json{{"spec", to_json(plan.spec)},
              {"seed", plan.seed},
              {"windows", std::move(windows)},
              {"samples", plan.samples},
              {"mode", lab_mode_name(plan.mode)},
              {"agree_high", plan.agree_high},
              {"agree_low", plan.agree_low},
              {"budget", plan.budget},
              {"jobs", plan.jobs}};
}

ExperimentPlan plan_from_json(const Json& j) {
  ExperimentPlan plan{problem_spec_from_json(require_field(j, "spec")),
                      field_as<std::uint64_t>(j, "seed"),
                      {},
                      field_as<long long>(j, "samples"),
                      lab_mode_from_name(field_as<std::string>(j, "mode")),
                      field_as<double>(j, "agree_high"),
                      field_as<double>(j, "agree_low"),
                      field_as<unsigned long long>(j, "budget"),
                      field_as<int>(j, "jobs")};
  for (const Json& w : require_field(j, "windows")) {
    plan.windows.push_back(height_window_from_json(w));
  }
  return plan;
}

Json to_json(const RunRecord& record) {
  Json windows = Json::array();
  for (const WindowResult& wr : record.windows) {
    windows.push_back(Json{{"window", to_json(wr.window)},
                           {"estimate", to_json(wr.estimate)}});
  }
  return Json{{"schema_version", kSchemaVersion},
              {"type", "measure-run"},
              {"plan", to_json(record.plan)},
              {"windows", std::move(windows)},
              {"predicted_kind", criterion_kind_name(record.predicted_kind)},
              {"predicted", series_class_name(record.predicted)},
              {"agreement", agreement_name(record.agreement)},
              {"wall_seconds", record.wall_seconds},
              {"engine", record.engine}};
}

RunRecord run_record_from_json(const Json& j) {
  if (field_as<int>(j, "schema_version") != kSchemaVersion) {
    fail(errkind::parse, "unsupported run schema version");
  }
  if (field_as<std::string>(j, "type") != "measure-run") {
    fail(errkind::parse, "not a measure-run document");
  }
  RunRecord record{plan_from_json(require_field(j, "plan")),
                   {},
                   criterion_kind_from_name(
                       field_as<std::string>(j, "predicted_kind")),
                   series_class_from_name(field_as<std::string>(j, "predicted")),
                   agreement_from_name(field_as<std::string>(j, "agreement")),
                   field_as<double>(j, "wall_seconds"),
                   field_as<std::string>(j, "engine")};
  for (const Json& wr : require_field(j, "windows")) {
    WindowResult result;
    result.window = height_window_from_json(require_field(wr, "window"));
    const Json& est = require_field(wr, "estimate");
    result.estimate.fraction = field_as<double>(est, "fraction");
    result.estimate.ci_low = field_as<double>(est, "ci_low");
    result.estimate.ci_high = field_as<double>(est, "ci_high");
    result.estimate.hits = field_as<long long>(est, "hits");
    result.estimate.samples = field_as<long long>(est, "samples");
    record.windows.push_back(std::move(result));
  }
  return record;
}

Json to_json(const BoxCountResult& result) {
  Json points = Json::array();
  for (const BoxCountPoint& point : result.points) {
    points.push_back(Json{{"k", point.k},
                          {"delta", point.delta},
                          {"q_min", point.q_min},
                          {"q_max", point.q_max},
                          {"box_count", point.box_count}});
  }
  return Json{{"schema_version", kSchemaVersion},
              {"type", "box-count"},
              {"points", std::move(points)},
              {"slope", result.slope},
              {"intercept", result.intercept},
              {"s_star", result.s_star},
              {"residuals", result.residuals}};
}

Json error_json(const std::string& kind, const std::string& message) {
  return Json{{"error", Json{{"kind", kind}, {"message", message}}}};
}

// ---- CSV views -------------------------------------------------------------

std::string fractions_csv(const RunRecord& record) {
  std::ostringstream out;
  out << "q_min,q_max,fraction,ci_low,ci_high,hits,samples\n";
  for (const WindowResult& wr : record.windows) {
    out << wr.window.q_min << ',' << wr.window.q_max << ','
        << csv_num(wr.estimate.fraction) << ',' << csv_num(wr.estimate.ci_low)
        << ',' << csv_num(wr.estimate.ci_high) << ',' << wr.estimate.hits
        << ',' << wr.estimate.samples << '\n';
  }
  return out.str();
}

std::string box_counts_csv(const BoxCountResult& result) {
  std::ostringstream out;
  out << "k,delta,q_min,q_max,box_count\n";
  for (const BoxCountPoint& point : result.points) {
    out << point.k << ',' << csv_num(point.delta) << ',' << point.q_min << ','
        << point.q_max << ',' << point.box_count << '\n';
  }
  return out.str();
}

// ---- run persistence -------------------------------------------------------

void persist_run(const RunRecord& record, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errkind::io, "cannot open for writing: " + path);
  out << to_json(record).dump(2) << '\n';
  if (!out) fail(errkind::io, "write failed: " + path);
}

RunRecord load_run(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errkind::io, "cannot open: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    fail(errkind::parse, path + ": " + e.what());
  }
  return run_record_from_json(j);
}

}  // namespace smallforms
