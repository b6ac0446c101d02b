#pragma once

#include <string>

#include "smallforms/criteria.hpp"
#include "smallforms/forms_engine.hpp"
#include "smallforms/lab.hpp"
#include "smallforms/problem.hpp"
#include "smallforms/reduction.hpp"
#include "smallforms/vendor/json.hpp"

namespace smallforms {

using Json = nlohmann::json;

// ---- Command-line literal syntax ------------------------------------------
//
// Matrix:  rows separated by ";", entries by ",".  Entries written as
//          rationals ("p/q" or plain integers) build an exact matrix;
//          any decimal point or exponent switches the whole matrix to
//          double mode.  Example: "1/2;1/3" is the exact 2 x 1 matrix.
// Psi:     "powerlog:c,tau,kappa" (c rational or decimal; tau, kappa
//          decimal), "table:@file.csv" (one value per line or comma
//          separated; optional "#cut=K" first line sets the first tabulated
//          height), "table:v1,v2,..." inline, and
//          "percoord:[lit|lit|...]" with "|"-separated psi literals.
// f:       "s" or "s,kappa" for f(r) = r^s log(1/r)^(-kappa).
// Window:  "lo:hi" (heights, inclusive).
// Vector:  "a,b,c" (integers).
//
// All parsers throw Error(parse_error) with the offending text.

FormMatrix parse_matrix_literal(const std::string& text);
ApproxFunction parse_psi_literal(const std::string& text);
DimensionFunction parse_f_literal(const std::string& text);
HeightWindow parse_window_literal(const std::string& text);
IntegerVector parse_vector_literal(const std::string& text);

// ---- JSON views -----------------------------------------------------------
//
// Exact rationals are serialized as canonical "p/q" strings, so exact data
// round-trips losslessly; doubles rely on the shortest-round-trip printer.
// Schema-versioned documents (run records, certificates) carry
// "schema_version": 1 and reject unknown versions on load.

Json to_json(const ApproxFunction& psi);
ApproxFunction approx_function_from_json(const Json& j);

Json to_json(const ProblemSpec& spec);
ProblemSpec problem_spec_from_json(const Json& j);

Json to_json(const HeightWindow& window);
HeightWindow height_window_from_json(const Json& j);

Json to_json(const SolutionRecord& record);
Json to_json(const EnumerationReport& report);

Json to_json(const CriterionSeries& series);
Json to_json(const SeriesVerdict& verdict);
// The classify envelope: {"criterion": ..., "verdict": ...}.
Json classification_json(const CriterionSeries& series, const SeriesVerdict& verdict);

// The critical-exponent envelope echoes the query parameters beside the value.
Json critical_exponent_json(CriterionKind kind, int m, int n, double tau,
                            const CriticalExponent& value);

Json to_json(const RestrictedMatrix& rx);
Json to_json(const LiftCertificate& cert);
LiftCertificate certificate_from_json(const Json& j);
Json to_json(const DependenceWitness& witness);

Json to_json(const FractionEstimate& estimate);
Json to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const Json& j);
Json to_json(const RunRecord& record);
RunRecord run_record_from_json(const Json& j);

Json to_json(const BoxCountResult& result);

// The CLI's structured error envelope: {"error": {"kind": ..., "message": ...}}.
Json error_json(const std::string& kind, const std::string& message);

// ---- CSV views ------------------------------------------------------------

// Header q_min,q_max,fraction,ci_low,ci_high,hits,samples; one row per window.
std::string fractions_csv(const RunRecord& record);
// Header k,delta,q_min,q_max,box_count; one row per grid scale.
std::string box_counts_csv(const BoxCountResult& result);

}  // namespace smallforms
