#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smallforms/criteria.hpp"
#include "smallforms/problem.hpp"

namespace smallforms {

enum class LabMode { MeasureTrend, DimensionBoxCount };

const char* lab_mode_name(LabMode m);
LabMode lab_mode_from_name(const std::string& name);

// Outcome of confronting a measured trend with a series verdict.  The lab
// never claims proof: Consistent means "the finite-height trend matches the
// predicted dichotomy at the heights tested", nothing stronger.
enum class Agreement { Consistent, Inconsistent, NotApplicable };

const char* agreement_name(Agreement a);

// A reproducible experiment: everything needed to re-run it exactly.
struct ExperimentPlan {
  ProblemSpec spec;
  std::uint64_t seed = 0;
  std::vector<HeightWindow> windows;  // q_max strictly increasing
  long long samples = 1;
  LabMode mode = LabMode::MeasureTrend;
  // Trend thresholds: a divergent prediction is Consistent when the final
  // fraction reaches agree_high with no decreases along the schedule; a
  // convergent prediction is Consistent when it stays at or below agree_low.
  double agree_high = 0.9;
  double agree_low = 0.1;
  unsigned long long budget = 1'000'000'000ULL;  // per-scan evaluation cap
  int jobs = 1;
};

struct FractionEstimate {
  double fraction = 0.0;
  double ci_low = 0.0;   // 95% Wilson interval
  double ci_high = 0.0;
  long long hits = 0;
  long long samples = 0;
};

// Fraction of matrices X, sampled uniformly on the unit cube of m x n
// matrices, that have at least one solution with height in the window.
// Sample i draws its matrix from substream (seed, i), so the result is
// bit-identical for every worker count.  Regime must be Generic or
// Classical (an Error of kind "regime_error" otherwise); a window whose scan
// estimate exceeds the budget throws kind "budget_exceeded" with the
// estimate in the message.
FractionEstimate estimate_hit_fraction(const ProblemSpec& spec,
                                       const HeightWindow& window,
                                       long long samples, std::uint64_t seed,
                                       int jobs = 1,
                                       unsigned long long budget =
                                           1'000'000'000ULL);

struct WindowResult {
  HeightWindow window;
  FractionEstimate estimate;
};

struct RunRecord {
  ExperimentPlan plan;
  std::vector<WindowResult> windows;
  CriterionKind predicted_kind = CriterionKind::AbsoluteLebesgue;
  SeriesClass predicted = SeriesClass::Unknown;
  Agreement agreement = Agreement::NotApplicable;
  double wall_seconds = 0.0;
  std::string engine;  // version tag of the producing build
};

// Runs the full height schedule of a MeasureTrend plan, classifies the
// matching zero-one criterion (absolute or classical Lebesgue; per-form
// rates when psi is per-coordinate), and records the agreement flag.
// Boundary or Unknown predictions yield agreement NotApplicable.
RunRecord zero_one_verdict(const ExperimentPlan& plan);

// Expected number of sign-canonical solutions in the window for a uniform
// random X: sum over heights of shell size times the per-form width factors
// min(1, 2 psi_i(r)).  A crude union bound used for sanity checks.
double first_moment_bound(const ProblemSpec& spec, const HeightWindow& window);

// Exact volume of {X in I^{m x n} : |(qX)_i| < widths[i] for all i}; the
// columns are independent, so this is a product of single-form slab volumes,
// each computed by the inclusion-exclusion formula for a simplex slice.
double slab_volume(const IntegerVector& q, const std::vector<double>& widths);

// Box-counting plan for the solution set truncated to a delta-dependent
// height window: delta = 2^-k, q_min(delta) = max(2, round(coeff *
// delta^(-1/(tau+1)))), q_max = max(q_min, round(span * q_min)).  The
// window tracks the scale at which height-q slabs are delta-resolvable, so
// the count scales like the critical exponent instead of saturating.
struct BoxCountPlan {
  ProblemSpec spec;  // absolute variant, pure power psi(r) = c r^(-tau)
  std::vector<int> delta_exponents;  // k values, strictly increasing, >= 3 of them
  double q_lo_coeff = 1.0;
  double q_span = 2.5;
  int jobs = 1;
  unsigned long long budget = 1'000'000'000ULL;
};

struct BoxCountPoint {
  int k = 0;
  double delta = 0.0;
  long long q_min = 0;
  long long q_max = 0;
  long long box_count = 0;
};

struct BoxCountResult {
  std::vector<BoxCountPoint> points;
  double slope = 0.0;      // least-squares slope of log N vs log(1/delta)
  double intercept = 0.0;
  double s_star = 0.0;     // critical exponent the slope is compared against
  std::vector<double> residuals;
};

// Counts delta-grid boxes of the unit cube meeting the union of open slabs
// {X : |qX|_i < psi(|q|)} over the window, analytically per q (no point
// sampling), and fits the dimension slope.  Requires the Generic regime,
// tau >= (m-n)/n (so the critical exponent stays within the ambient
// dimension), and at least three grid scales.  Grids beyond 2^27 boxes or
// scans beyond the budget throw an Error of kind "budget_exceeded".
BoxCountResult box_count_dimension(const BoxCountPlan& plan);

// JSON persistence of run records (schema-versioned, lossless round-trip;
// malformed or incomplete files throw an Error of kind "parse_error" naming the
// offending field).
void persist_run(const RunRecord& record, const std::string& path);
RunRecord load_run(const std::string& path);

}  // namespace smallforms
