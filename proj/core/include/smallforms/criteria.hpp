#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smallforms/approx_function.hpp"
#include "smallforms/dimension_function.hpp"

namespace smallforms {

// The series criteria implemented by the classifier.  Each kind names the
// solution-set variant it governs and the measure it decides:
//  - ClassicalLebesgue:    Lebesgue zero-one law for the nearest-integer set,
//                          series r^(m-1) psi(r)^n.
//  - AbsoluteHausdorff:    Hausdorff f-measure law for the absolute-value
//                          set, series f(Psi(r)) Psi(r)^(-(m-1)n) r^(m-1);
//                          hypothesis sets differ between the m > n shape
//                          and the wide shape 2 < m <= n, where the
//                          divergence conclusion becomes infinite-or-positive
//                          depending on the limit of r^(-(m-1)(n+1)) f(r).
//  - AbsoluteLebesgue:     Lebesgue zero-one law for the absolute-value set
//                          (m > n), series psi(r)^n r^(m-n-1).
//  - AbsoluteLebesgueWide: zero-positive law on the carrier hypersurface for
//                          the wide shape 2 < m <= n, series psi(r)^(m-1).
//  - ClassicalHausdorff:   Hausdorff f-measure law for the nearest-integer
//                          set, series f(Psi(r)) Psi(r)^(-(m-1)n) r^(m+n-1).
//  - AbsoluteRates:        per-form approximation rates (m > n), series
//                          psi_1(r) ... psi_n(r) r^(m-n-1).
enum class CriterionKind {
  ClassicalLebesgue,
  AbsoluteHausdorff,
  AbsoluteLebesgue,
  AbsoluteLebesgueWide,
  ClassicalHausdorff,
  AbsoluteRates,
};

const char* criterion_kind_name(CriterionKind k);

// Accepts the descriptive names above (case-insensitive) plus the short
// aliases kg, thm1, thm2, cor1, cor2, thm3, rates used on the command line.
CriterionKind criterion_kind_from_name(const std::string& name);

// Outcome of the exponent test on a series with term ~ r^e (log r)^k:
//  e < -1, or e = -1 with k < -1  -> Convergent
//  e > -1, or e = -1 with k > -1  -> Divergent
//  e = -1 with k = -1             -> Boundary (finer refinements are out of
//                                    scope and deliberately not resolved)
//  exponents unavailable (tables) -> Unknown
enum class SeriesClass { Convergent, Divergent, Boundary, Unknown };

const char* series_class_name(SeriesClass c);

// One hypothesis of the governing statement, reported but never blocking:
// a verdict with a violated hypothesis still records the series behaviour,
// it just cannot promise the measure conclusion.
struct HypothesisCheck {
  std::string name;
  bool satisfied = false;
  std::string detail;
};

struct PartialSum {
  long long upto = 0;  // inclusive upper summation limit
  double sum = 0.0;
};

struct SeriesVerdict {
  SeriesClass classification = SeriesClass::Unknown;
  std::optional<double> power_exponent;  // e, power-log families only
  std::optional<double> log_exponent;    // k, power-log families only
  std::string term_formula;
  long long partial_sum_start = 1;  // first index of the summation
  std::vector<PartialSum> partial_sums;
  std::vector<HypothesisCheck> hypotheses;
  std::string zero_case;  // measure conclusion when the series converges
  std::string full_case;  // measure conclusion when the series diverges

  bool hypotheses_ok() const;
};

// A criterion instance.  Hausdorff kinds require f; the others reject it.
// Per-coordinate psi is accepted only by AbsoluteRates and must then carry
// exactly n coordinate functions.
struct CriterionSeries {
  CriterionKind kind;
  int m = 0;
  int n = 0;
  ApproxFunction psi;
  std::optional<DimensionFunction> f;

  CriterionSeries(CriterionKind kind_in, int m_in, int n_in,
                  ApproxFunction psi_in,
                  std::optional<DimensionFunction> f_in = std::nullopt);
};

// The r-th term of the series, r >= 1.  Hausdorff kinds with a log-weighted
// f are only defined where Psi(r) < 1; call sites should start from
// classify(...).partial_sum_start.
double series_term(const CriterionSeries& series, long long r);

// Classifies the series.  Power-log inputs get an exact verdict by exponent
// comparison; table inputs get partial sums only and verdict Unknown.
// Hypothesis violations are reported in the verdict, never thrown.
SeriesVerdict classify(const CriterionSeries& series);

struct CriticalExponent {
  double s_star = 0.0;
  // s* <= mn; outside this window the ambient-measure regime applies and the
  // exponent no longer names a Hausdorff dimension.
  bool within_ambient = false;
  double ambient = 0.0;  // mn
};

// The unique s where the Hausdorff series exponent balances at -1 for
// psi(r) = r^(-tau), f(r) = r^s:
//   AbsoluteHausdorff:  s* = (m-1)n + m/(tau+1), requires m > n and m+n > 3
//   ClassicalHausdorff: s* = (m-1)n + (m+n)/(tau+1), any m, n >= 1
// Requires tau > 0.  Other kinds have no critical exponent and throw.
CriticalExponent critical_exponent(CriterionKind kind, int m, int n, double tau);

// The absolute Hausdorff criterion restated through g(r) = r^(-n^2) f(r):
// term g(Psi(r)) Psi(r)^(-(m-n-1)n) r^(m-1), which equals the
// AbsoluteHausdorff term identically because g(Psi) Psi^(-(m-n-1)n)
// = f(Psi) Psi^(-(m-1)n).  Exponents are computed independently from g, so
// agreement with classify(AbsoluteHausdorff) is a checkable identity, not a
// tautology.  Throws when g fails to be a dimension function.
SeriesVerdict g_series(int m, int n, const ApproxFunction& psi,
                       const DimensionFunction& f);

}  // namespace smallforms
