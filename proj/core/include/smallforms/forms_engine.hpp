#pragma once

#include <cstdint>
#include <vector>

#include "smallforms/problem.hpp"

namespace smallforms {

// Knobs shared by all enumeration entry points.
struct EngineOptions {
  // Use "<= bound" instead of the default strict "< bound" membership test
  // (sensitivity flag; rational fixtures with exact boundary values care).
  bool inclusive = false;
  // Float mode: candidates whose |bound - value| falls within
  // guard * bound are counted as "uncertain" in the report.
  double float_guard = 1e-12;
  // Worker threads; results are bit-identical for every value.
  int jobs = 1;
  // Upper bound on candidate-form evaluations for one scan; exceeding the
  // a-priori estimate throws Error(budget_exceeded).
  unsigned long long budget = 1'000'000'000ULL;
};

// Everything one bounded-height scan produces.  Solutions are sign-canonical
// (first nonzero coordinate positive), ordered by increasing height and
// lexicographically within each shell; shell_counts[i] is the number of
// solutions at height window.q_min + i.
struct EnumerationReport {
  int m = 0;
  int n = 0;
  Variant variant = Variant::Absolute;
  HeightWindow window;
  bool exact = false;
  std::vector<SolutionRecord> solutions;
  std::vector<long long> shell_counts;
  unsigned long long vectors_scanned = 0;
  unsigned long long uncertain = 0;

  long long solution_count() const;
};

// Per-form absolute values |(qX)_i| of the n linear forms at q.
std::vector<double> eval_abs_forms(const IntegerVector& q, const FormMatrix& X);
std::vector<Rational> eval_abs_forms_exact(const IntegerVector& q, const FormMatrix& X);

// Per-form nearest-integer distances of qY together with the nearest integer
// vector p (the datum the solution lift consumes).
struct DistResult {
  std::vector<double> distances;
  IntegerVector nearest;
};
struct DistResultExact {
  std::vector<Rational> distances;
  IntegerVector nearest;
};
DistResult eval_dist_forms(const IntegerVector& r, const FormMatrix& Y);
DistResultExact eval_dist_forms_exact(const IntegerVector& r, const FormMatrix& Y);

// Full scan of the window collecting records; exact when both the matrix and
// the approximating function support exact evaluation.
EnumerationReport enumerate_solutions(const ProblemSpec& spec, const FormMatrix& X,
                                      const HeightWindow& window,
                                      const EngineOptions& options = {});

// Streaming variant: per-shell counts only, no stored records.  Agrees with
// enumerate_solutions on every window.
std::vector<long long> count_shells(const ProblemSpec& spec, const FormMatrix& X,
                                    const HeightWindow& window,
                                    const EngineOptions& options = {});

// True iff at least one solution exists in the window; stops at the first hit.
bool has_solution(const ProblemSpec& spec, const FormMatrix& X,
                  const HeightWindow& window, const EngineOptions& options = {});

// Number of sign-canonical integer vectors at sup-norm height exactly r.
double canonical_shell_size(int m, long long r);

// A-priori cost estimate (candidate-form evaluations) for one scan.
double estimate_scan_cost(int m, int n, const HeightWindow& window);

}  // namespace smallforms
