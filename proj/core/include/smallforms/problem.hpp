#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smallforms/approx_function.hpp"
#include "smallforms/matrix.hpp"
#include "smallforms/rational.hpp"

namespace smallforms {

// Which smallness notion defines the solution set: absolute value of the
// forms (the "small linear forms" set), or distance to the nearest integer
// (the classical simultaneous-approximation set).
enum class Variant { Absolute, Classical };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// Structural classification of a problem by (m, n, variant).
//  - Singleton:    m = 1, absolute — only the zero matrix is approximable.
//  - Excluded:     (m, n) = (2, 1), absolute — outside every criterion here.
//  - Hypersurface: 2 < m <= n, absolute — solutions force dependent columns.
//  - Generic:      m > n and m + n > 3, absolute — the main regime.
//  - Classical:    classical variant, any shape.
//  - Unresolved:   the remaining absolute shapes (m = 2, n >= 2), which no
//                  implemented criterion covers; kept explicit so the
//                  classification stays exhaustive.
enum class Regime { Singleton, Excluded, Hypersurface, Generic, Classical, Unresolved };

const char* regime_name(Regime r);

// An integer vector q with sup-norm height |q| = max_i |q_i|.
struct IntegerVector {
  std::vector<long long> components;

  long long height() const;
  bool is_zero() const;
  bool operator==(const IntegerVector& other) const {
    return components == other.components;
  }
};

// Closed height range 1 <= q_min <= |q| <= q_max for finite truncations.
struct HeightWindow {
  long long q_min = 1;
  long long q_max = 1;

  HeightWindow() = default;
  HeightWindow(long long lo, long long hi);

  bool operator==(const HeightWindow& other) const {
    return q_min == other.q_min && q_max == other.q_max;
  }
};

// An m x n matrix with entries in the closed unit interval, in either exact
// rational or double representation (uniform across the matrix).  Exact
// matrices support exact linear-form evaluation.
class FormMatrix {
 public:
  static FormMatrix exact(MatQ entries);
  static FormMatrix floating(MatD entries);

  bool is_exact() const { return exact_.has_value(); }
  int m() const { return m_; }
  int n() const { return n_; }

  const MatQ& exact_entries() const;
  const MatD& float_entries() const;

  double entry_double(int i, int j) const;

  bool operator==(const FormMatrix& other) const;

 private:
  FormMatrix() = default;

  int m_ = 0;
  int n_ = 0;
  std::optional<MatQ> exact_;
  std::optional<MatD> float_;
};

// The problem statement: dimensions, variant, and approximating function.
// Per-coordinate approximating functions must have exactly n parts.
struct ProblemSpec {
  int m;
  int n;
  Variant variant;
  ApproxFunction psi;

  ProblemSpec(int m_in, int n_in, Variant variant_in, ApproxFunction psi_in);
};

Regime classify_regime(const ProblemSpec& spec);

// A verifiable membership certificate for one solution q: the per-form
// values, the per-form bounds psi_i(|q|), and the worst-case margin
// min_i (bound_i - value_i), which is positive for every emitted solution.
// Exact-mode records carry rational values alongside the double views.
struct SolutionRecord {
  IntegerVector q;
  std::vector<double> form_values;
  std::vector<double> bounds;
  double margin = 0.0;
  bool uncertain = false;  // float mode: margin within guard tolerance
  bool exact = false;
  std::vector<Rational> form_values_exact;
  std::vector<Rational> bounds_exact;
  std::optional<Rational> margin_exact;
};

}  // namespace smallforms
