#pragma once

#include <optional>
#include <vector>

#include "smallforms/approx_function.hpp"
#include "smallforms/matrix.hpp"
#include "smallforms/problem.hpp"
#include "smallforms/rational.hpp"

namespace smallforms {

// A tall matrix X (m > n) admitted to the restricted family: the top n x n
// block T = first n rows has epsilon < det(T) < 1/epsilon and entries of
// magnitude at most cap, so T is invertible and X factors as
//     X = (I_n ; xhat) * T,     xhat = B * T^{-1},
// with B the bottom (m-n) x n block.  Blocks are cached in the same mode as
// X: exact rational throughout, or double throughout (reconstruction then
// holds to 1e-10 instead of exactly).
struct RestrictedMatrix {
  FormMatrix X;
  Rational epsilon;
  Rational cap;
  int m = 0;
  int n = 0;
  bool exact = false;

  std::optional<MatQ> top_exact;
  std::optional<MatQ> bottom_exact;
  std::optional<MatQ> xhat_exact;
  std::optional<Rational> det_top_exact;

  MatD top_float;     // always populated (double view of the blocks)
  MatD bottom_float;
  MatD xhat_float;
  double det_top = 0.0;
};

// Validates membership and caches the blocks.  Errors:
//   - m <= n                      -> Error(regime_error)
//   - det(T) = 0 (or |det| below max(epsilon, 1e-8) in float mode)
//                                 -> Error(singular_top_block)
//   - det window or entry cap violated
//                                 -> Error(membership_violation), message
//                                    naming the failed condition
// Requires 0 < epsilon < 1 and cap > 0 (Error(invalid_argument) otherwise).
RestrictedMatrix decompose(const FormMatrix& X, const Rational& epsilon,
                           const Rational& cap);

// The fractional parts of xhat as a FormMatrix (entries in [0, 1)), suitable
// for nearest-integer enumeration: integer shifts of the entries do not
// change any nearest-integer distance of r * xhat.
FormMatrix xhat_fractional(const RestrictedMatrix& rx);

// Certificate that q = (-p, r) solves the absolute problem for X with the
// bound psi(|r|): writing d = r * xhat - p with p the nearest integer vector
// to r * xhat, one has q X = d * T, so every |q X|_i is at most
// n * cap * max_j |d_j| <= psi(|r|) once max_j |d_j| <= psi(|r|) / (n * cap).
struct LiftCertificate {
  IntegerVector r;  // length m - n, nonzero
  IntegerVector p;  // length n, nearest integer vector to r * xhat
  IntegerVector q;  // (-p, r), length m
  std::vector<double> form_values;  // |q X|_i
  double bound = 0.0;               // psi(|r|)
  bool exact = false;
  std::vector<Rational> form_values_exact;  // exact mode only
  std::optional<Rational> bound_exact;
  long long q_height = 0;  // |q| = max(|p|, |r|), can exceed |r|
  // Whether the stronger inequality |q X|_i < psi(|q|) also holds for this
  // instance; not guaranteed when |q| > |r|, so it is checked, not assumed.
  bool holds_at_q_height = false;
};

// Lifts a nearest-integer solution r of the scaled problem on xhat to a
// certified solution of the absolute problem on X.  The precondition
//   max_j ||r * xhat||_j <= psi(|r|) / (n * cap)
// is checked (inclusively) and its violation throws Error(lift_precondition)
// naming the offending coordinate.  r = 0 throws Error(invalid_argument).
// Nearest-integer ties round to the even integer.
LiftCertificate lift_solution(const RestrictedMatrix& rx,
                              const IntegerVector& r,
                              const ApproxFunction& psi);

// Independent re-check of a certificate against X and psi from scratch:
// q = (-p, r), q != 0, every |q X|_i <= psi(|r|), and the reported
// q-height flag matches a direct evaluation.  Exact arithmetic whenever the
// matrix and psi support it.
bool verify_certificate(const LiftCertificate& cert, const FormMatrix& X,
                        const ApproxFunction& psi);

// The embedding (Y, T) -> (T ; Y T) of a pair into the tall-matrix space;
// the top block T must satisfy the same det-window and entry-cap conditions
// as a decomposition top block (Error(membership_violation) otherwise).
// decompose of the output (when its entries lie in [0, 1]) recovers
// xhat = Y and top = T exactly.
MatQ eta_embed(const MatQ& Y, const MatQ& T, const Rational& epsilon,
               const Rational& cap);
MatD eta_embed(const MatD& Y, const MatD& T, double epsilon, double cap);

// Forward Lipschitz bound for eta_embed on unit-cube Y blocks: sup-norm
// output distance is at most n * (cap + 1) times the input distance.
double eta_lipschitz_bound(int n, double cap);

// Witness that the columns of X are conditionally dependent, i.e. that
// rank(X) < min(m, n).  (For m < n any n columns in R^m are automatically
// dependent; that automatic dependence is deliberately not reported.)
struct DependenceWitness {
  std::size_t rank = 0;                 // rank of X
  std::vector<double> coefficients;     // c != 0 with ||X c|| below tolerance
  std::optional<std::vector<Rational>> coefficients_exact;  // exact mode
};

// Requires m <= n (Error(regime_error) otherwise: with more variables than
// forms the solution set does not concentrate on a hypersurface and the
// witness question does not arise).  Exact matrices use exact rank and an
// exact kernel vector; float matrices use the singular-value threshold
// `tolerance` on the Gram spectrum.
std::optional<DependenceWitness> column_dependence_witness(
    const FormMatrix& X, double tolerance = 1e-9);

}  // namespace smallforms
