#include "smallforms/reduction.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "smallforms/errors.hpp"
#include "smallforms/forms_engine.hpp"

namespace smallforms {

namespace {

void check_parameters(const Rational& epsilon, const Rational& cap) {
  if (!(epsilon > 0 && epsilon < 1)) {
    fail(errkind::invalid_argument, "epsilon must lie in (0, 1)");
  }
  if (!(cap > 0)) {
    fail(errkind::invalid_argument, "cap must be positive");
  }
}

MatD to_float(const MatQ& a) {
  MatD out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      out.at(i, j) = to_double(a.at(i, j));
    }
  }
  return out;
}

long long integer_to_ll(const Integer& z) {
  if (!z.fits_slong_p()) {
    fail(errkind::range, "integer exceeds the native 64-bit range");
  }
  return z.get_si();
}

void check_top_membership_exact(const MatQ& top, const Rational& det,
                                const Rational& epsilon, const Rational& cap) {
  if (!(det > epsilon && det < Rational(1) / epsilon)) {
    fail(errkind::membership_violation,
         "top-block determinant " + format_rational(det) +
             " outside (epsilon, 1/epsilon)");
  }
  for (std::size_t i = 0; i < top.rows(); ++i) {
    for (std::size_t j = 0; j < top.cols(); ++j) {
      if (rational_abs(top.at(i, j)) > cap) {
        fail(errkind::membership_violation,
             "top-block entry magnitude exceeds the cap");
      }
    }
  }
}

void check_top_membership_float(const MatD& top, double det, double epsilon,
                                double cap) {
  if (!(det > epsilon && det < 1.0 / epsilon)) {
    std::ostringstream os;
    os << "top-block determinant " << det << " outside (epsilon, 1/epsilon)";
    fail(errkind::membership_violation, os.str());
  }
  for (std::size_t i = 0; i < top.rows(); ++i) {
    for (std::size_t j = 0; j < top.cols(); ++j) {
      if (std::fabs(top.at(i, j)) > cap) {
        fail(errkind::membership_violation,
             "top-block entry magnitude exceeds the cap");
      }
    }
  }
}

}  // namespace

RestrictedMatrix decompose(const FormMatrix& X, const Rational& epsilon,
                           const Rational& cap) {
  check_parameters(epsilon, cap);
  const int m = X.m();
  const int n = X.n();
  if (m <= n) {
    fail(errkind::regime,
         "decomposition requires more variables than forms (m > n)");
  }
  RestrictedMatrix rx{X, epsilon, cap, m, n, X.is_exact(), {},
                      {}, {},      {},  {}, {},            {}, 0.0};
  if (X.is_exact()) {
    const MatQ& entries = X.exact_entries();
    MatQ top = submatrix(entries, 0, n, 0, n);
    MatQ bottom = submatrix(entries, n, m, 0, n);
    Rational det = determinant(top);
    if (det == 0) {
      fail(errkind::singular_top_block, "top block is singular");
    }
    check_top_membership_exact(top, det, epsilon, cap);
    std::optional<MatQ> inv = inverse(top);
    MatQ xhat = multiply(bottom, *inv);
    rx.top_float = to_float(top);
    rx.bottom_float = to_float(bottom);
    rx.xhat_float = to_float(xhat);
    rx.det_top = to_double(det);
    rx.top_exact = std::move(top);
    rx.bottom_exact = std::move(bottom);
    rx.xhat_exact = std::move(xhat);
    rx.det_top_exact = std::move(det);
  } else {
    const MatD& entries = X.float_entries();
    MatD top = submatrix(entries, 0, n, 0, n);
    MatD bottom = submatrix(entries, n, m, 0, n);
    const double det = determinant(top);
    const double floor = std::max(to_double(epsilon), 1e-8);
    if (std::fabs(det) < floor) {
      fail(errkind::singular_top_block,
           "top block is numerically singular (|det| below the working floor)");
    }
    check_top_membership_float(top, det, to_double(epsilon), to_double(cap));
    std::optional<MatD> inv = inverse(top);
    if (!inv) {
      fail(errkind::singular_top_block, "top block is numerically singular");
    }
    rx.xhat_float = multiply(bottom, *inv);
    rx.top_float = std::move(top);
    rx.bottom_float = std::move(bottom);
    rx.det_top = det;
  }
  return rx;
}

FormMatrix xhat_fractional(const RestrictedMatrix& rx) {
  if (rx.exact) {
    const MatQ& xhat = *rx.xhat_exact;
    MatQ frac(xhat.rows(), xhat.cols());
    for (std::size_t i = 0; i < xhat.rows(); ++i) {
      for (std::size_t j = 0; j < xhat.cols(); ++j) {
        frac.at(i, j) = fractional_part(xhat.at(i, j));
      }
    }
    return FormMatrix::exact(std::move(frac));
  }
  const MatD& xhat = rx.xhat_float;
  MatD frac(xhat.rows(), xhat.cols());
  for (std::size_t i = 0; i < xhat.rows(); ++i) {
    for (std::size_t j = 0; j < xhat.cols(); ++j) {
      const double f = xhat.at(i, j) - std::floor(xhat.at(i, j));
      frac.at(i, j) = f < 1.0 ? f : 0.0;  // guard against rounding to 1.0
    }
  }
  return FormMatrix::floating(std::move(frac));
}

LiftCertificate lift_solution(const RestrictedMatrix& rx,
                              const IntegerVector& r,
                              const ApproxFunction& psi) {
  const int n = rx.n;
  const int tail = rx.m - rx.n;
  if (static_cast<int>(r.components.size()) != tail) {
    fail(errkind::dimension_mismatch, "r must have length m - n");
  }
  if (r.is_zero()) {
    fail(errkind::invalid_argument, "r must be nonzero");
  }
  if (psi.family() == ApproxFamily::PerCoordinate) {
    fail(errkind::invalid_argument,
         "the lift uses a single approximating function, not per-coordinate "
         "bounds");
  }
  const long long r_height = r.height();
  LiftCertificate cert;
  cert.r = r;
  cert.exact = rx.exact && psi.exact_capable();

  if (cert.exact) {
    const MatQ& xhat = *rx.xhat_exact;
    std::vector<Rational> v(n, Rational(0));
    for (int k = 0; k < tail; ++k) {
      const long long rk = r.components[k];
      if (rk == 0) continue;
      for (int j = 0; j < n; ++j) {
        v[j] = Rational(v[j] + rational_from_ll(rk) * xhat.at(k, j));
      }
    }
    const Rational scaled_bound =
        Rational(psi.eval_exact(r_height) / (Rational(n) * rx.cap));
    cert.p.components.resize(n);
    for (int j = 0; j < n; ++j) {
      const Integer pj = nearest_integer(v[j]);
      const Rational dist = rational_abs(Rational(v[j] - Rational(pj)));
      if (dist > scaled_bound) {
        std::ostringstream os;
        os << "nearest-integer distance at coordinate " << j
           << " exceeds psi(|r|)/(n*cap): " << format_rational(dist) << " > "
           << format_rational(scaled_bound);
        fail(errkind::lift_precondition, os.str());
      }
      cert.p.components[j] = integer_to_ll(pj);
    }
  } else {
    const MatD& xhat = rx.xhat_float;
    std::vector<double> v(n, 0.0);
    for (int k = 0; k < tail; ++k) {
      const long long rk = r.components[k];
      if (rk == 0) continue;
      for (int j = 0; j < n; ++j) {
        v[j] += static_cast<double>(rk) * xhat.at(k, j);
      }
    }
    const double scaled_bound =
        psi.eval(r_height) / (n * to_double(rx.cap));
    cert.p.components.resize(n);
    for (int j = 0; j < n; ++j) {
      const double pj = std::nearbyint(v[j]);
      const double dist = std::fabs(v[j] - pj);
      if (dist > scaled_bound) {
        std::ostringstream os;
        os << "nearest-integer distance at coordinate " << j
           << " exceeds psi(|r|)/(n*cap): " << dist << " > " << scaled_bound;
        fail(errkind::lift_precondition, os.str());
      }
      cert.p.components[j] = static_cast<long long>(pj);
    }
  }

  cert.q.components.resize(rx.m);
  for (int j = 0; j < n; ++j) cert.q.components[j] = -cert.p.components[j];
  for (int k = 0; k < tail; ++k) cert.q.components[n + k] = r.components[k];
  cert.q_height = cert.q.height();

  if (cert.exact) {
    cert.form_values_exact = eval_abs_forms_exact(cert.q, rx.X);
    cert.bound_exact = psi.eval_exact(r_height);
    cert.bound = to_double(*cert.bound_exact);
    const Rational q_bound = psi.eval_exact(cert.q_height);
    cert.holds_at_q_height = true;
    cert.form_values.reserve(n);
    for (const Rational& value : cert.form_values_exact) {
      if (value > *cert.bound_exact) {
        fail(errkind::internal,
             "lift produced a value above its certified bound");
      }
      if (!(value < q_bound)) cert.holds_at_q_height = false;
      cert.form_values.push_back(to_double(value));
    }
  } else {
    cert.form_values = eval_abs_forms(cert.q, rx.X);
    cert.bound = psi.eval(r_height);
    const double q_bound = psi.eval(cert.q_height);
    cert.holds_at_q_height = true;
    for (double value : cert.form_values) {
      if (!(value < q_bound)) cert.holds_at_q_height = false;
    }
  }
  return cert;
}

bool verify_certificate(const LiftCertificate& cert, const FormMatrix& X,
                        const ApproxFunction& psi) {
  const int m = X.m();
  const int n = X.n();
  if (static_cast<int>(cert.q.components.size()) != m) return false;
  if (static_cast<int>(cert.p.components.size()) != n) return false;
  if (static_cast<int>(cert.r.components.size()) != m - n) return false;
  for (int j = 0; j < n; ++j) {
    if (cert.q.components[j] != -cert.p.components[j]) return false;
  }
  for (int k = 0; k < m - n; ++k) {
    if (cert.q.components[n + k] != cert.r.components[k]) return false;
  }
  if (cert.r.is_zero() || cert.q.is_zero()) return false;
  if (cert.q_height != cert.q.height()) return false;

  const long long r_height = cert.r.height();
  if (X.is_exact() && psi.exact_capable()) {
    const std::vector<Rational> values = eval_abs_forms_exact(cert.q, X);
    const Rational bound = psi.eval_exact(r_height);
    const Rational q_bound = psi.eval_exact(cert.q_height);
    bool strict = true;
    for (const Rational& value : values) {
      if (value > bound) return false;
      if (!(value < q_bound)) strict = false;
    }
    return strict == cert.holds_at_q_height;
  }
  const std::vector<double> values = eval_abs_forms(cert.q, X);
  const double bound = psi.eval(r_height);
  const double q_bound = psi.eval(cert.q_height);
  bool strict = true;
  for (double value : values) {
    if (value > bound) return false;
    if (!(value < q_bound)) strict = false;
  }
  return strict == cert.holds_at_q_height;
}

MatQ eta_embed(const MatQ& Y, const MatQ& T, const Rational& epsilon,
               const Rational& cap) {
  check_parameters(epsilon, cap);
  if (T.rows() != T.cols()) {
    fail(errkind::dimension_mismatch, "top block must be square");
  }
  if (Y.cols() != T.rows()) {
    fail(errkind::dimension_mismatch,
         "column count of Y must match the top-block size");
  }
  const Rational det = determinant(T);
  check_top_membership_exact(T, det, epsilon, cap);
  return vstack(T, multiply(Y, T));
}

MatD eta_embed(const MatD& Y, const MatD& T, double epsilon, double cap) {
  if (!(epsilon > 0 && epsilon < 1)) {
    fail(errkind::invalid_argument, "epsilon must lie in (0, 1)");
  }
  if (!(cap > 0)) {
    fail(errkind::invalid_argument, "cap must be positive");
  }
  if (T.rows() != T.cols()) {
    fail(errkind::dimension_mismatch, "top block must be square");
  }
  if (Y.cols() != T.rows()) {
    fail(errkind::dimension_mismatch,
         "column count of Y must match the top-block size");
  }
  const double det = determinant(T);
  check_top_membership_float(T, det, epsilon, cap);
  return vstack(T, multiply(Y, T));
}

double eta_lipschitz_bound(int n, double cap) {
  return n * (cap + 1.0);
}

std::optional<DependenceWitness> column_dependence_witness(
    const FormMatrix& X, double tolerance) {
  const int m = X.m();
  const int n = X.n();
  if (m > n) {
    fail(errkind::regime,
         "dependence witness applies only when forms are at least as many as "
         "variables (m <= n)");
  }
  if (X.is_exact()) {
    const MatQ& entries = X.exact_entries();
    const std::size_t rk = rank(entries);
    if (rk == static_cast<std::size_t>(m)) return std::nullopt;
    std::optional<std::vector<Rational>> c = kernel_vector(entries);
    DependenceWitness w;
    w.rank = rk;
    w.coefficients_exact = *c;
    w.coefficients.reserve(c->size());
    for (const Rational& v : *c) w.coefficients.push_back(to_double(v));
    return w;
  }
  const MatD& entries = X.float_entries();
  // Row Gram matrix (m x m, the smaller side): eigenvalues are the squared
  // singular values of X, so the count above tolerance^2 is the numerical
  // rank.
  MatD row_gram(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += entries.at(i, k) * entries.at(j, k);
      row_gram.at(i, j) = acc;
    }
  }
  std::size_t rk = 0;
  for (double lambda : symmetric_eigenvalues(row_gram)) {
    if (lambda > tolerance * tolerance) ++rk;
  }
  if (rk == static_cast<std::size_t>(m)) return std::nullopt;
  // Coefficient vector: the column-Gram eigenvector of smallest eigenvalue,
  // sign-canonicalized (first significant entry positive).
  MatD col_gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < m; ++k) acc += entries.at(k, i) * entries.at(k, j);
      col_gram.at(i, j) = acc;
    }
  }
  std::pair<double, std::vector<double>> eig = smallest_eigenpair(col_gram);
  std::vector<double>& c = eig.second;
  for (double v : c) {
    if (std::fabs(v) > 1e-12) {
      if (v < 0) {
        for (double& w : c) w = -w;
      }
      break;
    }
  }
  DependenceWitness w;
  w.rank = rk;
  w.coefficients = std::move(c);
  return w;
}

}  // namespace smallforms
