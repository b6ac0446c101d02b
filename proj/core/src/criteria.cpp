#include "smallforms/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <sstream>

#include "smallforms/errors.hpp"

namespace smallforms {

namespace {

// Upper bound on the search for the first index where Psi(r) < 1; beyond
// this the coefficient is too extreme for meaningful partial sums.
constexpr long long kStartSearchCap = 1'000'000;

constexpr long long kCutoffTerms[] = {1'000, 10'000, 100'000};

bool requires_f(CriterionKind k) {
  return k == CriterionKind::AbsoluteHausdorff ||
         k == CriterionKind::ClassicalHausdorff;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

SeriesClass classify_exponents(double e, double k) {
  if (e < -1.0) return SeriesClass::Convergent;
  if (e > -1.0) return SeriesClass::Divergent;
  if (k < -1.0) return SeriesClass::Convergent;
  if (k > -1.0) return SeriesClass::Divergent;
  return SeriesClass::Boundary;
}

// Largest index the approximating function can be evaluated at.
long long max_eval_index(const ApproxFunction& psi) {
  switch (psi.family()) {
    case ApproxFamily::Table:
      return static_cast<long long>(psi.table_values().size());
    case ApproxFamily::PerCoordinate: {
      long long bound = LLONG_MAX / 4;
      for (const ApproxFunction& part : psi.coordinates()) {
        bound = std::min(bound, max_eval_index(part));
      }
      return bound;
    }
    default:
      return LLONG_MAX / 4;
  }
}

// First index from which Psi(r) = psi(r)/r stays strictly below 1, needed
// before log-weighted dimension functions can be applied to Psi(r).
long long scaled_below_one_start(const ApproxFunction& psi) {
  if (psi.family() == ApproxFamily::Table) {
    const long long rmax = max_eval_index(psi);
    long long start = 1;
    for (long long r = rmax; r >= 1; --r) {
      if (psi.eval_scaled(r) >= 1.0) {
        start = r + 1;
        break;
      }
    }
    return start;  // rmax + 1 means no usable terms
  }
  // Power-log: Psi is non-increasing from r_mono on, so the first dip below
  // 1 at or after r_mono is permanent.
  long long r_mono = 1;
  if (psi.kappa() < 0.0) {
    r_mono = std::max<long long>(
        1, llround(std::ceil(std::exp(-psi.kappa() / (psi.tau() + 1.0)))));
  }
  for (long long r = r_mono; r <= kStartSearchCap; ++r) {
    if (psi.eval_scaled(r) < 1.0) return r;
  }
  fail(errkind::domain,
       "psi(r)/r does not drop below 1 within the first 1000000 indices; "
       "log-weighted dimension functions cannot be applied");
}

double product_psi(const ApproxFunction& psi, int n, long long r) {
  if (psi.family() == ApproxFamily::PerCoordinate) {
    double p = 1.0;
    for (std::size_t i = 0; i < psi.coordinate_count(); ++i) {
      p *= psi.eval_coord(i, r);
    }
    return p;
  }
  return std::pow(psi.eval(r), static_cast<double>(n));
}

struct TermExponents {
  double e = 0.0;
  double k = 0.0;
};

// Asymptotic exponents of the term as r^e (log r)^k; absent for tables.
std::optional<TermExponents> term_exponents(const CriterionSeries& s) {
  const double m = s.m;
  const double n = s.n;
  if (s.psi.family() == ApproxFamily::Table) return std::nullopt;
  if (s.psi.family() == ApproxFamily::PerCoordinate) {
    double tau_sum = 0.0;
    double kappa_sum = 0.0;
    for (const ApproxFunction& part : s.psi.coordinates()) {
      if (part.family() != ApproxFamily::PowerLog) return std::nullopt;
      tau_sum += part.tau();
      kappa_sum += part.kappa();
    }
    return TermExponents{(m - n - 1.0) - tau_sum, -kappa_sum};
  }
  const double tau = s.psi.tau();
  const double kap = s.psi.kappa();
  switch (s.kind) {
    case CriterionKind::ClassicalLebesgue:
      return TermExponents{(m - 1.0) - n * tau, -n * kap};
    case CriterionKind::AbsoluteLebesgue:
      return TermExponents{(m - n - 1.0) - n * tau, -n * kap};
    case CriterionKind::AbsoluteLebesgueWide:
      return TermExponents{-(m - 1.0) * tau, -(m - 1.0) * kap};
    case CriterionKind::AbsoluteHausdorff: {
      const double bal = (m - 1.0) * n - s.f->s();
      return TermExponents{(tau + 1.0) * bal + (m - 1.0),
                           kap * bal - s.f->kappa()};
    }
    case CriterionKind::ClassicalHausdorff: {
      const double bal = (m - 1.0) * n - s.f->s();
      return TermExponents{(tau + 1.0) * bal + (m + n - 1.0),
                           kap * bal - s.f->kappa()};
    }
    case CriterionKind::AbsoluteRates:
      return TermExponents{(m - n - 1.0) - n * tau, -n * kap};
  }
  fail(errkind::internal, "unhandled criterion kind");
}

HypothesisCheck shape_check(std::string name, bool ok, std::string detail) {
  return HypothesisCheck{std::move(name), ok, std::move(detail)};
}

HypothesisCheck scaled_dim_check(const DimensionFunction& f, double k,
                                 const std::string& label) {
  const bool ok = f.scaled_is_dimension_function(k);
  std::ostringstream os;
  os << "scaled power s - k = " << f.scaled_s(k);
  if (!ok) os << "; needs s - k > 0, or s - k = 0 with a positive log weight";
  return HypothesisCheck{label + " is a dimension function", ok, os.str()};
}

HypothesisCheck monotone_check(const std::string& label) {
  return HypothesisCheck{label + " is monotonic near zero", true,
                         "every power-log scaling is eventually monotone"};
}

HypothesisCheck psi_monotone_check(const ApproxFunction& psi,
                                   const std::string& detail_suffix) {
  std::string detail;
  if (psi.family() == ApproxFamily::Table) {
    detail = "table values are non-increasing beyond the cut index";
  } else if (psi.kappa() < 0.0) {
    detail = "eventually non-increasing (positive log factor is dominated)";
  } else {
    detail = "power-log approximating functions are non-increasing";
  }
  if (!detail_suffix.empty()) detail += "; " + detail_suffix;
  return HypothesisCheck{"psi is non-increasing", true, std::move(detail)};
}

void add_hypotheses(const CriterionSeries& s, SeriesVerdict& v) {
  const int m = s.m;
  const int n = s.n;
  std::ostringstream shape;
  shape << "m = " << m << ", n = " << n;
  const std::string dims = shape.str();
  switch (s.kind) {
    case CriterionKind::ClassicalLebesgue:
      v.hypotheses.push_back(psi_monotone_check(
          s.psi,
          "needed only for the divergence half, and removable unless m = n = 1"));
      break;
    case CriterionKind::AbsoluteLebesgue:
    case CriterionKind::AbsoluteRates:
      v.hypotheses.push_back(
          shape_check("more variables than forms (m > n)", m > n, dims));
      v.hypotheses.push_back(
          shape_check("combined dimension above three (m + n > 3)", m + n > 3,
                      dims));
      break;
    case CriterionKind::AbsoluteLebesgueWide:
      v.hypotheses.push_back(
          shape_check("wide shape (2 < m <= n)", m > 2 && m <= n, dims));
      break;
    case CriterionKind::AbsoluteHausdorff: {
      const DimensionFunction& f = *s.f;
      if (m > n) {
        v.hypotheses.push_back(
            shape_check("combined dimension above three (m + n > 3)",
                        m + n > 3, dims));
        v.hypotheses.push_back(
            scaled_dim_check(f, double(n) * n, "r^(-n^2) f(r)"));
        v.hypotheses.push_back(scaled_dim_check(
            f, double(m - n - 1) * n, "r^(-(m-n-1)n) f(r)"));
        v.hypotheses.push_back(monotone_check("r^(-mn) f(r)"));
      } else if (m > 2) {
        v.hypotheses.push_back(
            scaled_dim_check(f, double(n) * n, "r^(-n^2) f(r)"));
        v.hypotheses.push_back(scaled_dim_check(
            f, double(m - n - 1) * n, "r^(-(m-n-1)n) f(r)"));
        v.hypotheses.push_back(scaled_dim_check(
            f, double(n - m + 1) * (m - 1), "r^(-(n-m+1)(m-1)) f(r)"));
        v.hypotheses.push_back(monotone_check("r^(-(m-1)(n+1)) f(r)"));
      } else {
        v.hypotheses.push_back(shape_check(
            "shape covered (m > n with m + n > 3, or 2 < m <= n)", false,
            dims));
      }
      break;
    }
    case CriterionKind::ClassicalHausdorff: {
      const DimensionFunction& f = *s.f;
      v.hypotheses.push_back(shape_check(
          "combined dimension above two (m + n > 2)", m + n > 2, dims));
      v.hypotheses.push_back(
          scaled_dim_check(f, double(m - 1) * n, "r^(-(m-1)n) f(r)"));
      v.hypotheses.push_back(monotone_check("r^(-mn) f(r)"));
      break;
    }
  }
}

void add_measure_cases(const CriterionSeries& s, SeriesVerdict& v) {
  switch (s.kind) {
    case CriterionKind::ClassicalLebesgue:
    case CriterionKind::AbsoluteLebesgue:
    case CriterionKind::AbsoluteRates:
      v.zero_case = "Lebesgue measure zero";
      v.full_case = "full Lebesgue measure";
      break;
    case CriterionKind::AbsoluteLebesgueWide:
      v.zero_case =
          "measure zero on the carrier hypersurface of dimension (m-1)(n+1)";
      v.full_case = "positive finite measure on the carrier hypersurface";
      break;
    case CriterionKind::ClassicalHausdorff:
      v.zero_case = "Hausdorff f-measure zero";
      v.full_case = "Hausdorff f-measure equal to that of the ambient cube";
      break;
    case CriterionKind::AbsoluteHausdorff:
      v.zero_case = "Hausdorff f-measure zero";
      if (s.m > s.n) {
        v.full_case = "Hausdorff f-measure equal to that of the ambient cube";
      } else if (s.f->scaled_limit(double(s.m - 1) * (s.n + 1)) ==
                 LimitBehavior::Infinity) {
        v.full_case = "infinite Hausdorff f-measure";
      } else {
        v.full_case = "positive finite Hausdorff f-measure";
      }
      break;
  }
}

std::string formula_for(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::ClassicalLebesgue:
      return "r^(m-1) * psi(r)^n";
    case CriterionKind::AbsoluteHausdorff:
      return "f(Psi(r)) * Psi(r)^(-(m-1)n) * r^(m-1)";
    case CriterionKind::AbsoluteLebesgue:
      return "psi(r)^n * r^(m-n-1)";
    case CriterionKind::AbsoluteLebesgueWide:
      return "psi(r)^(m-1)";
    case CriterionKind::ClassicalHausdorff:
      return "f(Psi(r)) * Psi(r)^(-(m-1)n) * r^(m+n-1)";
    case CriterionKind::AbsoluteRates:
      return "psi_1(r) * ... * psi_n(r) * r^(m-n-1)";
  }
  fail(errkind::internal, "unhandled criterion kind");
}

// Shared partial-sum accumulation over a term function defined from `start`.
template <typename TermFn>
void accumulate_partial_sums(SeriesVerdict& v, long long start, long long rmax,
                             TermFn&& term) {
  v.partial_sum_start = start;
  double acc = 0.0;
  long long r = start;
  for (long long terms : kCutoffTerms) {
    const long long upto = std::min(start - 1 + terms, rmax);
    for (; r <= upto; ++r) acc += term(r);
    if (upto < start) continue;  // table exhausted before the first cut-off
    if (!v.partial_sums.empty() && v.partial_sums.back().upto == upto) continue;
    v.partial_sums.push_back(PartialSum{upto, acc});
  }
}

}  // namespace

const char* criterion_kind_name(CriterionKind k) {
  switch (k) {
    case CriterionKind::ClassicalLebesgue:
      return "classical-lebesgue";
    case CriterionKind::AbsoluteHausdorff:
      return "absolute-hausdorff";
    case CriterionKind::AbsoluteLebesgue:
      return "absolute-lebesgue";
    case CriterionKind::AbsoluteLebesgueWide:
      return "absolute-lebesgue-wide";
    case CriterionKind::ClassicalHausdorff:
      return "classical-hausdorff";
    case CriterionKind::AbsoluteRates:
      return "absolute-rates";
  }
  fail(errkind::internal, "unhandled criterion kind");
}

CriterionKind criterion_kind_from_name(const std::string& name) {
  const std::string t = lowercase(name);
  if (t == "classical-lebesgue" || t == "kg") {
    return CriterionKind::ClassicalLebesgue;
  }
  if (t == "absolute-hausdorff" || t == "thm1" || t == "thm2") {
    return CriterionKind::AbsoluteHausdorff;
  }
  if (t == "absolute-lebesgue" || t == "cor1") {
    return CriterionKind::AbsoluteLebesgue;
  }
  if (t == "absolute-lebesgue-wide" || t == "cor2") {
    return CriterionKind::AbsoluteLebesgueWide;
  }
  if (t == "classical-hausdorff" || t == "thm3") {
    return CriterionKind::ClassicalHausdorff;
  }
  if (t == "absolute-rates" || t == "rates") {
    return CriterionKind::AbsoluteRates;
  }
  fail(errkind::parse, "unknown criterion kind: " + name);
}

const char* series_class_name(SeriesClass c) {
  switch (c) {
    case SeriesClass::Convergent:
      return "Convergent";
    case SeriesClass::Divergent:
      return "Divergent";
    case SeriesClass::Boundary:
      return "Boundary";
    case SeriesClass::Unknown:
      return "Unknown";
  }
  fail(errkind::internal, "unhandled series class");
}

bool SeriesVerdict::hypotheses_ok() const {
  return std::all_of(hypotheses.begin(), hypotheses.end(),
                     [](const HypothesisCheck& h) { return h.satisfied; });
}

CriterionSeries::CriterionSeries(CriterionKind kind_in, int m_in, int n_in,
                                 ApproxFunction psi_in,
                                 std::optional<DimensionFunction> f_in)
    : kind(kind_in), m(m_in), n(n_in), psi(std::move(psi_in)),
      f(std::move(f_in)) {
  if (m < 1 || n < 1) {
    fail(errkind::invalid_argument, "m and n must be at least 1");
  }
  if (requires_f(kind) && !f) {
    fail(errkind::invalid_argument,
         std::string(criterion_kind_name(kind)) +
             " requires a dimension function");
  }
  if (!requires_f(kind) && f) {
    fail(errkind::invalid_argument,
         std::string(criterion_kind_name(kind)) +
             " does not take a dimension function");
  }
  if (psi.family() == ApproxFamily::PerCoordinate) {
    if (kind != CriterionKind::AbsoluteRates) {
      fail(errkind::invalid_argument,
           "per-coordinate approximating functions are only accepted by the "
           "per-form rates criterion");
    }
    if (static_cast<long long>(psi.coordinate_count()) != n) {
      fail(errkind::dimension_mismatch,
           "per-coordinate psi must supply exactly n functions");
    }
  }
}

double series_term(const CriterionSeries& s, long long r) {
  if (r < 1) fail(errkind::range, "series index must be at least 1");
  const double m = s.m;
  const double n = s.n;
  const double rd = static_cast<double>(r);
  switch (s.kind) {
    case CriterionKind::ClassicalLebesgue:
      return std::pow(rd, m - 1.0) * std::pow(s.psi.eval(r), n);
    case CriterionKind::AbsoluteLebesgue:
      return std::pow(s.psi.eval(r), n) * std::pow(rd, m - n - 1.0);
    case CriterionKind::AbsoluteLebesgueWide:
      return std::pow(s.psi.eval(r), m - 1.0);
    case CriterionKind::AbsoluteHausdorff: {
      const double scaled = s.psi.eval_scaled(r);
      return s.f->eval(scaled) * std::pow(scaled, -(m - 1.0) * n) *
             std::pow(rd, m - 1.0);
    }
    case CriterionKind::ClassicalHausdorff: {
      const double scaled = s.psi.eval_scaled(r);
      return s.f->eval(scaled) * std::pow(scaled, -(m - 1.0) * n) *
             std::pow(rd, m + n - 1.0);
    }
    case CriterionKind::AbsoluteRates:
      return product_psi(s.psi, s.n, r) * std::pow(rd, m - n - 1.0);
  }
  fail(errkind::internal, "unhandled criterion kind");
}

SeriesVerdict classify(const CriterionSeries& s) {
  SeriesVerdict v;
  v.term_formula = formula_for(s.kind);
  const std::optional<TermExponents> exps = term_exponents(s);
  if (exps) {
    v.power_exponent = exps->e;
    v.log_exponent = exps->k;
    v.classification = classify_exponents(exps->e, exps->k);
  } else {
    v.classification = SeriesClass::Unknown;
  }
  const bool needs_unit_range = requires_f(s.kind) && s.f->kappa() != 0.0;
  const long long start = needs_unit_range ? scaled_below_one_start(s.psi) : 1;
  accumulate_partial_sums(v, start, max_eval_index(s.psi),
                          [&s](long long r) { return series_term(s, r); });
  add_hypotheses(s, v);
  add_measure_cases(s, v);
  return v;
}

CriticalExponent critical_exponent(CriterionKind kind, int m, int n,
                                   double tau) {
  if (m < 1 || n < 1) {
    fail(errkind::invalid_argument, "m and n must be at least 1");
  }
  if (!(tau > 0.0)) {
    fail(errkind::invalid_argument, "tau must be positive");
  }
  double s_star = 0.0;
  if (kind == CriterionKind::AbsoluteHausdorff) {
    if (m <= n) {
      fail(errkind::regime,
           "critical exponent requires more variables than forms (m > n)");
    }
    if (m + n <= 3) {
      fail(errkind::regime,
           "critical exponent requires combined dimension above three "
           "(m + n > 3)");
    }
    s_star = double(m - 1) * n + m / (tau + 1.0);
  } else if (kind == CriterionKind::ClassicalHausdorff) {
    s_star = double(m - 1) * n + (m + n) / (tau + 1.0);
  } else {
    fail(errkind::invalid_argument,
         std::string(criterion_kind_name(kind)) +
             " has no critical exponent; only the Hausdorff criteria do");
  }
  CriticalExponent out;
  out.s_star = s_star;
  out.ambient = double(m) * n;
  out.within_ambient = s_star <= out.ambient;
  return out;
}

SeriesVerdict g_series(int m, int n, const ApproxFunction& psi,
                       const DimensionFunction& f) {
  if (m < 1 || n < 1) {
    fail(errkind::invalid_argument, "m and n must be at least 1");
  }
  if (psi.family() == ApproxFamily::PerCoordinate) {
    fail(errkind::invalid_argument,
         "per-coordinate approximating functions have no reformulated series");
  }
  const double n2 = double(n) * n;
  const DimensionFunction g = f.scaled(n2, "r^(-n^2) f(r)");
  const double shift = double(m - n - 1) * n;

  SeriesVerdict v;
  v.term_formula =
      "g(Psi(r)) * Psi(r)^(-(m-n-1)n) * r^(m-1), with g(r) = r^(-n^2) f(r)";
  if (psi.family() == ApproxFamily::PowerLog) {
    const double bal = shift - g.s();
    const double e = (psi.tau() + 1.0) * bal + (m - 1);
    const double k = psi.kappa() * bal - g.kappa();
    v.power_exponent = e;
    v.log_exponent = k;
    v.classification = classify_exponents(e, k);
  } else {
    v.classification = SeriesClass::Unknown;
  }

  const long long start =
      g.kappa() != 0.0 ? scaled_below_one_start(psi) : 1;
  const double md = m;
  accumulate_partial_sums(
      v, start, max_eval_index(psi), [&](long long r) {
        const double scaled = psi.eval_scaled(r);
        return g.eval(scaled) * std::pow(scaled, -shift) *
               std::pow(static_cast<double>(r), md - 1.0);
      });

  std::ostringstream detail;
  detail << "scaled power s - n^2 = " << g.s();
  v.hypotheses.push_back(HypothesisCheck{
      "r^(-n^2) f(r) is a dimension function", true, detail.str()});
  v.zero_case = "Hausdorff f-measure zero";
  v.full_case = m > n
                    ? "Hausdorff f-measure equal to that of the ambient cube"
                    : "positive or infinite Hausdorff f-measure";
  return v;
}

}  // namespace smallforms
