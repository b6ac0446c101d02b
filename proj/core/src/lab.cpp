#include "smallforms/lab.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <thread>

#include "smallforms/errors.hpp"
#include "smallforms/forms_engine.hpp"
#include "smallforms/rng.hpp"
#include "smallforms/version.hpp"

namespace smallforms {

namespace {

constexpr double kZ95 = 1.959963984540054;

int clamp_jobs(int jobs, long long work_items) {
  int j = std::clamp(jobs, 1, 64);
  if (work_items < j) j = static_cast<int>(std::max<long long>(1, work_items));
  return j;
}

FractionEstimate wilson_interval(long long hits, long long samples) {
  FractionEstimate est;
  est.hits = hits;
  est.samples = samples;
  const double nr = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / nr;
  est.fraction = p;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / nr;
  const double centre = (p + z2 / (2.0 * nr)) / denom;
  const double half =
      kZ95 * std::sqrt(p * (1.0 - p) / nr + z2 / (4.0 * nr * nr)) / denom;
  est.ci_low = std::max(0.0, centre - half);
  est.ci_high = std::min(1.0, centre + half);
  return est;
}

FormMatrix sample_matrix(int m, int n, std::uint64_t seed,
                         std::uint64_t index) {
  SplitMix64 gen = substream(seed, index);
  MatD entries(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) entries.at(i, j) = gen.next_unit();
  }
  return FormMatrix::floating(std::move(entries));
}

double psi_coord(const ApproxFunction& psi, int i, long long r) {
  if (psi.family() == ApproxFamily::PerCoordinate) {
    return psi.eval_coord(static_cast<std::size_t>(i), r);
  }
  return psi.eval(r);
}

// Volume of {x in [0,1]^m : |sum_j q_j x_j| < width} by inclusion-exclusion
// over the simplex-slice distribution of sum a_j y_j with a_j = |q_j|.
double single_form_slab_volume(const std::vector<long long>& q, double width) {
  std::vector<double> a;
  double shift = 0.0;  // negative coefficients are flipped via x -> 1 - x
  for (long long qi : q) {
    if (qi == 0) continue;
    a.push_back(static_cast<double>(qi < 0 ? -qi : qi));
    if (qi < 0) shift += static_cast<double>(-qi);
  }
  if (a.empty()) {
    fail(errkind::invalid_argument, "slab volume needs a nonzero q");
  }
  const int d = static_cast<int>(a.size());
  if (d > 20) {
    fail(errkind::range, "slab volume supports at most 20 nonzero entries");
  }
  double dfact = 1.0;
  for (int i = 2; i <= d; ++i) dfact *= i;
  double aprod = 1.0;
  for (double ai : a) aprod *= ai;
  const auto cdf = [&](double t) {
    // Volume fraction of {y in [0,1]^d : sum a_j y_j <= t}.
    double acc = 0.0;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      double cut = t;
      int bits = 0;
      for (int j = 0; j < d; ++j) {
        if (mask & (1u << j)) {
          cut -= a[j];
          ++bits;
        }
      }
      if (cut <= 0.0) continue;
      acc += (bits % 2 == 0 ? 1.0 : -1.0) * std::pow(cut, d);
    }
    return acc / (dfact * aprod);
  };
  const double vol = cdf(shift + width) - cdf(shift - width);
  return std::clamp(vol, 0.0, 1.0);
}

// ---- box counting ----------------------------------------------------------

struct BoxGridWork {
  int m = 0;
  int n = 0;
  int G = 0;
  std::vector<long long> col_strides;  // flat strides within one column grid
  std::uint64_t col_cells = 0;         // G^m
};

void set_bit(std::vector<std::uint64_t>& bits, std::uint64_t i) {
  bits[i >> 6] |= (1ull << (i & 63));
}

// Marks the column-grid boxes meeting {x in I^m : |q.x| < width}; emits flat
// indices through `sink` (bitmap setter or list collector).
template <typename Sink>
void mark_single_form(const std::vector<long long>& q, double width,
                      const BoxGridWork& grid, Sink&& sink) {
  const int m = grid.m;
  const int G = grid.G;
  int pivot = -1;
  for (int i = m - 1; i >= 0; --i) {
    if (q[i] != 0) {
      pivot = i;
      break;
    }
  }
  if (pivot < 0) fail(errkind::invalid_argument, "q must be nonzero");
  double s_plus = 0.0, s_minus = 0.0;
  for (long long qi : q) {
    if (qi > 0) s_plus += static_cast<double>(qi);
    if (qi < 0) s_minus += static_cast<double>(qi);
  }
  // A box with corner index vector a meets the open slab iff the integer
  // t = sum q_i a_i satisfies  -width*G - s_plus < t < width*G - s_minus.
  const double upper = width * G - s_minus;
  const double lower = -width * G - s_plus;
  const double qp = static_cast<double>(q[pivot]);
  const long long pivot_stride = grid.col_strides[pivot];

  std::vector<int> idx(m, 0);
  for (;;) {
    long long t_rest = 0;
    long long base = 0;
    for (int i = 0; i < m; ++i) {
      if (i == pivot) continue;
      t_rest += q[i] * idx[i];
      base += idx[i] * grid.col_strides[i];
    }
    double lo_f, hi_f;
    if (qp > 0) {
      lo_f = (lower - t_rest) / qp;
      hi_f = (upper - t_rest) / qp;
    } else {
      lo_f = (upper - t_rest) / qp;
      hi_f = (lower - t_rest) / qp;
    }
    long long lo = static_cast<long long>(std::floor(lo_f)) + 1;
    long long hi = static_cast<long long>(std::ceil(hi_f)) - 1;
    lo = std::max<long long>(lo, 0);
    hi = std::min<long long>(hi, G - 1);
    for (long long a = lo; a <= hi; ++a) {
      sink(static_cast<std::uint64_t>(base + a * pivot_stride));
    }
    // Odometer over the non-pivot coordinates.
    int c = m - 1;
    for (; c >= 0; --c) {
      if (c == pivot) continue;
      if (++idx[c] < G) break;
      idx[c] = 0;
    }
    if (c < 0) break;
  }
}

void write_column_product(const std::vector<std::uint32_t>& marked, int n,
                          const std::uint64_t col_cells,
                          std::vector<std::uint64_t>& bits) {
  // All n columns share the same marked set; write every tuple.
  std::vector<std::size_t> pos(n, 0);
  for (;;) {
    std::uint64_t flat = 0;
    for (int c = 0; c < n; ++c) flat = flat * col_cells + marked[pos[c]];
    set_bit(bits, flat);
    int c = n - 1;
    while (c >= 0 && ++pos[c] == marked.size()) pos[c--] = 0;
    if (c < 0) break;
  }
}

std::vector<std::vector<long long>> canonical_heights(int m, long long q_lo,
                                                      long long q_hi) {
  std::vector<std::vector<long long>> out;
  std::vector<long long> q(m, -q_hi);
  for (;;) {
    long long height = 0;
    int lead = 0;
    for (long long qi : q) {
      height = std::max(height, qi < 0 ? -qi : qi);
      if (lead == 0 && qi != 0) lead = qi > 0 ? 1 : -1;
    }
    if (height >= q_lo && height <= q_hi && lead > 0) out.push_back(q);
    int c = m - 1;
    while (c >= 0 && ++q[c] > q_hi) q[c--] = -q_hi;
    if (c < 0) break;
  }
  return out;
}

long long count_bits(const std::vector<std::uint64_t>& bits) {
  long long total = 0;
  for (std::uint64_t w : bits) total += std::popcount(w);
  return total;
}

}  // namespace

const char* lab_mode_name(LabMode m) {
  switch (m) {
    case LabMode::MeasureTrend:
      return "measure-trend";
    case LabMode::DimensionBoxCount:
      return "dimension-box-count";
  }
  fail(errkind::internal, "unhandled lab mode");
}

LabMode lab_mode_from_name(const std::string& name) {
  if (name == "measure-trend") return LabMode::MeasureTrend;
  if (name == "dimension-box-count") return LabMode::DimensionBoxCount;
  fail(errkind::parse, "unknown lab mode: " + name);
}

const char* agreement_name(Agreement a) {
  switch (a) {
    case Agreement::Consistent:
      return "consistent";
    case Agreement::Inconsistent:
      return "inconsistent";
    case Agreement::NotApplicable:
      return "not-applicable";
  }
  fail(errkind::internal, "unhandled agreement value");
}

FractionEstimate estimate_hit_fraction(const ProblemSpec& spec,
                                       const HeightWindow& window,
                                       long long samples, std::uint64_t seed,
                                       int jobs,
                                       unsigned long long budget) {
  const Regime regime = classify_regime(spec);
  if (regime != Regime::Generic && regime != Regime::Classical) {
    fail(errkind::regime,
         std::string("measure estimation requires the Generic or Classical "
                     "regime, not ") +
             regime_name(regime));
  }
  if (samples < 1) {
    fail(errkind::invalid_argument, "samples must be at least 1");
  }
  const double estimate = estimate_scan_cost(spec.m, spec.n, window);
  if (estimate > static_cast<double>(budget)) {
    std::ostringstream os;
    os << "window scan estimate " << estimate
       << " candidate evaluations exceeds the budget " << budget;
    fail(errkind::budget_exceeded, os.str());
  }

  EngineOptions options;
  options.budget = budget;
  options.jobs = 1;  // parallelism is across samples, not within a scan

  const int workers = clamp_jobs(jobs, samples);
  std::vector<long long> hits_per_worker(workers, 0);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      long long local = 0;
      for (long long i = w; i < samples; i += workers) {
        const FormMatrix X = sample_matrix(
            spec.m, spec.n, seed, static_cast<std::uint64_t>(i));
        if (has_solution(spec, X, window, options)) ++local;
      }
      hits_per_worker[w] = local;
    });
  }
  for (std::thread& t : pool) t.join();
  long long hits = 0;
  for (long long h : hits_per_worker) hits += h;
  return wilson_interval(hits, samples);
}

RunRecord zero_one_verdict(const ExperimentPlan& plan) {
  if (plan.mode != LabMode::MeasureTrend) {
    fail(errkind::invalid_argument,
         "zero-one verdicts require a measure-trend plan");
  }
  if (plan.windows.empty()) {
    fail(errkind::invalid_argument, "plan has no height windows");
  }
  for (std::size_t i = 1; i < plan.windows.size(); ++i) {
    if (plan.windows[i].q_max <= plan.windows[i - 1].q_max) {
      fail(errkind::invalid_argument,
           "window schedule must have strictly increasing q_max");
    }
  }
  if (plan.samples < 1) {
    fail(errkind::invalid_argument, "samples must be at least 1");
  }

  const auto t0 = std::chrono::steady_clock::now();
  RunRecord record{plan,
                   {},
                   CriterionKind::AbsoluteLebesgue,
                   SeriesClass::Unknown,
                   Agreement::NotApplicable,
                   0.0,
                   engine_version_string()};

  CriterionKind kind = CriterionKind::ClassicalLebesgue;
  if (plan.spec.variant == Variant::Absolute) {
    kind = plan.spec.psi.family() == ApproxFamily::PerCoordinate
               ? CriterionKind::AbsoluteRates
               : CriterionKind::AbsoluteLebesgue;
  }
  record.predicted_kind = kind;
  record.predicted =
      classify(CriterionSeries(kind, plan.spec.m, plan.spec.n, plan.spec.psi))
          .classification;

  for (const HeightWindow& window : plan.windows) {
    record.windows.push_back(WindowResult{
        window, estimate_hit_fraction(plan.spec, window, plan.samples,
                                      plan.seed, plan.jobs, plan.budget)});
  }

  if (record.predicted == SeriesClass::Divergent) {
    bool monotone = true;
    for (std::size_t i = 1; i < record.windows.size(); ++i) {
      if (record.windows[i].estimate.fraction <
          record.windows[i - 1].estimate.fraction) {
        monotone = false;
      }
    }
    const bool high =
        record.windows.back().estimate.fraction >= plan.agree_high;
    record.agreement = (monotone && high) ? Agreement::Consistent
                                          : Agreement::Inconsistent;
  } else if (record.predicted == SeriesClass::Convergent) {
    record.agreement =
        record.windows.back().estimate.fraction <= plan.agree_low
            ? Agreement::Consistent
            : Agreement::Inconsistent;
  } else {
    record.agreement = Agreement::NotApplicable;
  }

  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return record;
}

double first_moment_bound(const ProblemSpec& spec, const HeightWindow& window) {
  double total = 0.0;
  for (long long r = window.q_min; r <= window.q_max; ++r) {
    double widths = 1.0;
    for (int i = 0; i < spec.n; ++i) {
      widths *= std::min(1.0, 2.0 * psi_coord(spec.psi, i, r));
    }
    total += canonical_shell_size(spec.m, r) * widths;
  }
  return total;
}

double slab_volume(const IntegerVector& q, const std::vector<double>& widths) {
  if (widths.empty()) {
    fail(errkind::invalid_argument, "at least one form width is required");
  }
  double vol = 1.0;
  for (double w : widths) {
    if (!(w > 0)) return 0.0;
    vol *= single_form_slab_volume(q.components, w);
  }
  return vol;
}

BoxCountResult box_count_dimension(const BoxCountPlan& plan) {
  const ProblemSpec& spec = plan.spec;
  if (classify_regime(spec) != Regime::Generic) {
    fail(errkind::regime,
         "box counting requires the generic regime (absolute variant, m > n, "
         "m + n > 3)");
  }
  if (spec.psi.family() != ApproxFamily::PowerLog || spec.psi.kappa() != 0.0) {
    fail(errkind::invalid_argument,
         "box counting requires a pure power psi(r) = c * r^(-tau)");
  }
  const double tau = spec.psi.tau();
  const CriticalExponent critical = critical_exponent(
      CriterionKind::AbsoluteHausdorff, spec.m, spec.n, tau);
  if (!critical.within_ambient) {
    fail(errkind::invalid_argument,
         "tau is too small: the critical exponent exceeds the ambient "
         "dimension m*n; the slope target needs tau >= (m-n)/n");
  }
  if (plan.delta_exponents.size() < 3) {
    fail(errkind::invalid_argument,
         "at least three grid scales are required for a slope estimate");
  }
  for (std::size_t i = 1; i < plan.delta_exponents.size(); ++i) {
    if (plan.delta_exponents[i] <= plan.delta_exponents[i - 1]) {
      fail(errkind::invalid_argument,
           "grid-scale exponents must be strictly increasing");
    }
  }
  if (plan.delta_exponents.front() < 1 || plan.delta_exponents.back() > 26) {
    fail(errkind::invalid_argument, "grid-scale exponents must lie in [1, 26]");
  }
  if (!(plan.q_lo_coeff > 0.0) || !(plan.q_span >= 1.0)) {
    fail(errkind::invalid_argument,
         "window coefficients need q_lo_coeff > 0 and q_span >= 1");
  }

  BoxCountResult result;
  result.s_star = critical.s_star;

  for (int k : plan.delta_exponents) {
    const int G = 1 << k;
    const int mn = spec.m * spec.n;
    if (static_cast<long long>(mn) * k > 27) {
      fail(errkind::budget_exceeded,
           "grid has more than 2^27 boxes; lower the grid-scale exponents or "
           "the dimensions");
    }
    const double delta = std::ldexp(1.0, -k);
    const long long q_lo = std::max<long long>(
        2, std::llround(plan.q_lo_coeff * std::pow(delta, -1.0 / (tau + 1.0))));
    const long long q_hi = std::max(
        q_lo, static_cast<long long>(std::llround(plan.q_span * q_lo)));

    const std::vector<std::vector<long long>> qs =
        canonical_heights(spec.m, q_lo, q_hi);
    const double per_q_cost = std::pow(static_cast<double>(G), spec.m - 1);
    if (static_cast<double>(qs.size()) * per_q_cost * spec.n >
        static_cast<double>(plan.budget)) {
      std::ostringstream os;
      os << "box marking estimate "
         << static_cast<double>(qs.size()) * per_q_cost * spec.n
         << " exceeds the budget " << plan.budget;
      fail(errkind::budget_exceeded, os.str());
    }

    BoxGridWork grid;
    grid.m = spec.m;
    grid.n = spec.n;
    grid.G = G;
    grid.col_strides.resize(spec.m);
    long long stride = 1;
    for (int i = spec.m - 1; i >= 0; --i) {
      grid.col_strides[i] = stride;
      stride *= G;
    }
    grid.col_cells = static_cast<std::uint64_t>(stride);

    std::uint64_t total_cells = 1;
    for (int c = 0; c < spec.n; ++c) total_cells *= grid.col_cells;
    const std::size_t words = static_cast<std::size_t>((total_cells + 63) / 64);

    const int workers = clamp_jobs(plan.jobs,
                                   static_cast<long long>(qs.size()));
    std::vector<std::vector<std::uint64_t>> bitmaps(
        workers, std::vector<std::uint64_t>(words, 0));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        std::vector<std::uint64_t>& bits = bitmaps[w];
        for (std::size_t qi = w; qi < qs.size(); qi += workers) {
          const std::vector<long long>& q = qs[qi];
          long long height = 0;
          for (long long c : q) height = std::max(height, c < 0 ? -c : c);
          const double width = spec.psi.eval(height);
          if (spec.n == 1) {
            mark_single_form(q, width, grid,
                             [&bits](std::uint64_t i) { set_bit(bits, i); });
          } else {
            std::vector<std::uint32_t> marked;
            mark_single_form(q, width, grid, [&marked](std::uint64_t i) {
              marked.push_back(static_cast<std::uint32_t>(i));
            });
            if (!marked.empty()) {
              write_column_product(marked, spec.n, grid.col_cells, bits);
            }
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (int w = 1; w < workers; ++w) {
      for (std::size_t i = 0; i < words; ++i) bitmaps[0][i] |= bitmaps[w][i];
    }

    BoxCountPoint point;
    point.k = k;
    point.delta = delta;
    point.q_min = q_lo;
    point.q_max = q_hi;
    point.box_count = count_bits(bitmaps[0]);
    result.points.push_back(point);
  }

  // Least-squares fit of log N against log(1/delta).
  const std::size_t count = result.points.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const BoxCountPoint& point : result.points) {
    if (point.box_count <= 0) {
      fail(errkind::internal, "empty box count; the slab union missed the grid");
    }
    const double x = point.k * M_LN2;
    const double y = std::log(static_cast<double>(point.box_count));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = count * sxx - sx * sx;
  result.slope = (count * sxy - sx * sy) / denom;
  result.intercept = (sy - result.slope * sx) / count;
  for (const BoxCountPoint& point : result.points) {
    const double x = point.k * M_LN2;
    const double y = std::log(static_cast<double>(point.box_count));
    result.residuals.push_back(y - (result.slope * x + result.intercept));
  }
  return result;
}

}  // namespace smallforms
