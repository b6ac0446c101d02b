#include "smallforms/forms_engine.hpp"

#include <atomic>
#include <cmath>
#include <cstddef>
#include <string>
#include <thread>
#include <utility>

#include "smallforms/errors.hpp"

namespace smallforms {

namespace {

void check_dims(const ProblemSpec& spec, const FormMatrix& X) {
  if (spec.m != X.m() || spec.n != X.n()) {
    fail(errkind::dimension_mismatch,
         "problem is " + std::to_string(spec.m) + "x" + std::to_string(spec.n) +
             " but matrix is " + std::to_string(X.m()) + "x" + std::to_string(X.n()));
  }
}

void check_vector_length(const IntegerVector& q, int expected, const char* what) {
  if (q.components.size() != static_cast<std::size_t>(expected)) {
    fail(errkind::dimension_mismatch,
         std::string(what) + " has length " + std::to_string(q.components.size()) +
             " but the matrix has " + std::to_string(expected) + " rows");
  }
}

double dist_to_nearest(double v, double* nearest) {
  double p = std::nearbyint(v);
  if (nearest) *nearest = p;
  return std::fabs(v - p);
}

// ---------------------------------------------------------------------------
// Shell scanner.
//
// Visits every sign-canonical integer vector of sup-norm height exactly r in
// lexicographic order: coordinates are chosen left to right, a prefix of
// zeros forces the next chosen coordinate to be non-negative (first nonzero
// coordinate positive), and the final coordinate is restricted to +-r
// whenever no earlier coordinate attained the height.  Partial form sums are
// maintained per prefix, so each candidate costs one multiply-add per form.
// ---------------------------------------------------------------------------

struct ScanLimits {
  bool collect_records = false;
  bool stop_at_first = false;
  std::atomic<bool>* external_stop = nullptr;
};

struct ShellOutcome {
  long long count = 0;
  unsigned long long scanned = 0;
  unsigned long long uncertain = 0;
  std::vector<SolutionRecord> records;
};

class FloatShellScan {
 public:
  FloatShellScan(const FormMatrix& X, const ProblemSpec& spec, const EngineOptions& options,
                 const ScanLimits& limits)
      : m_(spec.m),
        n_(spec.n),
        classical_(spec.variant == Variant::Classical),
        inclusive_(options.inclusive),
        guard_(options.float_guard),
        limits_(limits),
        x_(static_cast<std::size_t>(spec.m) * spec.n),
        sums_(static_cast<std::size_t>(spec.m) * spec.n, 0.0),
        q_(spec.m, 0),
        bounds_(spec.n, 0.0) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) {
        x_[static_cast<std::size_t>(i) * n_ + j] = X.entry_double(i, j);
      }
    }
  }

  ShellOutcome scan(long long r, const ProblemSpec& spec) {
    out_ = ShellOutcome{};
    r_ = r;
    stop_ = false;
    for (int j = 0; j < n_; ++j) bounds_[j] = spec.psi.eval_coord(j, r);
    descend(0, false, true);
    return std::move(out_);
  }

 private:
  void descend(int level, bool any_max, bool all_zero) {
    if (stop_ || (limits_.external_stop &&
                  limits_.external_stop->load(std::memory_order_relaxed))) {
      stop_ = true;
      return;
    }
    if (level == m_ - 1) {
      leaf(level, any_max, all_zero);
      return;
    }
    const double* row = &x_[static_cast<std::size_t>(level) * n_];
    const double* prev = &sums_[static_cast<std::size_t>(level) * n_];
    double* next = &sums_[static_cast<std::size_t>(level + 1) * n_];
    long long from = all_zero ? 0 : -r_;
    for (long long c = from; c <= r_; ++c) {
      if (stop_) return;
      double cd = static_cast<double>(c);
      for (int j = 0; j < n_; ++j) next[j] = prev[j] + cd * row[j];
      q_[level] = c;
      bool child_any_max = any_max || c == r_ || c == -r_;
      bool child_all_zero = all_zero && c == 0;
      descend(level + 1, child_any_max, child_all_zero);
    }
  }

  void leaf(int level, bool any_max, bool all_zero) {
    if (all_zero) {
      candidate(level, r_);
    } else if (any_max) {
      for (long long c = -r_; c <= r_ && !stop_; ++c) candidate(level, c);
    } else {
      candidate(level, -r_);
      if (!stop_) candidate(level, r_);
    }
  }

  void candidate(int level, long long c) {
    ++out_.scanned;
    const double* row = &x_[static_cast<std::size_t>(level) * n_];
    const double* s = &sums_[static_cast<std::size_t>(level) * n_];
    double cd = static_cast<double>(c);
    bool close = false;
    bool pass = true;
    double min_margin = 0.0;
    for (int j = 0; j < n_; ++j) {
      double v = s[j] + cd * row[j];
      double value = classical_ ? dist_to_nearest(v, nullptr) : std::fabs(v);
      double d = bounds_[j] - value;
      bool ok = inclusive_ ? (d >= 0.0) : (d > 0.0);
      if (std::fabs(d) <= guard_ * bounds_[j]) close = true;
      if (!ok) {
        pass = false;
        break;
      }
      if (j == 0 || d < min_margin) min_margin = d;
    }
    if (close) ++out_.uncertain;
    if (!pass) return;
    ++out_.count;
    if (limits_.collect_records) {
      q_[level] = c;
      SolutionRecord rec;
      rec.q.components.assign(q_.begin(), q_.end());
      rec.form_values.resize(n_);
      rec.bounds.assign(bounds_.begin(), bounds_.end());
      for (int j = 0; j < n_; ++j) {
        double v = s[j] + cd * row[j];
        rec.form_values[j] = classical_ ? dist_to_nearest(v, nullptr) : std::fabs(v);
      }
      rec.margin = min_margin;
      rec.uncertain = close;
      rec.exact = false;
      out_.records.push_back(std::move(rec));
    }
    if (limits_.stop_at_first) {
      stop_ = true;
      if (limits_.external_stop) {
        limits_.external_stop->store(true, std::memory_order_relaxed);
      }
    }
  }

  int m_;
  int n_;
  bool classical_;
  bool inclusive_;
  double guard_;
  ScanLimits limits_;
  std::vector<double> x_;
  std::vector<double> sums_;
  std::vector<long long> q_;
  std::vector<double> bounds_;
  long long r_ = 0;
  bool stop_ = false;
  ShellOutcome out_;
};

class ExactShellScan {
 public:
  ExactShellScan(const FormMatrix& X, const ProblemSpec& spec, const EngineOptions& options,
                 const ScanLimits& limits)
      : m_(spec.m),
        n_(spec.n),
        classical_(spec.variant == Variant::Classical),
        inclusive_(options.inclusive),
        limits_(limits),
        x_(static_cast<std::size_t>(spec.m) * spec.n),
        sums_(static_cast<std::size_t>(spec.m) * spec.n, Rational(0)),
        q_(spec.m, 0),
        bounds_(spec.n, Rational(0)) {
    const MatQ& entries = X.exact_entries();
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) {
        x_[static_cast<std::size_t>(i) * n_ + j] = entries.at(i, j);
      }
    }
  }

  ShellOutcome scan(long long r, const ProblemSpec& spec) {
    out_ = ShellOutcome{};
    r_ = r;
    stop_ = false;
    for (int j = 0; j < n_; ++j) {
      bounds_[j] = spec.psi.eval_coord_exact(j, r);
    }
    descend(0, false, true);
    return std::move(out_);
  }

 private:
  void descend(int level, bool any_max, bool all_zero) {
    if (stop_ || (limits_.external_stop &&
                  limits_.external_stop->load(std::memory_order_relaxed))) {
      stop_ = true;
      return;
    }
    if (level == m_ - 1) {
      leaf(level, any_max, all_zero);
      return;
    }
    const Rational* row = &x_[static_cast<std::size_t>(level) * n_];
    const Rational* prev = &sums_[static_cast<std::size_t>(level) * n_];
    Rational* next = &sums_[static_cast<std::size_t>(level + 1) * n_];
    long long from = all_zero ? 0 : -r_;
    for (long long c = from; c <= r_; ++c) {
      if (stop_) return;
      for (int j = 0; j < n_; ++j) {
        next[j] = Rational(prev[j] + row[j] * static_cast<long>(c));
      }
      q_[level] = c;
      bool child_any_max = any_max || c == r_ || c == -r_;
      bool child_all_zero = all_zero && c == 0;
      descend(level + 1, child_any_max, child_all_zero);
    }
  }

  void leaf(int level, bool any_max, bool all_zero) {
    if (all_zero) {
      candidate(level, r_);
    } else if (any_max) {
      for (long long c = -r_; c <= r_ && !stop_; ++c) candidate(level, c);
    } else {
      candidate(level, -r_);
      if (!stop_) candidate(level, r_);
    }
  }

  Rational form_value(const Rational& v) const {
    if (!classical_) return rational_abs(v);
    return rational_abs(Rational(v - Rational(nearest_integer(v))));
  }

  void candidate(int level, long long c) {
    ++out_.scanned;
    const Rational* row = &x_[static_cast<std::size_t>(level) * n_];
    const Rational* s = &sums_[static_cast<std::size_t>(level) * n_];
    bool pass = true;
    std::vector<Rational> values;
    if (limits_.collect_records) values.reserve(n_);
    Rational min_margin(0);
    for (int j = 0; j < n_; ++j) {
      Rational v(s[j] + row[j] * static_cast<long>(c));
      Rational value = form_value(v);
      int rel = cmp(value, bounds_[j]);
      bool ok = inclusive_ ? (rel <= 0) : (rel < 0);
      if (!ok) {
        pass = false;
        break;
      }
      Rational margin(bounds_[j] - value);
      if (j == 0 || margin < min_margin) min_margin = margin;
      if (limits_.collect_records) values.push_back(value);
    }
    if (!pass) return;
    ++out_.count;
    if (limits_.collect_records) {
      q_[level] = c;
      SolutionRecord rec;
      rec.q.components.assign(q_.begin(), q_.end());
      rec.exact = true;
      rec.form_values_exact = std::move(values);
      rec.bounds_exact.assign(bounds_.begin(), bounds_.end());
      rec.margin_exact = min_margin;
      rec.form_values.resize(n_);
      rec.bounds.resize(n_);
      for (int j = 0; j < n_; ++j) {
        rec.form_values[j] = to_double(rec.form_values_exact[j]);
        rec.bounds[j] = to_double(rec.bounds_exact[j]);
      }
      rec.margin = to_double(min_margin);
      rec.uncertain = false;
      out_.records.push_back(std::move(rec));
    }
    if (limits_.stop_at_first) {
      stop_ = true;
      if (limits_.external_stop) {
        limits_.external_stop->store(true, std::memory_order_relaxed);
      }
    }
  }

  int m_;
  int n_;
  bool classical_;
  bool inclusive_;
  ScanLimits limits_;
  std::vector<Rational> x_;
  std::vector<Rational> sums_;
  std::vector<long long> q_;
  std::vector<Rational> bounds_;
  long long r_ = 0;
  bool stop_ = false;
  ShellOutcome out_;
};

bool use_exact_mode(const ProblemSpec& spec, const FormMatrix& X) {
  return X.is_exact() && spec.psi.exact_capable();
}

void check_budget(const ProblemSpec& spec, const HeightWindow& window,
                  const EngineOptions& options) {
  double estimate = estimate_scan_cost(spec.m, spec.n, window);
  if (estimate > static_cast<double>(options.budget)) {
    fail(errkind::budget_exceeded,
         "estimated scan cost " + std::to_string(estimate) +
             " candidate-form evaluations exceeds budget " + std::to_string(options.budget));
  }
}

// Runs one scan over the window, partitioned by shells across workers; the
// merged outcome is bit-identical to single-threaded execution because each
// shell is processed whole by exactly one worker and merged in shell order.
EnumerationReport run_scan(const ProblemSpec& spec, const FormMatrix& X,
                           const HeightWindow& window, const EngineOptions& options,
                           const ScanLimits& limits) {
  check_dims(spec, X);
  check_budget(spec, window, options);

  const bool exact = use_exact_mode(spec, X);
  const long long shells = window.q_max - window.q_min + 1;
  int jobs = options.jobs < 1 ? 1 : options.jobs;
  if (jobs > 64) jobs = 64;
  if (static_cast<long long>(jobs) > shells) jobs = static_cast<int>(shells);

  std::vector<ShellOutcome> per_shell(static_cast<std::size_t>(shells));

  auto worker = [&](int tid) {
    ScanLimits local = limits;
    if (exact) {
      ExactShellScan scanner(X, spec, options, local);
      for (long long idx = tid; idx < shells; idx += jobs) {
        if (local.external_stop &&
            local.external_stop->load(std::memory_order_relaxed)) {
          break;
        }
        per_shell[static_cast<std::size_t>(idx)] = scanner.scan(window.q_min + idx, spec);
      }
    } else {
      FloatShellScan scanner(X, spec, options, local);
      for (long long idx = tid; idx < shells; idx += jobs) {
        if (local.external_stop &&
            local.external_stop->load(std::memory_order_relaxed)) {
          break;
        }
        per_shell[static_cast<std::size_t>(idx)] = scanner.scan(window.q_min + idx, spec);
      }
    }
  };

  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker, t);
    for (std::thread& t : threads) t.join();
  }

  EnumerationReport report;
  report.m = spec.m;
  report.n = spec.n;
  report.variant = spec.variant;
  report.window = window;
  report.exact = exact;
  report.shell_counts.resize(static_cast<std::size_t>(shells), 0);
  for (long long idx = 0; idx < shells; ++idx) {
    ShellOutcome& o = per_shell[static_cast<std::size_t>(idx)];
    report.shell_counts[static_cast<std::size_t>(idx)] = o.count;
    report.vectors_scanned += o.scanned;
    report.uncertain += o.uncertain;
    for (SolutionRecord& rec : o.records) {
      report.solutions.push_back(std::move(rec));
    }
  }
  return report;
}

}  // namespace

long long EnumerationReport::solution_count() const {
  long long total = 0;
  for (long long c : shell_counts) total += c;
  return total;
}

std::vector<double> eval_abs_forms(const IntegerVector& q, const FormMatrix& X) {
  check_vector_length(q, X.m(), "integer vector");
  std::vector<double> out(X.n(), 0.0);
  for (int j = 0; j < X.n(); ++j) {
    double v = 0.0;
    for (int i = 0; i < X.m(); ++i) {
      v += static_cast<double>(q.components[i]) * X.entry_double(i, j);
    }
    out[j] = std::fabs(v);
  }
  return out;
}

std::vector<Rational> eval_abs_forms_exact(const IntegerVector& q, const FormMatrix& X) {
  check_vector_length(q, X.m(), "integer vector");
  const MatQ& entries = X.exact_entries();
  std::vector<Rational> out(X.n(), Rational(0));
  for (int j = 0; j < X.n(); ++j) {
    Rational v(0);
    for (int i = 0; i < X.m(); ++i) {
      v = Rational(v + entries.at(i, j) * static_cast<long>(q.components[i]));
    }
    out[j] = rational_abs(v);
  }
  return out;
}

DistResult eval_dist_forms(const IntegerVector& r, const FormMatrix& Y) {
  check_vector_length(r, Y.m(), "integer vector");
  DistResult out;
  out.distances.resize(Y.n());
  out.nearest.components.resize(Y.n());
  for (int j = 0; j < Y.n(); ++j) {
    double v = 0.0;
    for (int i = 0; i < Y.m(); ++i) {
      v += static_cast<double>(r.components[i]) * Y.entry_double(i, j);
    }
    double p = 0.0;
    out.distances[j] = dist_to_nearest(v, &p);
    out.nearest.components[j] = static_cast<long long>(p);
  }
  return out;
}

DistResultExact eval_dist_forms_exact(const IntegerVector& r, const FormMatrix& Y) {
  check_vector_length(r, Y.m(), "integer vector");
  const MatQ& entries = Y.exact_entries();
  DistResultExact out;
  out.distances.resize(Y.n(), Rational(0));
  out.nearest.components.resize(Y.n());
  for (int j = 0; j < Y.n(); ++j) {
    Rational v(0);
    for (int i = 0; i < Y.m(); ++i) {
      v = Rational(v + entries.at(i, j) * static_cast<long>(r.components[i]));
    }
    Integer p = nearest_integer(v);
    out.distances[j] = rational_abs(Rational(v - Rational(p)));
    if (!p.fits_slong_p()) {
      fail(errkind::range, "nearest integer exceeds machine range");
    }
    out.nearest.components[j] = p.get_si();
  }
  return out;
}

EnumerationReport enumerate_solutions(const ProblemSpec& spec, const FormMatrix& X,
                                      const HeightWindow& window,
                                      const EngineOptions& options) {
  ScanLimits limits;
  limits.collect_records = true;
  return run_scan(spec, X, window, options, limits);
}

std::vector<long long> count_shells(const ProblemSpec& spec, const FormMatrix& X,
                                    const HeightWindow& window,
                                    const EngineOptions& options) {
  ScanLimits limits;
  limits.collect_records = false;
  return run_scan(spec, X, window, options, limits).shell_counts;
}

bool has_solution(const ProblemSpec& spec, const FormMatrix& X,
                  const HeightWindow& window, const EngineOptions& options) {
  ScanLimits limits;
  limits.collect_records = false;
  limits.stop_at_first = true;
  std::atomic<bool> found{false};
  limits.external_stop = &found;
  EnumerationReport report = run_scan(spec, X, window, options, limits);
  return found.load() || report.solution_count() > 0;
}

double canonical_shell_size(int m, long long r) {
  double outer = std::pow(2.0 * static_cast<double>(r) + 1.0, m);
  double inner = std::pow(2.0 * static_cast<double>(r) - 1.0, m);
  return (outer - inner) / 2.0;
}

double estimate_scan_cost(int m, int n, const HeightWindow& window) {
  double total = 0.0;
  for (long long r = window.q_min; r <= window.q_max; ++r) {
    total += canonical_shell_size(m, r);
  }
  return total * n;
}

}  // namespace smallforms
