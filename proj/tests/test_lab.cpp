#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "smallforms/errors.hpp"
#include "smallforms/lab.hpp"
#include "smallforms/rng.hpp"
#include "smallforms/serialization.hpp"
#include "support/naive_scan.hpp"

using namespace smallforms;

namespace {

ApproxFunction power(long c_num, long c_den, double tau) {
  return ApproxFunction::power_log(Rational(c_num, c_den), tau, 0.0);
}

ProblemSpec generic_spec(double tau, long c_num = 1, long c_den = 1) {
  return ProblemSpec(3, 1, Variant::Absolute,
                     ApproxFunction::power_log(Rational(c_num, c_den), tau, 0.0));
}

std::string error_kind(const std::function<void()>& op) {
  try {
    op();
  } catch (const Error& e) {
    return e.kind();
  }
  return "";
}

// Independent re-computation of the 95% Wilson interval.
void check_wilson(const FractionEstimate& est) {
  const double z = 1.959963984540054;
  const double nr = static_cast<double>(est.samples);
  const double p = static_cast<double>(est.hits) / nr;
  const double denom = 1.0 + z * z / nr;
  const double centre = (p + z * z / (2.0 * nr)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nr + z * z / (4.0 * nr * nr)) / denom;
  CHECK(est.fraction == doctest::Approx(p));
  CHECK(est.ci_low == doctest::Approx(std::max(0.0, centre - half)).epsilon(1e-12));
  CHECK(est.ci_high ==
        doctest::Approx(std::min(1.0, centre + half)).epsilon(1e-12));
  CHECK(est.ci_low >= 0.0);
  CHECK(est.ci_high <= 1.0);
  CHECK(est.ci_low <= est.fraction + 1e-15);
  CHECK(est.fraction <= est.ci_high + 1e-15);
}

}  // namespace

TEST_CASE("hit fractions are deterministic across worker counts") {
  ProblemSpec spec = generic_spec(1.0, 1, 2);
  HeightWindow window(1, 5);
  FractionEstimate serial = estimate_hit_fraction(spec, window, 17, 42, 1);
  FractionEstimate parallel = estimate_hit_fraction(spec, window, 17, 42, 4);
  CHECK(serial.hits == parallel.hits);
  CHECK(serial.fraction == parallel.fraction);
  CHECK(serial.ci_low == parallel.ci_low);
  CHECK(serial.ci_high == parallel.ci_high);
  check_wilson(serial);
}

TEST_CASE("hit fractions are monotone over nested windows at fixed seed") {
  ProblemSpec spec = generic_spec(2.0, 1, 3);
  FractionEstimate a = estimate_hit_fraction(spec, HeightWindow(1, 2), 20, 9);
  FractionEstimate b = estimate_hit_fraction(spec, HeightWindow(1, 4), 20, 9);
  FractionEstimate c = estimate_hit_fraction(spec, HeightWindow(1, 8), 20, 9);
  CHECK(a.fraction <= b.fraction);
  CHECK(b.fraction <= c.fraction);
  check_wilson(a);
  check_wilson(b);
  check_wilson(c);
}

TEST_CASE("a unit bound at height one is hit by every sample") {
  // psi(1) = 1 while every |X_ij| < 1, so q = e_1 always works.
  FractionEstimate est =
      estimate_hit_fraction(generic_spec(1.0), HeightWindow(1, 2), 12, 3);
  CHECK(est.hits == 12);
  CHECK(est.fraction == 1.0);
  CHECK(est.ci_high == doctest::Approx(1.0));
  CHECK(est.ci_low < 1.0);

  // And an absurdly small bound is hit by none.
  FractionEstimate none = estimate_hit_fraction(
      generic_spec(4.0, 1, 1000), HeightWindow(2, 4), 12, 3);
  CHECK(none.hits == 0);
  CHECK(none.fraction == 0.0);
  CHECK(none.ci_low == doctest::Approx(0.0).scale(1.0));
  CHECK(none.ci_high > 0.0);
}

TEST_CASE("measure estimation guards its regime, samples, and budget") {
  ApproxFunction psi = power(1, 2, 1.0);
  CHECK(error_kind([&] {
          estimate_hit_fraction(ProblemSpec(1, 1, Variant::Absolute, psi),
                                HeightWindow(1, 3), 4, 0);
        }) == errkind::regime);
  CHECK(error_kind([&] {
          estimate_hit_fraction(ProblemSpec(2, 1, Variant::Absolute, psi),
                                HeightWindow(1, 3), 4, 0);
        }) == errkind::regime);
  CHECK(error_kind([&] {
          estimate_hit_fraction(ProblemSpec(2, 2, Variant::Absolute, psi),
                                HeightWindow(1, 3), 4, 0);
        }) == errkind::regime);
  CHECK(error_kind([&] {
          estimate_hit_fraction(generic_spec(1.0), HeightWindow(1, 3), 0, 0);
        }) == errkind::invalid_argument);
  try {
    estimate_hit_fraction(generic_spec(1.0), HeightWindow(1, 200), 4, 0, 1,
                          1000);
    FAIL("expected a budget error");
  } catch (const Error& e) {
    CHECK(e.kind() == errkind::budget_exceeded);
    CHECK(std::string(e.what()).find("budget") != std::string::npos);
  }

  // The classical variant is allowed for any shape.
  FractionEstimate classical = estimate_hit_fraction(
      ProblemSpec(1, 1, Variant::Classical, power(1, 3, 1.0)),
      HeightWindow(1, 10), 10, 5);
  CHECK(classical.samples == 10);
  check_wilson(classical);
}

TEST_CASE("a divergent series trend is confirmed on a growing schedule") {
  ExperimentPlan plan{generic_spec(1.0, 1, 2),
                      2024,
                      {HeightWindow(1, 3), HeightWindow(1, 6),
                       HeightWindow(1, 12)},
                      25};
  RunRecord record = zero_one_verdict(plan);
  CHECK(record.predicted_kind == CriterionKind::AbsoluteLebesgue);
  CHECK(record.predicted == SeriesClass::Divergent);
  REQUIRE(record.windows.size() == 3);
  CHECK(record.windows[0].estimate.fraction <=
        record.windows[1].estimate.fraction);
  CHECK(record.windows[1].estimate.fraction <=
        record.windows[2].estimate.fraction);
  CHECK(record.windows[2].estimate.fraction >= plan.agree_high);
  CHECK(record.agreement == Agreement::Consistent);
  CHECK(record.wall_seconds >= 0.0);
  CHECK(!record.engine.empty());
}

TEST_CASE("a convergent series trend stays near zero on distant windows") {
  ExperimentPlan plan{ProblemSpec(3, 1, Variant::Absolute, power(1, 100, 4.0)),
                      7,
                      {HeightWindow(50, 55), HeightWindow(50, 60),
                       HeightWindow(50, 65)},
                      10};
  RunRecord record = zero_one_verdict(plan);
  CHECK(record.predicted == SeriesClass::Convergent);
  CHECK(record.windows.back().estimate.fraction <= plan.agree_low);
  CHECK(record.agreement == Agreement::Consistent);
}

TEST_CASE("boundary predictions refuse to claim agreement") {
  ExperimentPlan plan{
      ProblemSpec(3, 1, Variant::Absolute,
                  ApproxFunction::power_log(Rational(1), 2.0, 1.0)),
      1,
      {HeightWindow(1, 2), HeightWindow(1, 3)},
      3};
  RunRecord record = zero_one_verdict(plan);
  CHECK(record.predicted == SeriesClass::Boundary);
  CHECK(record.agreement == Agreement::NotApplicable);
}

TEST_CASE("the predicted criterion tracks variant and psi shape") {
  ExperimentPlan classical{
      ProblemSpec(1, 1, Variant::Classical, power(1, 3, 1.0)),
      5,
      {HeightWindow(1, 4), HeightWindow(1, 8)},
      5};
  CHECK(zero_one_verdict(classical).predicted_kind ==
        CriterionKind::ClassicalLebesgue);

  ExperimentPlan rates{
      ProblemSpec(3, 1, Variant::Absolute,
                  ApproxFunction::per_coordinate({power(1, 2, 1.0)})),
      5,
      {HeightWindow(1, 4), HeightWindow(1, 8)},
      5};
  CHECK(zero_one_verdict(rates).predicted_kind == CriterionKind::AbsoluteRates);
}

TEST_CASE("plan validation rejects malformed schedules") {
  ProblemSpec spec = generic_spec(1.0);
  ExperimentPlan no_windows{spec, 0, {}, 4};
  CHECK(error_kind([&] { zero_one_verdict(no_windows); }) ==
        errkind::invalid_argument);

  ExperimentPlan shrinking{spec, 0,
                           {HeightWindow(1, 5), HeightWindow(1, 5)}, 4};
  CHECK(error_kind([&] { zero_one_verdict(shrinking); }) ==
        errkind::invalid_argument);

  ExperimentPlan box{spec, 0, {HeightWindow(1, 5), HeightWindow(1, 6)}, 4,
                     LabMode::DimensionBoxCount};
  CHECK(error_kind([&] { zero_one_verdict(box); }) ==
        errkind::invalid_argument);
}

TEST_CASE("the first-moment bound sums shell sizes times form widths") {
  // m = 3, psi = 1/r: shells 13, 49, 109 and widths 1, 1, 2/3.
  double bound = first_moment_bound(generic_spec(1.0), HeightWindow(1, 3));
  CHECK(bound == doctest::Approx(13.0 + 49.0 + 109.0 * 2.0 / 3.0));

  // Per-coordinate widths multiply within each height.
  ProblemSpec rates(3, 2, Variant::Absolute,
                    ApproxFunction::per_coordinate(
                        {power(1, 1, 1.0), power(1, 2, 1.0)}));
  CHECK(first_moment_bound(rates, HeightWindow(1, 2)) ==
        doctest::Approx(13.0 + 49.0 * 0.5));
}

TEST_CASE("slab volumes match their closed forms") {
  CHECK(slab_volume(IntegerVector{{1}}, {0.3}) == doctest::Approx(0.3));
  CHECK(slab_volume(IntegerVector{{1}}, {2.0}) == doctest::Approx(1.0));
  CHECK(slab_volume(IntegerVector{{1, -1}}, {0.3}) ==
        doctest::Approx(1.0 - 0.7 * 0.7));
  CHECK(slab_volume(IntegerVector{{1, 1}}, {0.3}) ==
        doctest::Approx(0.3 * 0.3 / 2.0));
  // Independent columns multiply.
  CHECK(slab_volume(IntegerVector{{1, 1}}, {0.3, 0.5}) ==
        doctest::Approx((0.3 * 0.3 / 2.0) * (0.5 * 0.5 / 2.0)));
  // Hand-computed inclusion-exclusion for q = (2, -3), width 0.4.
  CHECK(slab_volume(IntegerVector{{2, -3}}, {0.4}) ==
        doctest::Approx((9.44 - 6.4) / 12.0));

  CHECK(slab_volume(IntegerVector{{1}}, {0.0}) == 0.0);
  CHECK(slab_volume(IntegerVector{{1}}, {0.5, -0.1}) == 0.0);
  CHECK(error_kind([] { slab_volume(IntegerVector{{0, 0}}, {0.5}); }) ==
        errkind::invalid_argument);
  CHECK(error_kind([] { slab_volume(IntegerVector{{1}}, {}); }) ==
        errkind::invalid_argument);
  CHECK(error_kind([] {
          slab_volume(IntegerVector{std::vector<long long>(21, 1)}, {0.5});
        }) == errkind::range);
}

TEST_CASE("slab volumes agree with Monte Carlo estimates") {
  SplitMix64 gen(314159);
  const double exact = slab_volume(IntegerVector{{2, -3}}, {0.4});
  long long inside = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    const double x = gen.next_unit();
    const double y = gen.next_unit();
    if (std::fabs(2.0 * x - 3.0 * y) < 0.4) ++inside;
  }
  const double mc = static_cast<double>(inside) / trials;
  CHECK(std::fabs(mc - exact) < 0.015);
}

TEST_CASE("box counts match a direct interval-arithmetic scan") {
  BoxCountPlan plan{generic_spec(2.0), {2, 3, 4}};
  BoxCountResult result = box_count_dimension(plan);
  REQUIRE(result.points.size() == 3);
  CHECK(result.s_star == doctest::Approx(3.0));
  CHECK(result.residuals.size() == 3);

  for (const BoxCountPoint& point : result.points) {
    CHECK(point.delta == doctest::Approx(std::ldexp(1.0, -point.k)));
    CHECK(point.q_min >= 2);
    CHECK(point.q_max >= point.q_min);
    const long long naive_boxes = naive::box_count(
        3, 1, plan.spec.psi,
        naive::canonical_window(3, point.q_min, point.q_max),
        1 << point.k);
    CHECK(point.box_count == naive_boxes);
    const long long total = 1LL << (3 * point.k);
    CHECK(point.box_count >= 1);
    CHECK(point.box_count <= total);
  }
  CHECK(result.points[0].box_count < result.points[2].box_count);
  CHECK(result.slope > 0.0);

  BoxCountPlan threaded = plan;
  threaded.jobs = 2;
  BoxCountResult again = box_count_dimension(threaded);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(again.points[i].box_count == result.points[i].box_count);
  }
  CHECK(again.slope == result.slope);
}

TEST_CASE("box counting rejects plans outside its guarantees") {
  CHECK(error_kind([] {
          box_count_dimension(BoxCountPlan{
              ProblemSpec(1, 1, Variant::Classical, ApproxFunction::power_log(
                                                        Rational(1), 2.0, 0.0)),
              {3, 4, 5}});
        }) == errkind::regime);
  CHECK(error_kind([] {
          box_count_dimension(BoxCountPlan{
              ProblemSpec(3, 1, Variant::Absolute, ApproxFunction::power_log(
                                                       Rational(1), 2.0, 1.0)),
              {3, 4, 5}});
        }) == errkind::invalid_argument);
  CHECK(error_kind([] {
          // tau below (m - n)/n = 2 pushes the target past the ambient cube.
          box_count_dimension(BoxCountPlan{generic_spec(1.5), {3, 4, 5}});
        }) == errkind::invalid_argument);
  CHECK(error_kind([] {
          box_count_dimension(BoxCountPlan{generic_spec(2.0), {3, 4}});
        }) == errkind::invalid_argument);
  CHECK(error_kind([] {
          box_count_dimension(BoxCountPlan{generic_spec(2.0), {3, 3, 4}});
        }) == errkind::invalid_argument);
  CHECK(error_kind([] {
          box_count_dimension(BoxCountPlan{generic_spec(2.0), {0, 3, 4}});
        }) == errkind::invalid_argument);
  // m n k > 27 boxes in the finest grid.
  CHECK(error_kind([] {
          box_count_dimension(BoxCountPlan{
              ProblemSpec(3, 2, Variant::Absolute, ApproxFunction::power_log(
                                                       Rational(1), 1.0, 0.0)),
              {3, 4, 5}});
        }) == errkind::budget_exceeded);
  BoxCountPlan strapped{generic_spec(2.0), {8, 9, 10}};
  strapped.budget = 1000;
  CHECK(error_kind([&] { box_count_dimension(strapped); }) ==
        errkind::budget_exceeded);
}

TEST_CASE("run records survive a persistence round trip") {
  ExperimentPlan plan{
      ProblemSpec(3, 1, Variant::Absolute,
                  ApproxFunction::power_log(Rational(1), 2.0, 1.0)),
      99,
      {HeightWindow(1, 2), HeightWindow(1, 3)},
      3};
  RunRecord record = zero_one_verdict(plan);
  const std::string path = "/tmp/smallforms_test_run.json";
  persist_run(record, path);
  RunRecord loaded = load_run(path);

  CHECK(loaded.plan.spec.m == 3);
  CHECK(loaded.plan.spec.n == 1);
  CHECK(loaded.plan.spec.variant == Variant::Absolute);
  CHECK(loaded.plan.spec.psi.tau() == record.plan.spec.psi.tau());
  CHECK(loaded.plan.spec.psi.kappa() == record.plan.spec.psi.kappa());
  CHECK(loaded.plan.seed == 99);
  CHECK(loaded.plan.windows == record.plan.windows);
  CHECK(loaded.plan.samples == 3);
  CHECK(loaded.plan.mode == LabMode::MeasureTrend);
  CHECK(loaded.plan.agree_high == record.plan.agree_high);
  CHECK(loaded.plan.budget == record.plan.budget);
  REQUIRE(loaded.windows.size() == record.windows.size());
  for (std::size_t i = 0; i < loaded.windows.size(); ++i) {
    CHECK(loaded.windows[i].window == record.windows[i].window);
    CHECK(loaded.windows[i].estimate.fraction ==
          record.windows[i].estimate.fraction);
    CHECK(loaded.windows[i].estimate.hits == record.windows[i].estimate.hits);
    CHECK(loaded.windows[i].estimate.ci_low ==
          record.windows[i].estimate.ci_low);
  }
  CHECK(loaded.predicted_kind == record.predicted_kind);
  CHECK(loaded.predicted == record.predicted);
  CHECK(loaded.agreement == record.agreement);
  CHECK(loaded.wall_seconds == record.wall_seconds);
  CHECK(loaded.engine == record.engine);
  std::remove(path.c_str());
}

TEST_CASE("incomplete or mistyped run files are rejected by field") {
  ExperimentPlan plan{generic_spec(1.0), 11, {HeightWindow(1, 2)}, 2};
  RunRecord record = zero_one_verdict(plan);
  Json j = to_json(record);
  j["plan"].erase("seed");
  const std::string path = "/tmp/smallforms_test_bad_run.json";
  {
    std::ofstream out(path);
    out << j.dump(2);
  }
  try {
    load_run(path);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == errkind::parse);
    CHECK(std::string(e.what()).find("seed") != std::string::npos);
  }

  {
    std::ofstream out(path);
    out << R"({"schema_version": 1, "type": "box-count"})";
  }
  CHECK(error_kind([&] { load_run(path); }) == errkind::parse);

  CHECK(error_kind([] { load_run("/tmp/definitely-missing-dir/x.json"); }) ==
        errkind::io);
  std::remove(path.c_str());
}
