#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "smallforms/criteria.hpp"
#include "smallforms/errors.hpp"

using namespace smallforms;

namespace {

ApproxFunction unit_power(double tau, double kappa = 0.0) {
  return ApproxFunction::power_log(Rational(1), tau, kappa);
}

}  // namespace

TEST_CASE("kind names and command-line aliases round-trip") {
  CHECK(criterion_kind_from_name("cor1") == CriterionKind::AbsoluteLebesgue);
  CHECK(criterion_kind_from_name("Cor1") == CriterionKind::AbsoluteLebesgue);
  CHECK(criterion_kind_from_name("KG") == CriterionKind::ClassicalLebesgue);
  CHECK(criterion_kind_from_name("thm1") == CriterionKind::AbsoluteHausdorff);
  CHECK(criterion_kind_from_name("thm2") == CriterionKind::AbsoluteHausdorff);
  CHECK(criterion_kind_from_name("cor2") == CriterionKind::AbsoluteLebesgueWide);
  CHECK(criterion_kind_from_name("thm3") == CriterionKind::ClassicalHausdorff);
  CHECK(criterion_kind_from_name("rates") == CriterionKind::AbsoluteRates);
  for (CriterionKind kind :
       {CriterionKind::ClassicalLebesgue, CriterionKind::AbsoluteHausdorff,
        CriterionKind::AbsoluteLebesgue, CriterionKind::AbsoluteLebesgueWide,
        CriterionKind::ClassicalHausdorff, CriterionKind::AbsoluteRates}) {
    CHECK(criterion_kind_from_name(criterion_kind_name(kind)) == kind);
  }
  CHECK_THROWS_AS(criterion_kind_from_name("nope"), Error);
}

TEST_CASE("series terms match hand-computed values") {
  // psi(r) = 1/r, m = 3, n = 1: psi^n r^(m-n-1) = (1/7) * 7 = 1.
  CriterionSeries cor1(CriterionKind::AbsoluteLebesgue, 3, 1, unit_power(1.0));
  CHECK(series_term(cor1, 7) == doctest::Approx(1.0));

  // psi(r) = 1/r, m = n = 1: r^0 * (1/5) = 0.2.
  CriterionSeries kg(CriterionKind::ClassicalLebesgue, 1, 1, unit_power(1.0));
  CHECK(series_term(kg, 5) == doctest::Approx(0.2));

  // f = r^(mn) collapses the Hausdorff term to the Lebesgue term.
  CriterionSeries thm1(CriterionKind::AbsoluteHausdorff, 3, 1, unit_power(1.0),
                       DimensionFunction(3.0));
  for (long long r : {2LL, 10LL, 100LL}) {
    CHECK(series_term(thm1, r) == doctest::Approx(series_term(cor1, r)));
  }

  // Per-form rates: psi_1 psi_2 r^(m-n-1) at m = 3, n = 2, r = 2.
  CriterionSeries rates(
      CriterionKind::AbsoluteRates, 3, 2,
      ApproxFunction::per_coordinate({unit_power(1.0), unit_power(2.0)}));
  CHECK(series_term(rates, 2) == doctest::Approx(0.125));

  CHECK_THROWS_AS(series_term(cor1, 0), Error);
}

TEST_CASE("power-law classification reads off the exponent pair") {
  SeriesVerdict divergent =
      classify(CriterionSeries(CriterionKind::AbsoluteLebesgue, 3, 1,
                               unit_power(1.5)));
  CHECK(divergent.classification == SeriesClass::Divergent);
  CHECK(*divergent.power_exponent == doctest::Approx(-0.5));
  CHECK(*divergent.log_exponent == doctest::Approx(0.0));
  CHECK(divergent.hypotheses_ok());
  CHECK(divergent.zero_case == "Lebesgue measure zero");
  CHECK(divergent.full_case == "full Lebesgue measure");

  SeriesVerdict convergent =
      classify(CriterionSeries(CriterionKind::AbsoluteLebesgue, 3, 1,
                               unit_power(3.0)));
  CHECK(convergent.classification == SeriesClass::Convergent);
  CHECK(*convergent.power_exponent == doctest::Approx(-2.0));

  // Wide shape: psi = r^-1 log^-1, term psi^(m-1) ~ r^-2 log^-2.
  SeriesVerdict wide =
      classify(CriterionSeries(CriterionKind::AbsoluteLebesgueWide, 3, 3,
                               unit_power(1.0, 1.0)));
  CHECK(wide.classification == SeriesClass::Convergent);
  CHECK(*wide.power_exponent == doctest::Approx(-2.0));
  CHECK(*wide.log_exponent == doctest::Approx(-2.0));
}

TEST_CASE("the balanced pair e = -1, k = -1 is reported as Boundary") {
  // Term ~ 1/(r log r): divergent in truth, but the exponent test cannot
  // separate it from summable refinements, so the contract is Boundary.
  SeriesVerdict v = classify(CriterionSeries(
      CriterionKind::AbsoluteLebesgue, 3, 1, unit_power(2.0, 1.0)));
  CHECK(v.classification == SeriesClass::Boundary);
  CHECK(*v.power_exponent == doctest::Approx(-1.0));
  CHECK(*v.log_exponent == doctest::Approx(-1.0));

  SeriesVerdict diverging = classify(CriterionSeries(
      CriterionKind::AbsoluteLebesgue, 3, 1, unit_power(2.0, 0.5)));
  CHECK(diverging.classification == SeriesClass::Divergent);

  SeriesVerdict converging = classify(CriterionSeries(
      CriterionKind::AbsoluteLebesgue, 3, 1, unit_power(2.0, 1.5)));
  CHECK(converging.classification == SeriesClass::Convergent);
}

TEST_CASE("partial sums are coherent with direct term accumulation") {
  CriterionSeries series(CriterionKind::AbsoluteLebesgue, 3, 1,
                         unit_power(1.5));
  SeriesVerdict v = classify(series);
  REQUIRE(v.partial_sums.size() == 3);
  CHECK(v.partial_sum_start == 1);
  CHECK(v.partial_sums[0].upto == 1000);
  CHECK(v.partial_sums[1].upto == 10000);
  CHECK(v.partial_sums[2].upto == 100000);
  CHECK(v.partial_sums[0].sum < v.partial_sums[1].sum);
  CHECK(v.partial_sums[1].sum < v.partial_sums[2].sum);

  double direct = 0.0;
  for (long long r = 1; r <= 1000; ++r) direct += series_term(series, r);
  CHECK(v.partial_sums[0].sum == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("a just-divergent harmonic series grows by log 10 per decade") {
  // m = 3, n = 1, tau = 2: term = 1/r exactly.
  SeriesVerdict v = classify(
      CriterionSeries(CriterionKind::AbsoluteLebesgue, 3, 1, unit_power(2.0)));
  CHECK(v.classification == SeriesClass::Divergent);
  REQUIRE(v.partial_sums.size() == 3);
  const double d1 = v.partial_sums[1].sum - v.partial_sums[0].sum;
  const double d2 = v.partial_sums[2].sum - v.partial_sums[1].sum;
  CHECK(d1 == doctest::Approx(std::log(10.0)).epsilon(1e-3));
  CHECK(d2 == doctest::Approx(std::log(10.0)).epsilon(1e-4));
}

TEST_CASE("table input yields Unknown with whatever sums the table affords") {
  std::vector<double> values;
  for (int r = 1; r <= 50; ++r) values.push_back(1.0 / r);
  CriterionSeries series(CriterionKind::AbsoluteLebesgue, 3, 1,
                         ApproxFunction::table(values));
  SeriesVerdict v = classify(series);
  CHECK(v.classification == SeriesClass::Unknown);
  CHECK(!v.power_exponent.has_value());
  REQUIRE(v.partial_sums.size() == 1);  // all cutoffs clip to the table end
  CHECK(v.partial_sums[0].upto == 50);
  double direct = 0.0;
  for (long long r = 1; r <= 50; ++r) direct += series_term(series, r);
  CHECK(v.partial_sums[0].sum == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("hypothesis reports carry shape checks without blocking verdicts") {
  // Cor1 outside its shape: still classified, but flagged.
  SeriesVerdict small = classify(CriterionSeries(
      CriterionKind::AbsoluteLebesgue, 2, 1, unit_power(2.0)));
  CHECK(!small.hypotheses_ok());
  CHECK(small.classification == SeriesClass::Convergent);

  SeriesVerdict kg = classify(
      CriterionSeries(CriterionKind::ClassicalLebesgue, 1, 1, unit_power(1.0)));
  REQUIRE(kg.hypotheses.size() == 1);
  CHECK(kg.hypotheses[0].name == "psi is non-increasing");
  CHECK(kg.hypotheses[0].satisfied);
  CHECK(kg.hypotheses[0].detail.find("removable unless m = n = 1") !=
        std::string::npos);

  // Hausdorff, m > n: the two scaled dimension-function checks plus the
  // monotonicity note and the shape check.
  SeriesVerdict h = classify(CriterionSeries(CriterionKind::AbsoluteHausdorff,
                                             4, 2, unit_power(1.0),
                                             DimensionFunction(7.0)));
  REQUIRE(h.hypotheses.size() == 4);
  CHECK(h.hypotheses_ok());

  // Scaled power going non-positive is flagged: r^(-n^2) f with s = 3 < 4.
  SeriesVerdict bad = classify(CriterionSeries(CriterionKind::AbsoluteHausdorff,
                                               4, 2, unit_power(1.0),
                                               DimensionFunction(3.0)));
  CHECK(!bad.hypotheses_ok());
}

TEST_CASE("wide-shape divergence distinguishes infinite from positive-finite") {
  // 2 < m <= n: the divergent conclusion depends on r^(-(m-1)(n+1)) f(r).
  // m = 3, n = 3: threshold power is (m-1)(n+1) = 8.
  ApproxFunction psi = unit_power(0.25);
  SeriesVerdict infinite =
      classify(CriterionSeries(CriterionKind::AbsoluteHausdorff, 3, 3, psi,
                               DimensionFunction(7.0)));
  CHECK(infinite.classification == SeriesClass::Divergent);
  CHECK(infinite.full_case == "infinite Hausdorff f-measure");

  SeriesVerdict finite =
      classify(CriterionSeries(CriterionKind::AbsoluteHausdorff, 3, 3, psi,
                               DimensionFunction(8.0)));
  CHECK(finite.classification == SeriesClass::Divergent);
  CHECK(finite.full_case == "positive finite Hausdorff f-measure");
}

TEST_CASE("criterion construction validates f and per-coordinate usage") {
  CHECK_THROWS_AS(CriterionSeries(CriterionKind::AbsoluteHausdorff, 3, 1,
                                  unit_power(1.0)),
                  Error);
  CHECK_THROWS_AS(CriterionSeries(CriterionKind::AbsoluteLebesgue, 3, 1,
                                  unit_power(1.0), DimensionFunction(1.0)),
                  Error);
  ApproxFunction two =
      ApproxFunction::per_coordinate({unit_power(1.0), unit_power(2.0)});
  CHECK_THROWS_AS(
      CriterionSeries(CriterionKind::AbsoluteLebesgue, 3, 2, two), Error);
  CHECK_THROWS_AS(CriterionSeries(CriterionKind::AbsoluteRates, 4, 3, two),
                  Error);
  CriterionSeries ok(CriterionKind::AbsoluteRates, 3, 2, two);
  CHECK(ok.n == 2);
}

TEST_CASE("critical exponents from the balance equation") {
  CriticalExponent a =
      critical_exponent(CriterionKind::AbsoluteHausdorff, 3, 1, 2.0);
  CHECK(a.s_star == 3.0);  // (m-1)n + m/(tau+1) = 2 + 1, exactly
  CHECK(a.within_ambient);
  CHECK(a.ambient == 3.0);

  CriticalExponent b =
      critical_exponent(CriterionKind::AbsoluteHausdorff, 4, 2, 1.0);
  CHECK(b.s_star == 8.0);  // 6 + 4/2, exactly
  CHECK(b.within_ambient);

  CriticalExponent c =
      critical_exponent(CriterionKind::ClassicalHausdorff, 1, 1, 2.0);
  CHECK(c.s_star == doctest::Approx(2.0 / 3.0));
  CHECK(c.within_ambient);

  // tau below (m-n)/n pushes s* past the ambient dimension.
  CriticalExponent d =
      critical_exponent(CriterionKind::AbsoluteHausdorff, 3, 1, 1.0);
  CHECK(d.s_star == doctest::Approx(3.5));
  CHECK(!d.within_ambient);

  CHECK_THROWS_AS(critical_exponent(CriterionKind::AbsoluteHausdorff, 2, 2, 1.0),
                  Error);
  CHECK_THROWS_AS(critical_exponent(CriterionKind::AbsoluteHausdorff, 2, 1, 1.0),
                  Error);
  CHECK_THROWS_AS(critical_exponent(CriterionKind::AbsoluteLebesgue, 3, 1, 1.0),
                  Error);
  CHECK_THROWS_AS(critical_exponent(CriterionKind::AbsoluteHausdorff, 3, 1, 0.0),
                  Error);
}

TEST_CASE("classification flips across the critical exponent") {
  const int m = 3, n = 1;
  const double tau = 2.0;
  const double s_star =
      critical_exponent(CriterionKind::AbsoluteHausdorff, m, n, tau).s_star;
  ApproxFunction psi = unit_power(tau);

  SeriesVerdict below = classify(CriterionSeries(
      CriterionKind::AbsoluteHausdorff, m, n, psi,
      DimensionFunction(s_star - 0.01)));
  SeriesVerdict above = classify(CriterionSeries(
      CriterionKind::AbsoluteHausdorff, m, n, psi,
      DimensionFunction(s_star + 0.01)));
  CHECK(below.hypotheses_ok());
  CHECK(above.hypotheses_ok());
  CHECK(below.classification == SeriesClass::Divergent);
  CHECK(above.classification == SeriesClass::Convergent);

  const double t_star =
      critical_exponent(CriterionKind::ClassicalHausdorff, 2, 2, 1.0).s_star;
  SeriesVerdict cb = classify(CriterionSeries(
      CriterionKind::ClassicalHausdorff, 2, 2, unit_power(1.0),
      DimensionFunction(t_star - 0.01)));
  SeriesVerdict ca = classify(CriterionSeries(
      CriterionKind::ClassicalHausdorff, 2, 2, unit_power(1.0),
      DimensionFunction(t_star + 0.01)));
  CHECK(cb.classification == SeriesClass::Divergent);
  CHECK(ca.classification == SeriesClass::Convergent);
}

TEST_CASE("the reformulated series is the same series, via g = r^(-n^2) f") {
  // Exponents are recomputed from g and the (m-n-1)n shift, so the equality
  // below is an identity check, not the same code path twice.
  SeriesVerdict direct = classify(
      CriterionSeries(CriterionKind::AbsoluteHausdorff, 3, 1, unit_power(2.0),
                      DimensionFunction(2.5)));
  SeriesVerdict reformulated =
      g_series(3, 1, unit_power(2.0), DimensionFunction(2.5));

  CHECK(direct.classification == reformulated.classification);
  CHECK(*direct.power_exponent == doctest::Approx(0.5));
  CHECK(*reformulated.power_exponent == doctest::Approx(0.5));
  CHECK(*direct.log_exponent ==
        doctest::Approx(*reformulated.log_exponent));
  REQUIRE(direct.partial_sums.size() == reformulated.partial_sums.size());
  for (std::size_t i = 0; i < direct.partial_sums.size(); ++i) {
    CHECK(reformulated.partial_sums[i].sum ==
          doctest::Approx(direct.partial_sums[i].sum).epsilon(1e-9));
  }

  // g must itself be a dimension function: s = 0.5 <= n^2 = 1 fails.
  CHECK_THROWS_AS(g_series(3, 1, unit_power(2.0), DimensionFunction(0.5)),
                  Error);
}

TEST_CASE("log-weighted dimension functions shift the summation start") {
  // f has a log factor, so terms need Psi(r) < 1; psi(r) = 2/r gives
  // Psi(r) = 2/r^2 < 1 only from r = 2 on.
  CriterionSeries series(CriterionKind::AbsoluteHausdorff, 3, 1,
                         ApproxFunction::power_log(Rational(2), 1.0, 0.0),
                         DimensionFunction(2.5, 0.5));
  SeriesVerdict v = classify(series);
  CHECK(v.partial_sum_start == 2);
  REQUIRE(!v.partial_sums.empty());
  double direct = 0.0;
  for (long long r = 2; r <= v.partial_sums[0].upto; ++r) {
    direct += series_term(series, r);
  }
  CHECK(v.partial_sums[0].sum == doctest::Approx(direct).epsilon(1e-12));
}
