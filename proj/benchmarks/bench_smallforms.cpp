// Microbenchmarks for the hot paths: shell enumeration, series partial sums,
// the decompose/lift pipeline, and analytic box marking.
#include <benchmark/benchmark.h>

#include "smallforms/criteria.hpp"
#include "smallforms/forms_engine.hpp"
#include "smallforms/lab.hpp"
#include "smallforms/reduction.hpp"
#include "smallforms/serialization.hpp"

namespace sf = smallforms;

namespace {

sf::ApproxFunction psi_tau(double tau) {
  return sf::ApproxFunction::power_log(sf::Rational(1), tau, 0.0);
}

void BM_enumerate_float(benchmark::State& state) {
  sf::MatD entries(3, 1);
  entries.at(0, 0) = 0.31830988618379067;
  entries.at(1, 0) = 0.5772156649015329;
  entries.at(2, 0) = 0.2614972128476428;
  const sf::FormMatrix X = sf::FormMatrix::floating(entries);
  const sf::ProblemSpec spec(3, 1, sf::Variant::Absolute, psi_tau(1.5));
  const sf::HeightWindow window{1, state.range(0)};
  for (auto _ : state) {
    sf::EnumerationReport report = sf::enumerate_solutions(spec, X, window);
    benchmark::DoNotOptimize(report.vectors_scanned);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(window.q_max));
}
BENCHMARK(BM_enumerate_float)->Arg(16)->Arg(32)->Arg(64);

void BM_enumerate_exact(benchmark::State& state) {
  const sf::FormMatrix X = sf::parse_matrix_literal("1/2;1/3;1/4");
  const sf::ProblemSpec spec(3, 1, sf::Variant::Absolute, psi_tau(2.0));
  const sf::HeightWindow window{1, state.range(0)};
  for (auto _ : state) {
    sf::EnumerationReport report = sf::enumerate_solutions(spec, X, window);
    benchmark::DoNotOptimize(report.vectors_scanned);
  }
}
BENCHMARK(BM_enumerate_exact)->Arg(8)->Arg(16);

void BM_classify_partial_sums(benchmark::State& state) {
  const sf::CriterionSeries series(sf::CriterionKind::AbsoluteLebesgue, 3, 1,
                                   psi_tau(1.5));
  for (auto _ : state) {
    sf::SeriesVerdict verdict = sf::classify(series);
    benchmark::DoNotOptimize(verdict.partial_sums.back().sum);
  }
}
BENCHMARK(BM_classify_partial_sums);

void BM_decompose_lift(benchmark::State& state) {
  const sf::FormMatrix X = sf::parse_matrix_literal("1/2;1/3;1/4");
  const sf::ApproxFunction psi = psi_tau(2.0);
  const sf::IntegerVector r{{3, -2}};
  const sf::Rational eps(1, 10);
  const sf::Rational cap(2);
  for (auto _ : state) {
    sf::RestrictedMatrix rx = sf::decompose(X, eps, cap);
    sf::LiftCertificate cert = sf::lift_solution(rx, r, psi);
    benchmark::DoNotOptimize(cert.q_height);
  }
}
BENCHMARK(BM_decompose_lift);

void BM_box_count(benchmark::State& state) {
  sf::BoxCountPlan plan{sf::ProblemSpec(3, 1, sf::Variant::Absolute,
                                        psi_tau(4.0)),
                        {3, 4, static_cast<int>(state.range(0))},
                        1.0,
                        2.5,
                        1,
                        1'000'000'000ULL};
  for (auto _ : state) {
    sf::BoxCountResult result = sf::box_count_dimension(plan);
    benchmark::DoNotOptimize(result.slope);
  }
}
BENCHMARK(BM_box_count)->Arg(5)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
