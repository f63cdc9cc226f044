#include <benchmark/benchmark.h>

#include <vector>

#include "sublln/ambiguity.hpp"
#include "sublln/capacity.hpp"
#include "sublln/sequences.hpp"

using namespace sublln;

namespace {

const Distribution kPareto = Distribution::symmetric_pareto(1.9, 1.0);

void BM_ParetoDraw(benchmark::State& state) {
  std::uint64_t step = 0;
  double acc = 0.0;
  for (auto _ : state) {
    acc += sample(kPareto, 1, 0, ++step);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_ParetoDraw);

void BM_ExactDp(benchmark::State& state) {
  const AmbiguitySet theta({Distribution::bernoulli(0.3), Distribution::bernoulli(0.7)});
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ev = PathEvent::union_dev(0.2, 1.0, 0.7, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_upper_prob(theta, n, ev).value);
  }
}
BENCHMARK(BM_ExactDp)->Arg(8)->Arg(12)->Arg(16);

void BM_ChoquetPareto(benchmark::State& state) {
  const AmbiguitySet theta({kPareto, Distribution::scaled(kPareto, 0.5)});
  for (auto _ : state) {
    benchmark::DoNotOptimize(choquet_upper(theta, ChoquetTransform::abs_power(1.5)));
  }
}
BENCHMARK(BM_ChoquetPareto);

void BM_WalkPath(benchmark::State& state) {
  const AmbiguitySet theta({kPareto, Distribution::scaled(kPareto, 0.5)});
  const auto strategy = Strategy::threshold(1, 0, 0.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> scratch;
  std::uint64_t rep = 0;
  for (auto _ : state) {
    double last = 0.0;
    walk_path(theta, strategy, n, 7, ++rep, scratch, [&](std::size_t, double, double s, std::size_t) {
      last = s;
      return true;
    });
    benchmark::DoNotOptimize(last);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_WalkPath)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
