#include <benchmark/benchmark.h>

#include <vector>

#include "maxstable/generator.hpp"
#include "maxstable/identities.hpp"
#include "maxstable/sampling.hpp"
#include "maxstable/semigroup.hpp"

using namespace maxstable;

static void BM_SampleMaxStable(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const MaxStableLaw law(1.0, standard_measure(d, MeasureKind::mixture, 0.3));
  Rng rng(RngSpec{1, 0});
  std::vector<double> z(d);
  for (auto _ : state) {
    sample_max_stable(law, rng, z);
    benchmark::DoNotOptimize(z.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleMaxStable)->Arg(1)->Arg(3)->Arg(8);

static void BM_Semigroup1d(benchmark::State& state) {
  const auto f = catalog::atanlog();
  for (auto _ : state) benchmark::DoNotOptimize(semigroup_1d(1.0, f, 0.5, 1.7));
}
BENCHMARK(BM_Semigroup1d);

static void BM_SemigroupIndicator(benchmark::State& state) {
  const auto f = catalog::indicator(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(semigroup_1d(1.0, f, 0.5, 1.7));
}
BENCHMARK(BM_SemigroupIndicator);

static void BM_MehlerMc(benchmark::State& state) {
  const MaxStableLaw law(1.0, standard_measure(2, MeasureKind::independence));
  const std::vector<double> x{1.0, 2.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mehler_mc(law, catalog::sum_of_logs(2), 0.5, x, 10000, RngSpec{2, 0}).value);
  }
}
BENCHMARK(BM_MehlerMc)->Unit(benchmark::kMillisecond);

static void BM_Generator(benchmark::State& state) {
  const GeneratorContext ctx(MaxStableLaw(1.0, standard_measure(1, MeasureKind::independence)));
  const auto f = catalog::inv1p();
  for (auto _ : state) benchmark::DoNotOptimize(generator(ctx, f, 1.3));
}
BENCHMARK(BM_Generator);

static void BM_FrechetExpectation(benchmark::State& state) {
  const auto f = catalog::ratio();
  for (auto _ : state) benchmark::DoNotOptimize(frechet_expectation(1.0, f));
}
BENCHMARK(BM_FrechetExpectation);

static void BM_PoincareCheck(benchmark::State& state) {
  const auto f = catalog::atanlog();
  for (auto _ : state) benchmark::DoNotOptimize(verify_poincare_1d(1.0, f).slack());
}
BENCHMARK(BM_PoincareCheck)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
