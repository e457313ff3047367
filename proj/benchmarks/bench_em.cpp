#include <benchmark/benchmark.h>

#include "fsc/criteria.hpp"
#include "fsc/em.hpp"
#include "fsc/simulation.hpp"

namespace {

fsc::Split two_group_split(double percent) {
  fsc::Rng rng(11);
  const fsc::LabelledSample s = fsc::generate(fsc::Scenario::two_group_t(3.0), rng);
  return fsc::label_split(s, percent, rng);
}

void BM_EStep(benchmark::State& state) {
  const fsc::Split split = two_group_split(50);
  fsc::FitConfig cfg;
  cfg.weight.alpha = 0.5;
  const fsc::FitResult fit = fsc::fit(split.data, 2, fsc::Family::StudentT, {}, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(fsc::e_step(fit.model, split.data, cfg.weight));
}
BENCHMARK(BM_EStep);

void BM_Fit(benchmark::State& state) {
  const fsc::Split split = two_group_split(50);
  const auto family = state.range(0) == 0 ? fsc::Family::Gaussian : fsc::Family::StudentT;
  fsc::FitConfig cfg;
  cfg.weight.alpha = 0.6;
  for (auto _ : state) benchmark::DoNotOptimize(fsc::fit(split.data, 2, family, {}, cfg));
}
BENCHMARK(BM_Fit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Ari(benchmark::State& state) {
  fsc::Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  fsc::Partition a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<int>(rng.below(4));
    b[i] = static_cast<int>(rng.below(5));
  }
  for (auto _ : state) benchmark::DoNotOptimize(fsc::ari(a, b));
}
BENCHMARK(BM_Ari)->Arg(300)->Arg(30000);

}  // namespace

BENCHMARK_MAIN();
