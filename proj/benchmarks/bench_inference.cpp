#include <random>

#include <benchmark/benchmark.h>

#include "strata/inference.hpp"
#include "strata/uncertainty.hpp"

namespace {

strata::Sample make(std::size_t n, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::bernoulli_distribution pos(0.4);
  strata::Sample s;
  for (std::size_t i = 0; i < n; ++i) {
    const bool y = pos(rng);
    s.labels.push_back(y);
    s.scores.push_back(1.0 / (1.0 + std::exp(-(y ? shift : 0.0) - z(rng))));
  }
  return s;
}

void BM_BootstrapAuroc(benchmark::State& state) {
  const auto s = make(state.range(0), 1.0, 1);
  strata::CiConfig cfg;
  cfg.n_boot = 1000;
  const strata::Evaluator metric = [](const strata::SampleView& v) { return strata::auroc(v.scores, v.labels); };
  for (auto _ : state) benchmark::DoNotOptimize(strata::bootstrap_ci(metric, s, cfg, true));
}
BENCHMARK(BM_BootstrapAuroc)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_PermutationTest(benchmark::State& state) {
  const auto a = make(state.range(0), 1.0, 2);
  const auto b = make(state.range(0) * 3, 1.2, 3);
  strata::PermutationConfig cfg;
  cfg.n_perm = 500;
  const auto metric = strata::MetricId::parse(state.range(1) ? "auroc" : "accuracy");
  for (auto _ : state) {
    benchmark::DoNotOptimize(strata::studentized_permutation_test(metric, a, b, {}, cfg));
  }
}
BENCHMARK(BM_PermutationTest)->Args({200, 0})->Args({200, 1})->Args({2000, 1})->Unit(benchmark::kMillisecond);

void BM_Holm(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(1e-6, 1.0);
  std::vector<double> p(state.range(0));
  for (auto& v : p) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(strata::holm_bonferroni(p));
}
BENCHMARK(BM_Holm)->Arg(16)->Arg(1024);

}  // namespace
