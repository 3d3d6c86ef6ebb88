#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "strata/curves.hpp"
#include "strata/metrics.hpp"
#include "strata/uncertainty.hpp"

namespace {

struct Data {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

Data make(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::bernoulli_distribution pos(0.3);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    const bool y = pos(rng);
    d.labels.push_back(y);
    d.scores.push_back(1.0 / (1.0 + std::exp(-(y ? 1.5 : 0.0) - z(rng))));
  }
  return d;
}

// Quadratic pair count, the baseline the rank formula replaces.
double auroc_pairwise(const Data& d) {
  double hits = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < d.scores.size(); ++i) {
    if (!d.labels[i]) continue;
    for (std::size_t j = 0; j < d.scores.size(); ++j) {
      if (d.labels[j]) continue;
      hits += d.scores[i] > d.scores[j] ? 1.0 : d.scores[i] == d.scores[j] ? 0.5 : 0.0;
      ++pairs;
    }
  }
  return hits / pairs;
}

void BM_AurocRank(benchmark::State& state) {
  const auto d = make(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(strata::auroc(d.scores, d.labels));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AurocRank)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oNLogN);

void BM_AurocPairwise(benchmark::State& state) {
  const auto d = make(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(auroc_pairwise(d));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AurocPairwise)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oNSquared);

void BM_Delong(benchmark::State& state) {
  const auto d = make(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(strata::delong_variance(d.scores, d.labels));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Delong)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oNLogN);

void BM_Pauprg(benchmark::State& state) {
  const auto d = make(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(strata::pauprg(d.scores, d.labels, 0.2));
}
BENCHMARK(BM_Pauprg)->Arg(1000)->Arg(10000);

void BM_Drmsce(benchmark::State& state) {
  const auto d = make(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(strata::drmsce(d.scores, d.labels, 15));
}
BENCHMARK(BM_Drmsce)->Arg(1000)->Arg(10000);

}  // namespace
