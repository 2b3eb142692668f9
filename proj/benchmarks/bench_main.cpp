// Microbenchmarks for the hot paths: Viterbi decoding, Procrustes solves,
// CSLS cache construction, assignment, and k-NN scans.
//
//   cmake --build build && ./build/benchmarks/xlingevent_bench

#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "xlingevent/align.hpp"
#include "xlingevent/bio.hpp"
#include "xlingevent/csls.hpp"
#include "xlingevent/embedding.hpp"
#include "xlingevent/metrics.hpp"
#include "xlingevent/rng.hpp"

namespace {

using namespace xlingevent;

double gaussian(Rng& rng) {
  double u1 = rng.next_double();
  while (u1 <= 0.0) u1 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * M_PI * rng.next_double());
}

EmbeddingSpace random_space(std::size_t n, int d, std::uint64_t seed,
                            const std::string& prefix) {
  Rng rng(seed);
  EmbeddingSpace space;
  space.dim = d;
  space.words.reserve(n);
  space.matrix.reserve(n * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    space.words.push_back(prefix + std::to_string(i));
    space.index.emplace(space.words.back(), static_cast<std::int32_t>(i));
    for (int j = 0; j < d; ++j)
      space.matrix.push_back(static_cast<float>(gaussian(rng)));
  }
  return normalize_rows(std::move(space));
}

MappingMatrix random_rotation(int d, std::uint64_t seed) {
  // Procrustes on a rotated copy yields an orthogonal map to benchmark with.
  const auto src = random_space(static_cast<std::size_t>(2 * d), d, seed, "w");
  SeedDictionary dict;
  for (const auto& w : src.words) dict.pairs.emplace_back(w, w);
  return procrustes_solve(src, src, dict);
}

void BM_ViterbiDecode(benchmark::State& state) {
  const auto scheme = BioScheme::default_scheme();
  const auto mask = build_transition_mask(scheme);
  const int T = static_cast<int>(state.range(0));
  Rng rng(1);
  EmissionMatrix em;
  em.length = T;
  em.num_labels = scheme.num_labels();
  em.scores.resize(static_cast<std::size_t>(T) * em.num_labels);
  for (double& v : em.scores) v = rng.next_uniform(-5.0, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(viterbi_decode(em, mask));
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_ViterbiDecode)->Arg(16)->Arg(64)->Arg(256);

void BM_ProcrustesSolve(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto src = random_space(static_cast<std::size_t>(2 * d), d, 2, "w");
  SeedDictionary dict;
  for (const auto& w : src.words) dict.pairs.emplace_back(w, w);
  for (auto _ : state)
    benchmark::DoNotOptimize(procrustes_solve(src, src, dict));
}
BENCHMARK(BM_ProcrustesSolve)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_CslsIndexBuild(benchmark::State& state) {
  const int d = 32;
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto src = random_space(n, d, 3, "s");
  const auto tgt = random_space(n, d, 4, "t");
  const MappingMatrix w = random_rotation(d, 5);
  for (auto _ : state)
    benchmark::DoNotOptimize(CslsIndex(src, tgt, w, {10}));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_CslsIndexBuild)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_KnnCosine(benchmark::State& state) {
  const int d = 100;
  const auto space = random_space(static_cast<std::size_t>(state.range(0)), d,
                                  6, "w");
  for (auto _ : state)
    benchmark::DoNotOptimize(knn_cosine(space, space.row(0), 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KnnCosine)->Arg(10000)->Arg(50000);

void BM_MaxWeightMatching(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(7);
  std::vector<double> weights(static_cast<std::size_t>(n) * n);
  for (double& v : weights) v = rng.next_double();
  for (auto _ : state)
    benchmark::DoNotOptimize(max_weight_matching(weights, n, n));
}
BENCHMARK(BM_MaxWeightMatching)->Arg(16)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
