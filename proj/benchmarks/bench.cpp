#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "taxalign/analysis.hpp"
#include "taxalign/engine.hpp"
#include "taxalign/parser.hpp"
#include "taxalign/synthetic.hpp"
#include "taxalign/viz.hpp"

using namespace taxalign;

namespace {

Alignment synthetic(int depth, SyntheticPattern pattern) {
  SyntheticSpec spec;
  spec.depth = depth;
  spec.pattern = pattern;
  return generate_synthetic(spec);
}

Alignment bundled(const char* name) {
  std::ifstream in(std::string(TAXALIGN_DATA_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  auto parsed = parse_alignment(ss.str());
  if (!parsed.alignment) throw std::runtime_error(std::string("cannot parse ") + name);
  return *parsed.alignment;
}

void BM_CheckIncluded(benchmark::State& state) {
  Alignment a = synthetic(static_cast<int>(state.range(0)), SyntheticPattern::kIncluded);
  for (auto _ : state) benchmark::DoNotOptimize(check_consistency(a).consistent);
  state.counters["concepts"] = static_cast<double>(a.first.size());
}
BENCHMARK(BM_CheckIncluded)->DenseRange(3, 7)->Unit(benchmark::kMillisecond);

void BM_CheckCongruent(benchmark::State& state) {
  Alignment a = synthetic(static_cast<int>(state.range(0)), SyntheticPattern::kCongruent);
  for (auto _ : state) benchmark::DoNotOptimize(check_consistency(a).consistent);
}
BENCHMARK(BM_CheckCongruent)->DenseRange(3, 7)->Unit(benchmark::kMillisecond);

void BM_EnumerateIncluded(benchmark::State& state) {
  Alignment a = synthetic(static_cast<int>(state.range(0)), SyntheticPattern::kIncluded);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_worlds(a).worlds.worlds.size());
}
BENCHMARK(BM_EnumerateIncluded)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_EnumerateBundled(benchmark::State& state) {
  Alignment a = bundled("running_example_repaired.txt");
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_worlds(a).worlds.worlds.size());
}
BENCHMARK(BM_EnumerateBundled)->Unit(benchmark::kMicrosecond);

void BM_DiagnoseBundled(benchmark::State& state) {
  Alignment a = bundled("running_example.txt");
  for (auto _ : state) benchmark::DoNotOptimize(diagnose(a).mus.size());
}
BENCHMARK(BM_DiagnoseBundled)->Unit(benchmark::kMillisecond);

void BM_NextQuestion(benchmark::State& state) {
  auto ws = std::make_shared<const WorldSet>(enumerate_worlds(bundled("running_example_repaired.txt")).worlds);
  ReductionSession session(ws);
  for (auto _ : state) benchmark::DoNotOptimize(session.next_question());
}
BENCHMARK(BM_NextQuestion)->Unit(benchmark::kMicrosecond);

void BM_BuildRcg(benchmark::State& state) {
  Alignment a = synthetic(static_cast<int>(state.range(0)), SyntheticPattern::kIncluded);
  World w = enumerate_worlds(a).worlds.worlds.at(0);
  for (auto _ : state) benchmark::DoNotOptimize(build_rcg(w, a).edges.size());
}
BENCHMARK(BM_BuildRcg)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
