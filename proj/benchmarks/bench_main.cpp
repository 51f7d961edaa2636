#include <benchmark/benchmark.h>

#include "readsort/builtin_codec.hpp"
#include "readsort/classification.hpp"
#include "readsort/read_filter.hpp"
#include "readsort/simulator.hpp"

using namespace readsort;

namespace {

const SimulatedReads& dataset() {
  static const SimulatedReads sim = [] {
    const auto db = gen_references(4, 20000, 1);
    SimConfig cfg;
    cfg.coverage = 20;
    cfg.seed = 2;
    return simulate_reads(db.entries, cfg);
  }();
  return sim;
}

std::int64_t bases() {
  std::int64_t n = 0;
  for (const auto& r : dataset().records) n += static_cast<std::int64_t>(r.sequence.size());
  return n;
}

void BM_TrainEnsemble(benchmark::State& state) {
  const auto reads = map_reads(dataset().records, 0);
  for (auto _ : state) {
    ModelEnsemble ens;
    for (const auto& r : reads) ens.train(r);
    benchmark::DoNotOptimize(ens.size());
  }
  state.SetBytesProcessed(state.iterations() * bases());
}
BENCHMARK(BM_TrainEnsemble)->Unit(benchmark::kMillisecond);

void BM_ScoreReads(benchmark::State& state) {
  const auto ref = to_symbols(gen_genome(20000, 1));
  const auto model = train_reference_model(ref, {});
  const auto reads = map_reads(dataset().records, 0);
  for (auto _ : state) {
    double total = 0;
    for (const auto& r : reads) total += model.code_length(r);
    benchmark::DoNotOptimize(total);
  }
  state.SetBytesProcessed(state.iterations() * bases());
}
BENCHMARK(BM_ScoreReads)->Unit(benchmark::kMillisecond);

void BM_SequenceStream(benchmark::State& state) {
  const auto ens = CodecConfig::default_dna_ensemble();
  for (auto _ : state) benchmark::DoNotOptimize(encode_sequence_stream(dataset().records, ens));
  state.SetBytesProcessed(state.iterations() * bases());
}
BENCHMARK(BM_SequenceStream)->Unit(benchmark::kMillisecond);

void BM_QualityStream(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(encode_quality_stream(dataset().records));
  state.SetBytesProcessed(state.iterations() * bases());
}
BENCHMARK(BM_QualityStream)->Unit(benchmark::kMillisecond);

void BM_HeaderStream(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(encode_header_stream(dataset().records));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dataset().records.size()));
}
BENCHMARK(BM_HeaderStream)->Unit(benchmark::kMillisecond);

void BM_Decompress(benchmark::State& state) {
  const auto blob = builtin_compress(dataset().records);
  for (auto _ : state) benchmark::DoNotOptimize(builtin_decompress(blob));
  state.SetBytesProcessed(state.iterations() * bases());
}
BENCHMARK(BM_Decompress)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
