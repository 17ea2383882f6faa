#include <benchmark/benchmark.h>

#include "ideoemb/generator.hpp"
#include "ideoemb/trainer.hpp"

namespace {

using namespace ideoemb;

const Dataset& dataset() {
  static const Dataset ds = [] {
    GenConfig cfg;
    cfg.items = 10000;
    return generate_dataset(cfg);
  }();
  return ds;
}

std::vector<ItemId> all_items() {
  std::vector<ItemId> ids(dataset().items.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<ItemId>(i);
  return ids;
}

void BM_EpochExamples(benchmark::State& state) {
  const auto& ds = dataset();
  const auto ids = all_items();
  TrainConfig cfg;
  std::size_t epoch = 0;
  for (auto _ : state) benchmark::DoNotOptimize(epoch_examples(ds.graph, ds.log, ids, cfg, 0, epoch++).size());
}
BENCHMARK(BM_EpochExamples)->Unit(benchmark::kMillisecond);

// One epoch of updates over a fixed example draw.
void BM_AdaGradEpoch(benchmark::State& state) {
  const auto& ds = dataset();
  const auto ids = all_items();
  TrainConfig cfg;
  const auto examples = epoch_examples(ds.graph, ds.log, ids, cfg, 0, 0);
  EmbeddingTable emb(ds.graph.node_count(), 4);
  AdaGradAscent opt(ds.graph.node_count(), 4, cfg.clamp_eps);
  for (auto _ : state)
    for (const auto& x : examples) opt.update(x, ds.items[x.item].gamma(), emb, 0.05);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(examples.size()));
}
BENCHMARK(BM_AdaGradEpoch)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  const auto& ds = dataset();
  TrainConfig cfg;
  cfg.epochs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit(ds.graph, ds.items, ds.log, cfg).best_restart);
}
BENCHMARK(BM_Fit)->Arg(5)->ArgNames({"epochs"})->Unit(benchmark::kMillisecond);

}  // namespace
