#include <benchmark/benchmark.h>

#include "fairaudit/inference.hpp"
#include "synthetic.hpp"

namespace fairaudit {
namespace {

void BM_BootstrapReplicates(benchmark::State& state) {
  const auto ds = bench::synthetic_dataset(static_cast<std::size_t>(state.range(0)));
  BootstrapConfig cfg;
  cfg.iterations = 200;
  cfg.seed = 42;
  cfg.workers = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(BootstrapReplicates::run(ds, {"A", "B"}, cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 200);
}
BENCHMARK(BM_BootstrapReplicates)
    ->ArgsProduct({{1 << 10, 1 << 14}, {1, 0}})
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fairaudit
