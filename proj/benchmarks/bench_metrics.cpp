#include <benchmark/benchmark.h>

#include "fairaudit/fairness.hpp"
#include "fairaudit/metrics.hpp"
#include "synthetic.hpp"

namespace fairaudit {
namespace {

void BM_ConfusionCounts(benchmark::State& state) {
  const auto records = bench::synthetic_records(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(confusion_counts(records));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConfusionCounts)->Range(1 << 10, 1 << 20);

void BM_GroupMetrics(benchmark::State& state) {
  const auto ds = bench::synthetic_dataset(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(group_metrics(ds, "A"));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GroupMetrics)->Range(1 << 10, 1 << 18);

void BM_EvaluateAll(benchmark::State& state) {
  const auto ds = bench::synthetic_dataset(static_cast<std::size_t>(state.range(0)));
  EvaluationOptions opt;
  opt.criteria.assign(kAllCriteria.begin(), kAllCriteria.end());
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_all(ds, "A", "B", opt));
}
BENCHMARK(BM_EvaluateAll)->Range(1 << 10, 1 << 18);

}  // namespace
}  // namespace fairaudit
