#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "fairaudit/dataset.hpp"
#include "synthetic.hpp"

namespace fairaudit {
namespace {

void BM_LoadCsv(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto path = std::filesystem::temp_directory_path() /
                    ("fairaudit_bench_" + std::to_string(::getpid()) + ".csv");
  {
    std::ofstream out(path);
    out << "group,outcome,score,age\n";
    std::size_t i = 0;
    for (const auto& r : bench::synthetic_records(n)) {
      out << r.group << ',' << r.outcome << ',' << *r.score << ',' << 20 + i++ % 60 << '\n';
    }
  }
  Schema schema;
  schema.outcome = "outcome";
  schema.score = "score";
  schema.group = "group";
  schema.covariates = {"age"};
  for (auto _ : state) benchmark::DoNotOptimize(load_csv(path, schema));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  std::filesystem::remove(path);
}
BENCHMARK(BM_LoadCsv)->Range(1 << 10, 1 << 17)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fairaudit
