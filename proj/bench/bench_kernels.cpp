#include <benchmark/benchmark.h>
#include <omp.h>

#include <vector>

#include "aplclt/count.hpp"
#include "aplclt/stats.hpp"
#include "aplclt/subset.hpp"

using namespace aplclt;

namespace {

std::vector<SubsetSample> subsets(std::uint32_t n, int count) {
  const auto prm = APParams::make(n, 3);
  RandomStream rs(1, n);
  std::vector<SubsetSample> out;
  for (int i = 0; i < count; ++i) out.push_back(sample_subset(prm, 0.5, rs));
  return out;
}

template <std::uint64_t (*Kernel)(const SubsetSample&, const APParams&)>
void BM_count(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  const auto prm = APParams::make(n, 3);
  const auto input = subsets(n, 64);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Kernel(input[i++ % input.size()], prm));
  }
  state.SetItemsProcessed(state.iterations());
}

ExperimentConfig mc_config(std::int64_t samples) {
  ExperimentConfig cfg;
  cfg.num_samples = static_cast<std::uint64_t>(samples);
  cfg.shards = omp_get_max_threads();
  return cfg;
}

void BM_mc_serial(benchmark::State& state) {
  const auto cfg = mc_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_mc_serial(cfg).summary.mean);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_mc_openmp(benchmark::State& state) {
  const auto cfg = mc_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_mc(cfg).summary.mean);
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = cfg.shards;
}

}  // namespace

BENCHMARK_TEMPLATE(BM_count, count_kap_scalar)->Arg(101)->Arg(1001);
BENCHMARK_TEMPLATE(BM_count, count_kap_naive)->Arg(101)->Arg(1001);
BENCHMARK_TEMPLATE(BM_count, count_3ap_convolution)->Arg(101)->Arg(1001);
BENCHMARK(BM_mc_serial)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_openmp)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
