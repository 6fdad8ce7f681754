// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include "bioremed/search.hpp"
#include "bioremed/value.hpp"

using namespace bioremed;

namespace {

const GrowthModel kMonod = GrowthModel::monod(1.0, 1.0);

ReducedParams params_with(double d) { return {0.3, d, 1.0}; }

template <bool Parallel>
void BM_ValueGridVd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GridDomain dom{0, 5, 0, 5, n, n};
  const auto p = params_with(1.0);
  for (auto _ : state) {
    auto grid = Parallel ? value_grid(ValueKind::vd, dom, p, kMonod) : value_grid_serial(ValueKind::vd, dom, p, kMonod);
    benchmark::DoNotOptimize(grid.values.data());
  }
  state.counters["nodes"] = static_cast<double>(n * n);
}

template <bool Parallel>
void BM_BestConstant(benchmark::State& state) {
  ConstantSearchConfig cfg;
  cfg.grid = static_cast<std::size_t>(state.range(0));
  const auto p = params_with(0.1);
  for (auto _ : state) {
    auto res = Parallel ? best_constant_search({4, 1.5}, p, kMonod, cfg)
                        : best_constant_search_serial({4, 1.5}, p, kMonod, cfg);
    benchmark::DoNotOptimize(res.t_f);
  }
}

}  // namespace

BENCHMARK(BM_ValueGridVd<false>)->Name("value_grid_vd/serial")->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ValueGridVd<true>)->Name("value_grid_vd/openmp")->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BestConstant<false>)->Name("best_constant/serial")->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BestConstant<true>)->Name("best_constant/openmp")->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
