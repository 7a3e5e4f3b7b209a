// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <vector>

#include "lpp/busemann.hpp"
#include "lpp/lattice.hpp"

namespace {

const lpp::WeightLaw kExp(lpp::Exponential{1});

void BM_PassageRows(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = lpp::WeightGrid::generate(kExp, n, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lpp::passage_field(grid));
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_PassageWavefront(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = lpp::WeightGrid::generate(kExp, n, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lpp::passage_field_wavefront(grid));
  state.SetItemsProcessed(state.iterations() * n * n);
}

lpp::ShapeOptions shape_options(int n) {
  lpp::ShapeOptions opts;
  opts.N = n;
  opts.replicas = 8;
  opts.x_grid = lpp::interior_grid(9);
  return opts;
}

void BM_ShapeSerial(benchmark::State& state) {
  const auto opts = shape_options(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lpp::shape_profile_serial(kExp, opts));
}

void BM_ShapeParallel(benchmark::State& state) {
  const auto opts = shape_options(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lpp::shape_profile(kExp, opts));
}

const std::vector<lpp::Point> kQueries{{0, 0}, {1, 0}, {0, 1}};

lpp::BusemannOptions busemann_options(int n) {
  lpp::BusemannOptions opts;
  opts.n = n;
  opts.replicas = 64;
  return opts;
}

void BM_BusemannSerial(benchmark::State& state) {
  const auto opts = busemann_options(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(lpp::busemann_replicas_serial(kExp, opts, 0, kQueries));
}

void BM_BusemannParallel(benchmark::State& state) {
  const auto opts = busemann_options(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(lpp::busemann_replicas(kExp, opts, 0, kQueries));
}

}  // namespace

BENCHMARK(BM_PassageRows)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PassageWavefront)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShapeSerial)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShapeParallel)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BusemannSerial)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BusemannParallel)->Arg(400)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
