#include <benchmark/benchmark.h>

#include "qpb/camera.hpp"
#include "qpb/metrology.hpp"
#include "qpb/photon_stats.hpp"
#include "qpb/turbulence.hpp"

namespace {

void BM_DsvPmf(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qpb::pmf(qpb::DisplacedSqueezed{alpha, 0.3, 1.0, 0.0}));
}
BENCHMARK(BM_DsvPmf)->Arg(2)->Arg(10)->Arg(50);

void BM_OptimizePhi(benchmark::State& state) {
  const auto cfg = qpb::su11_standard(16, 4, 2, 2);
  const auto det = state.range(0) ? qpb::Detection::OnOff : qpb::Detection::Parity;
  for (auto _ : state) benchmark::DoNotOptimize(qpb::optimize_phi(cfg, det));
}
BENCHMARK(BM_OptimizePhi)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SimulateFrames(benchmark::State& state) {
  qpb::CameraConfig cfg;
  cfg.frames = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(qpb::simulate_frames(cfg));
}
BENCHMARK(BM_SimulateFrames)->Unit(benchmark::kMillisecond);

void BM_KolmogorovScreen(benchmark::State& state) {
  qpb::TurbulenceSpec spec;
  spec.cn2 = qpb::cn2_from_paper_units(60);
  const int n = static_cast<int>(state.range(0));
  const qpb::GridSpec grid{n, n, 8e-3};
  std::uint64_t s = 0;
  for (auto _ : state) benchmark::DoNotOptimize(qpb::kolmogorov_screen(spec, grid, 1, s++));
}
BENCHMARK(BM_KolmogorovScreen)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_GdoIteration(benchmark::State& state) {
  const qpb::GridSpec grid{256, 256, 8e-3};
  qpb::TurbulenceSpec spec;
  spec.cn2 = qpb::cn2_from_paper_units(60);
  const auto target = qpb::lg_field({3, 0, {}}, grid);
  const qpb::FresnelPropagator prop(grid, 633e-9, 2.5);
  const auto scr = qpb::kolmogorov_screen(spec, grid, 1);
  const auto obs = qpb::observe_intensity(target, scr.phase, prop);
  const qpb::Grid2D<double> zero(grid.rows, grid.cols, 0.0);
  qpb::GdoOptions opts;
  opts.max_iter = 1;
  for (auto _ : state) benchmark::DoNotOptimize(qpb::gdo_correct(obs, target, prop, zero, opts));
}
BENCHMARK(BM_GdoIteration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
