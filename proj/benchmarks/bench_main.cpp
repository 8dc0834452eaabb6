#include <benchmark/benchmark.h>

#include <vector>

#include "geophase/ga.hpp"
#include "geophase/optics.hpp"
#include "geophase/phase.hpp"
#include "geophase/scan.hpp"

using namespace geophase;

namespace {

SetupTemplate bent_template() {
  SetupTemplate t;
  t.imperfections = {{0.5, 20 * kArcsec}, {2.0, 28 * kArcsec}, {4.0, 12 * kArcsec}};
  return t;
}

}  // namespace

static void BM_ProtocolAmplitude(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  double theta = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(protocol_amplitude(n, 0.8, theta));
    theta = theta < 3.0 ? theta + 1e-3 : 0.1;
  }
}
BENCHMARK(BM_ProtocolAmplitude)->Arg(1)->Arg(3)->Arg(6);

static void BM_ChiOfTheta(benchmark::State& state) {
  const ProtocolFamily f = ProtocolFamily::uniform(3, 0.9, 721);
  for (auto _ : state) benchmark::DoNotOptimize(chi_of_theta(f));
}
BENCHMARK(BM_ChiOfTheta)->Unit(benchmark::kMillisecond);

static void BM_ReadoutIdeal(benchmark::State& state) {
  SetupTemplate t;
  t.n_stages = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(t.amplitude(0.6));
}
BENCHMARK(BM_ReadoutIdeal)->Arg(1)->Arg(3)->Arg(6);

static void BM_ReadoutDeflected(benchmark::State& state) {
  const SetupTemplate t = bent_template();
  for (auto _ : state) benchmark::DoNotOptimize(t.amplitude(0.6));
}
BENCHMARK(BM_ReadoutDeflected);

static void BM_Overlap(benchmark::State& state) {
  OpticsConfig c;
  Setup s = Setup::uniform(c, static_cast<std::size_t>(state.range(0)), 0.5);
  for (std::size_t j = 0; j < s.stages.size(); ++j) s.stages[j].beta = (10.0 + j) * kArcsec;
  const BeamField in = BeamField::gaussian(c, 1.0, 0.0);
  const BeamField out = propagate(s, in);
  for (auto _ : state) benchmark::DoNotOptimize(overlap(out, out));
  state.counters["terms"] = static_cast<double>(out.size());
}
BENCHMARK(BM_Overlap)->Arg(2)->Arg(4)->Arg(6);

static void BM_ChiCurve(benchmark::State& state) {
  SetupTemplate t;
  for (auto _ : state) benchmark::DoNotOptimize(chi_curve_vs_alpha(t, 0.7));
}
BENCHMARK(BM_ChiCurve)->Unit(benchmark::kMillisecond);

static void BM_GaLoss(benchmark::State& state) {
  const SetupTemplate t;
  ImperfectionGenome truth;
  truth.set(0, 0.5, 20 * kArcsec);
  truth.set(1, 2.0, 28 * kArcsec);
  truth.set(2, 4.0, 12 * kArcsec);
  std::vector<ExperimentRecord> at;
  for (double w : {0.6, 0.9, 1.2, 1.8}) {
    for (int i = 0; i < 16; ++i) at.push_back({w, kPi / 2 * i / 15, 0.0, 0.0, 1.0});
  }
  const auto data = simulate_records(truth, at, t);
  const ImperfectionGenome guess = ImperfectionGenome::ideal();
  for (auto _ : state) benchmark::DoNotOptimize(loss(guess, data, t));
}
BENCHMARK(BM_GaLoss)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
