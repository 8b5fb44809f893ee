#include <benchmark/benchmark.h>

#include <gazeguard/embedding.hpp>
#include <gazeguard/mechanisms.hpp>
#include <gazeguard/rng.hpp>
#include <gazeguard/stream_ops.hpp>
#include <gazeguard/types.hpp>
#include <gazeguard/wavelet.hpp>

namespace {

using namespace gazeguard;

GazeStream make_stream(std::size_t n, double rate_hz) {
  Rng rng(12345);
  GazeStream s;
  s.nominal_rate_hz = rate_hz;
  s.user_id = "bench";
  s.samples.reserve(n);
  double theta = 0.0;
  double psi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    theta = 0.98 * theta + rng.normal(0.0, 0.8);
    psi = 0.98 * psi + rng.normal(0.0, 0.8);
    s.samples.push_back({theta, psi, static_cast<double>(i) / rate_hz});
  }
  return s;
}

const GazeStream& bench_stream() {
  static const GazeStream s = make_stream(1 << 16, 125.0);
  return s;
}

void run_mechanism(benchmark::State& state, const MechanismConfig& config) {
  const GazeStream& input = bench_stream();
  for (auto _ : state) {
    GazeStream out = privatize_stream(input, config, 1);
    benchmark::DoNotOptimize(out.samples.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(input.size()));
}

void BM_Gaussian(benchmark::State& state) {
  run_mechanism(state, MechanismConfig::gaussian(
                           static_cast<double>(state.range(0))));
}
BENCHMARK(BM_Gaussian)->Arg(1)->Arg(3)->Arg(20);

void BM_Temporal(benchmark::State& state) {
  run_mechanism(state, MechanismConfig::temporal(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Temporal)->Arg(3)->Arg(30);

void BM_Spatial(benchmark::State& state) {
  run_mechanism(state, MechanismConfig::spatial(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Spatial)->Arg(48)->Arg(144)->Arg(256);

void BM_Smoothing(benchmark::State& state) {
  run_mechanism(state, MechanismConfig::smoothing(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Smoothing)->Arg(15)->Arg(150)->Arg(300);

void BM_Segment(benchmark::State& state) {
  const GazeStream& input = bench_stream();
  for (auto _ : state) {
    auto segments = segment(input);
    benchmark::DoNotOptimize(segments.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(input.size()));
}
BENCHMARK(BM_Segment);

void BM_EmbedStatistical(benchmark::State& state) {
  const Segment seg = segment(bench_stream()).front();
  for (auto _ : state) {
    Embedding e = embed_statistical(seg);
    benchmark::DoNotOptimize(e.values.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(seg.length()));
}
BENCHMARK(BM_EmbedStatistical);

void BM_WaveletDenoise(benchmark::State& state) {
  const GazeStream noisy = privatize_stream(
      bench_stream(), MechanismConfig::gaussian(3.0), 2);
  for (auto _ : state) {
    GazeStream out = wavelet_denoise(noisy);
    benchmark::DoNotOptimize(out.samples.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(noisy.size()));
}
BENCHMARK(BM_WaveletDenoise);

}  // namespace

BENCHMARK_MAIN();
