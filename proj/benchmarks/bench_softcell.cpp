#include <benchmark/benchmark.h>

#include <cstdint>

#include "softcell/channel.hpp"
#include "softcell/closedform.hpp"
#include "softcell/fading.hpp"
#include "softcell/logdet.hpp"
#include "softcell/lyapunov.hpp"
#include "softcell/markov.hpp"
#include "softcell/rng.hpp"

namespace {

using namespace softcell;

TridiagonalHermitian fixed_gram(std::size_t cells) {
  Rng rng(2024, 0);
  const FadingModel ray = FadingModel::rayleigh();
  const ChannelRealization ch = sample_channel(ray, ray, cells, 2, rng);
  return gram_tridiagonal(ch, 5.0);
}

// The two log-determinant routes over the same prebuilt matrix.  Both are
// linear in the number of cells; the recursion avoids the factorization
// scratch state and is the baseline the LDL route is checked against.
void BM_LogDetLdl(benchmark::State& state) {
  const TridiagonalHermitian gram = fixed_gram(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(logdet_ldl(gram));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogDetLdl)->Arg(128)->Arg(1024)->Arg(8192);

void BM_LogDetRecursion(benchmark::State& state) {
  const TridiagonalHermitian gram = fixed_gram(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(logdet_recursion(gram));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogDetRecursion)->Arg(128)->Arg(1024)->Arg(8192);

// Drawing an uplink realization and assembling its Gram matrix — the per-trial
// cost that dominates the capacity Monte Carlo.
void BM_ChannelGram(benchmark::State& state) {
  const FadingModel ray = FadingModel::rayleigh();
  const std::size_t cells = static_cast<std::size_t>(state.range(0));
  Rng rng(2024, 1);
  for (auto _ : state) {
    const ChannelRealization ch = sample_channel(ray, ray, cells, 2, rng);
    benchmark::DoNotOptimize(gram_tridiagonal(ch, 5.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ChannelGram)->Arg(128)->Arg(1024);

// One coupled ladder rung (order 8, two user groups): runs the interference
// chain from both extreme starts over shared draws and scores a shared probe.
void BM_OffsetLadderRung(benchmark::State& state) {
  const FadingModel ray = FadingModel::rayleigh();
  const std::uint64_t trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(offset_bounds(ray, ray, 2, 8, trials, 7, true, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OffsetLadderRung)->Arg(64)->Unit(benchmark::kMicrosecond);

// Closed-form time-sharing rate; the quadrature adapts to the power, so the
// cost is power-dependent.
void BM_TdmaRateClosedForm(benchmark::State& state) {
  const double power = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rate_tdma_rayleigh(power));
  }
}
BENCHMARK(BM_TdmaRateClosedForm)->Arg(1)->Arg(100)->Arg(1000000);

// One renormalized transfer-cocycle replicate: draw the realization, run the
// shifted recurrence across it, accumulate the companion log sum.
void BM_LyapunovRecurrence(benchmark::State& state) {
  const FadingModel ray = FadingModel::rayleigh();
  const std::uint64_t steps = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(recurrence_logx(ray, ray, -0.1, steps, seed++));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LyapunovRecurrence)->Arg(512)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
