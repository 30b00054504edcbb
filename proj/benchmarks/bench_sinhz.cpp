#include <benchmark/benchmark.h>

#include "sinhz/levy.hpp"
#include "sinhz/payoffs.hpp"
#include "sinhz/pricing.hpp"
#include "sinhz/wh.hpp"
#include "sinhz/zinv.hpp"

namespace {

using sinhz::cplx;

sinhz::TransformEvaluator pole_at_one() {
  sinhz::TransformEvaluator V;
  V.eval = [](const cplx& q) { return 1.0 / (1.0 - q); };
  return V;
}

sinhz::LevyModel kobol() { return sinhz::LevyModel::kobol(sinhz::KoBoLParams{0.3, 0.3, 0.5, 0.5, -8.0, 8.0, 0.0}); }

void BM_GainFactor(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sinhz::gain_factor(1e-15, n, 23.0));
}
BENCHMARK(BM_GainFactor)->Arg(1260)->Arg(7560);

void BM_InvertTrapezoid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto V = pole_at_one();
  const auto plan = sinhz::choose_trap_params(1e-12, n, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(sinhz::invert_trapezoid(V, n, plan).value());
  state.counters["nodes"] = plan.N;
}
BENCHMARK(BM_InvertTrapezoid)->Arg(100)->Arg(1260);

void BM_InvertSinh(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto V = pole_at_one();
  const auto plan = sinhz::choose_sinh_params(V, 1e-12, n, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(sinhz::invert_sinh(V, n, plan).value());
  state.counters["nodes"] = plan.predicted_terms;
}
BENCHMARK(BM_InvertSinh)->Arg(100)->Arg(1260);

void BM_WienerHopfFactors(benchmark::State& state) {
  const sinhz::WHContext ctx(kobol(), 0.5, sinhz::FlatLine{-0.45}, sinhz::FlatLine{0.45});
  double xi = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sinhz::wh_plus(ctx, cplx(xi, 0.0)));
    benchmark::DoNotOptimize(sinhz::wh_minus(ctx, cplx(xi, 0.0)));
    xi += 0.01;
  }
}
BENCHMARK(BM_WienerHopfFactors);

void BM_PriceEuropeanSymmetric(benchmark::State& state) {
  sinhz::PricingRequest req(kobol(), sinhz::make_put(1.0));
  req.n = static_cast<int>(state.range(0));
  req.x = 0.1;
  req.eps = 1e-10;
  for (auto _ : state) benchmark::DoNotOptimize(sinhz::price_european_symmetric(req).price);
}
BENCHMARK(BM_PriceEuropeanSymmetric)->Arg(12)->Arg(252)->Unit(benchmark::kMillisecond);

void BM_PriceBarrier(benchmark::State& state) {
  sinhz::PricingRequest req(kobol(), sinhz::make_digital_down(0.05));
  req.n = 12;
  req.x = 0.0;
  req.barrier = 0.3;
  req.eps = 1e-8;
  req.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sinhz::price_barrier(req).price);
}
BENCHMARK(BM_PriceBarrier)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
