// Microbenchmarks for the hot paths: curve evaluation, SSE and its
// gradient, the RK4 oracle, a full seeded refinement, and power iteration.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "oscfit/analytics.hpp"
#include "oscfit/dynamics.hpp"
#include "oscfit/fitting.hpp"
#include "oscfit/model.hpp"
#include "oscfit/series.hpp"

namespace {

const oscfit::ShockFitParams kParams{0.95, 1.0, 0.5, 0.1, 0.1, 1.5, 1.0};

oscfit::NormalizedSeries make_series(int n, double sigma) {
    return oscfit::synthesize(
        [](double t) { return oscfit::eval_single_shock(kParams, t); }, n, sigma, 7);
}

void BM_EvalSingleShock(benchmark::State& state) {
    double t = 0.0;
    for (auto _ : state) {
        t += 0.001;
        benchmark::DoNotOptimize(oscfit::eval_single_shock(kParams, t));
    }
}
BENCHMARK(BM_EvalSingleShock);

void BM_Sse27(benchmark::State& state) {
    const auto series = make_series(27, 0.005);
    for (auto _ : state) benchmark::DoNotOptimize(oscfit::sse(kParams, series));
}
BENCHMARK(BM_Sse27);

void BM_SseGradient27(benchmark::State& state) {
    const auto series = make_series(27, 0.005);
    for (auto _ : state) benchmark::DoNotOptimize(oscfit::sse_gradient(kParams, series));
}
BENCHMARK(BM_SseGradient27);

void BM_StagewiseInit(benchmark::State& state) {
    const auto series = make_series(27, 0.005);
    for (auto _ : state) benchmark::DoNotOptimize(oscfit::initialize_stagewise(series));
}
BENCHMARK(BM_StagewiseInit);

void BM_RefineJoint(benchmark::State& state) {
    const auto series = make_series(27, 0.005);
    const auto init = oscfit::initialize_stagewise(series);
    const auto cfg = oscfit::FitConfig::refine_defaults();
    for (auto _ : state)
        benchmark::DoNotOptimize(oscfit::refine_joint(init, series, cfg));
}
BENCHMARK(BM_RefineJoint)->Unit(benchmark::kMillisecond);

void BM_Rk4ThirtyDays(benchmark::State& state) {
    oscfit::OscillatorCoeffs c;
    c.m = 1.0;
    c.gamma = 0.4;
    c.k = 1.7;
    c.delta = 0.5;
    c.shock_alpha = 0.3;
    for (auto _ : state)
        benchmark::DoNotOptimize(oscfit::integrate_ode(c, 1.2, 0.0, 1e-3, 30000));
}
BENCHMARK(BM_Rk4ThirtyDays)->Unit(benchmark::kMillisecond);

void BM_PowerIteration11(benchmark::State& state) {
    std::vector<std::vector<double>> m(11, std::vector<double>(11, 0.32));
    for (int i = 0; i < 11; ++i) m[i][i] = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(oscfit::largest_eigenvalue(m));
}
BENCHMARK(BM_PowerIteration11);

}  // namespace

BENCHMARK_MAIN();
