#include <benchmark/benchmark.h>

#include <cmath>

#include "squeezebell/bell_scan.hpp"
#include "squeezebell/complexfn.hpp"
#include "squeezebell/evaluators.hpp"
#include "squeezebell/kernel.hpp"
#include "squeezebell/oracle.hpp"

using namespace squeezebell;

namespace {

const TransitionSpec kFig{{5.0, -0.2, 0.5}, {5.0, 0.2, 0.0}};

void BM_Erfc(benchmark::State& state) {
    const double radius = static_cast<double>(state.range(0));
    double t = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(erfc_complex(std::polar(radius, t)));
        t += 0.37;
    }
}
BENCHMARK(BM_Erfc)->Arg(1)->Arg(5)->Arg(20);

void BM_XiMatrix(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(xi_matrix(kFig));
}
BENCHMARK(BM_XiMatrix);

void BM_CorrelatorNumeric(benchmark::State& state) {
    const XiMatrix xi = xi_matrix(kFig);
    const EvaluationSettings s{static_cast<double>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(correlator_numeric(xi, s));
}
BENCHMARK(BM_CorrelatorNumeric)->Arg(3)->Arg(30)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_CorrelatorSmallEll(benchmark::State& state) {
    const XiMatrix xi = xi_matrix(kFig);
    for (auto _ : state) benchmark::DoNotOptimize(correlator_small_ell(xi, 0.5));
}
BENCHMARK(BM_CorrelatorSmallEll);

void BM_CorrelatorLargeEll(benchmark::State& state) {
    const XiMatrix xi = xi_matrix(kFig);
    for (auto _ : state) benchmark::DoNotOptimize(correlator_large_ell(xi));
}
BENCHMARK(BM_CorrelatorLargeEll);

void BM_EqualTime(benchmark::State& state) {
    const EvaluationSettings s{100.0};
    for (auto _ : state) benchmark::DoNotOptimize(correlator_equal_time({5.0, 0.0, 0.0}, s));
}
BENCHMARK(BM_EqualTime)->Unit(benchmark::kMicrosecond);

void BM_OracleQuadrature(benchmark::State& state) {
    const XiMatrix xi = xi_matrix(kFig);
    for (auto _ : state) benchmark::DoNotOptimize(correlator_quadrature(xi, 100.0));
}
BENCHMARK(BM_OracleQuadrature)->Unit(benchmark::kMillisecond);

void BM_BellOperator(benchmark::State& state) {
    BellConfig c;
    c.a = c.b = c.a_prime = c.b_prime = {5.0, 0.0, 0.0};
    c.a_prime.theta = 0.2;
    c.b_prime.theta = 0.35;
    c.ell = 100.0;
    const EvaluationSettings s{100.0};
    for (auto _ : state) benchmark::DoNotOptimize(bell_operator(c, s));
}
BENCHMARK(BM_BellOperator)->Unit(benchmark::kMicrosecond);

void BM_Sweep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        SweepGrid g;
        g.fixed.a = g.fixed.b = g.fixed.a_prime = g.fixed.b_prime = {5.0, 0.0, 0.0};
        g.fixed.ell = 100.0;
        g.axis1 = {"dtheta_apbp", -M_PI, M_PI, n};
        g.axis2 = {"dtheta_apb", -M_PI, M_PI, n};
        SweepOptions opt;
        opt.workers = 1;
        sweep_map(g, EvaluationSettings{100.0}, opt);
        benchmark::DoNotOptimize(g.max_B);
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Sweep)->Arg(31)->Arg(61)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
