#include <vector>

#include <benchmark/benchmark.h>

#include "cmtrace/analytic.hpp"
#include "cmtrace/parallel.hpp"
#include "cmtrace/thetalift.hpp"

using namespace cmtrace;

// serial reference vs the CRT/cyclic kernel and the block-parallel sum

static void BM_kloosterman_naive(benchmark::State& st)
{
    const long c = st.range(0);
    for (auto _ : st)
        benchmark::DoNotOptimize(kloosterman_naive(-1, 1, c));
}
BENCHMARK(BM_kloosterman_naive)->Arg(9973)->Arg(99991)->Arg(99900);

static void BM_kloosterman(benchmark::State& st)
{
    const long c = st.range(0);
    for (auto _ : st)
        benchmark::DoNotOptimize(kloosterman(-1, 1, c));
}
BENCHMARK(BM_kloosterman)->Arg(9973)->Arg(99991)->Arg(99900);

static void BM_poincare_serial(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(poincare_coeff_serial(4, 1, 1, st.range(0)).value);
}
BENCHMARK(BM_poincare_serial)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_poincare(benchmark::State& st)
{
    set_threads(static_cast<int>(st.range(1)));
    for (auto _ : st)
        benchmark::DoNotOptimize(poincare_coeff(4, 1, 1, st.range(0)).value);
    set_threads(0);
}
BENCHMARK(BM_poincare)->Args({5000, 1})->Args({5000, 4})->Args({100000, 4})->Unit(benchmark::kMillisecond);

static void BM_trace_table(benchmark::State& st)
{
    set_threads(static_cast<int>(st.range(0)));
    const modular_function J = make_function("J");
    std::vector<long> Ds;
    for (long D = 3; D <= 500; ++D)
        if (D % 4 == 0 || D % 4 == 3)
            Ds.push_back(D);
    for (auto _ : st)
        benchmark::DoNotOptimize(trace_table(J, Ds).size());
    set_threads(0);
}
BENCHMARK(BM_trace_table)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_theta_kernel(benchmark::State& st)
{
    const lattice_spec L = level4();
    const rat3 h{0, 0, 0};
    for (auto _ : st)
        benchmark::DoNotOptimize(theta_kernel(L, h, {0.1, 1.3}, {0.2, 1.7}, 1e-12).value);
}
BENCHMARK(BM_theta_kernel);

BENCHMARK_MAIN();
