#include <benchmark/benchmark.h>

#include <cmath>

#include "fracvar/operators.hpp"
#include "fracvar/parallel.hpp"

using namespace fracvar;

namespace {

KernelSpec exponential() {
    return {1.0, 1.0, OrderFunction::constant(0.5), WarpFunction::identity(), NormalizationFunction::unit(), 0.0, 1.0};
}

KernelSpec mittag_leffler() {
    return {0.8, 0.9, OrderFunction::constant(0.5), WarpFunction::log(), NormalizationFunction::unit(), 1.0, 2.0};
}

GridFunction data(const KernelSpec& spec, std::size_t n) {
    return GridFunction::sample(spec.a(), spec.b(), n, [](double t) { return std::sin(3 * t) + t * t; },
                                [](double t) { return 3 * std::cos(3 * t) + 2 * t; });
}

template <class Run>
void run(benchmark::State& state, const KernelSpec& spec, Run op) {
    const GridFunction f = data(spec, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(op(spec, f));
    state.SetComplexityN(state.range(0));
    state.counters["threads"] = thread_limit();
}

void aux1_serial_exp(benchmark::State& s) {
    run(s, exponential(), [](const KernelSpec& k, const GridFunction& f) { return reference::aux_integral_1(k, f); });
}
void aux1_parallel_exp(benchmark::State& s) {
    run(s, exponential(), [](const KernelSpec& k, const GridFunction& f) { return aux_integral_1(k, f); });
}
void aux1_serial_ml(benchmark::State& s) {
    run(s, mittag_leffler(), [](const KernelSpec& k, const GridFunction& f) { return reference::aux_integral_1(k, f); });
}
void aux1_parallel_ml(benchmark::State& s) {
    run(s, mittag_leffler(), [](const KernelSpec& k, const GridFunction& f) { return aux_integral_1(k, f); });
}
void aux2_serial_ml(benchmark::State& s) {
    run(s, mittag_leffler(), [](const KernelSpec& k, const GridFunction& f) { return reference::aux_integral_2(k, f); });
}
void aux2_parallel_ml(benchmark::State& s) {
    run(s, mittag_leffler(), [](const KernelSpec& k, const GridFunction& f) { return aux_integral_2(k, f); });
}
void rl_integral_serial(benchmark::State& s) {
    run(s, mittag_leffler(), [](const KernelSpec& k, const GridFunction& f) { return reference::rl_integral_varorder(k, f); });
}
void rl_integral_parallel(benchmark::State& s) {
    run(s, mittag_leffler(), [](const KernelSpec& k, const GridFunction& f) { return rl_integral_varorder(k, f); });
}

}  // namespace

BENCHMARK(aux1_serial_exp)->RangeMultiplier(2)->Range(256, 2048)->Complexity();
BENCHMARK(aux1_parallel_exp)->RangeMultiplier(2)->Range(256, 2048)->Complexity();
BENCHMARK(aux1_serial_ml)->RangeMultiplier(2)->Range(128, 1024)->Complexity();
BENCHMARK(aux1_parallel_ml)->RangeMultiplier(2)->Range(128, 1024)->Complexity();
BENCHMARK(aux2_serial_ml)->RangeMultiplier(2)->Range(128, 1024)->Complexity();
BENCHMARK(aux2_parallel_ml)->RangeMultiplier(2)->Range(128, 1024)->Complexity();
BENCHMARK(rl_integral_serial)->RangeMultiplier(2)->Range(128, 1024)->Complexity();
BENCHMARK(rl_integral_parallel)->RangeMultiplier(2)->Range(128, 1024)->Complexity();

BENCHMARK_MAIN();
