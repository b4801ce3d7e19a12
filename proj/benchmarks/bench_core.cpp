#include <benchmark/benchmark.h>

#include "tlf/cumulant_engine.hpp"
#include "tlf/montecarlo.hpp"
#include "tlf/oracle.hpp"
#include "tlf/stable_dist.hpp"

using namespace tlf;

namespace {

// Spans the three evaluation paths: origin series, inversion, tail series.
void BM_StablePdf(benchmark::State& state) {
    const StableParams p(static_cast<double>(state.range(0)) / 10.0, 1.0);
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(stable_pdf(p, x));
        x = x > 50.0 ? 0.0 : x + 0.37;
    }
}
BENCHMARK(BM_StablePdf)->Arg(5)->Arg(10)->Arg(15)->Arg(19);

void BM_StableSample(benchmark::State& state) {
    const StableParams p(static_cast<double>(state.range(0)) / 10.0, 1.0);
    auto rng = make_stream(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(stable_sample(p, rng));
}
BENCHMARK(BM_StableSample)->Arg(5)->Arg(10)->Arg(15);

void BM_TruncatedSample(benchmark::State& state) {
    const TlfModel m(StableParams(1.5, 1.0), DeformationSpec::exponential(50.0));
    auto rng = make_stream(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(truncated_sample(m, rng));
}
BENCHMARK(BM_TruncatedSample);

void BM_CumulantTable(benchmark::State& state) {
    const TlfModel m(StableParams(1.3, 1.0), DeformationSpec::power_exponential(100.0, 0.5));
    const int orders[] = {2, 4, 6, 8};
    for (auto _ : state) benchmark::DoNotOptimize(cumulant_table(m, orders));
}
BENCHMARK(BM_CumulantTable);

void BM_NumericMoment(benchmark::State& state) {
    const TlfModel m(StableParams(1.0, 1.0), DeformationSpec::exponential(1000.0));
    for (auto _ : state) benchmark::DoNotOptimize(numeric_moment(m, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_NumericMoment)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
