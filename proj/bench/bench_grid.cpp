#include <benchmark/benchmark.h>

#include <string>

#include "bacoord/curve/io.hpp"
#include "bacoord/verify/verify.hpp"

using namespace bacoord;

namespace {

const BakerAkhiezerProblem& problem(const std::string& name) {
    static const BakerAkhiezerProblem example1(load_spectral_data(std::string(BACOORD_DATASET_DIR) + "/example1.bacurve"));
    static const BakerAkhiezerProblem example3(load_spectral_data(std::string(BACOORD_DATASET_DIR) + "/example3.bacurve"));
    return name == "example1" ? example1 : example3;
}

void report(benchmark::State& state, const std::string& name, bool parallel) {
    const GridSpec grid = GridSpec::uniform(2, -1.0, 1.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        VerificationReport r = parallel ? run_report(problem(name), grid, 7) : run_report_serial(problem(name), grid, 7);
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

void serial(benchmark::State& state, const std::string& name) { report(state, name, false); }
void openmp(benchmark::State& state, const std::string& name) { report(state, name, true); }

void coordinate_sweep(benchmark::State& state) {
    const GridSpec grid = GridSpec::uniform(2, -1.0, 1.0, static_cast<int>(state.range(0)));
    for (auto _ : state)
        for (std::size_t k = 0; k < grid.size(); ++k) benchmark::DoNotOptimize(coordinates(problem("example3"), grid.point(k)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

}  // namespace

BENCHMARK_CAPTURE(serial, example1, std::string("example1"))->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(openmp, example1, std::string("example1"))->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(serial, example3, std::string("example3"))->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(openmp, example3, std::string("example3"))->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK(coordinate_sweep)->Arg(21)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
