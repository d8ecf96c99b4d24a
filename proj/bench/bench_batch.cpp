// Parallel vs serial replication batches on shipped scenarios.

#include <benchmark/benchmark.h>

#include <string>

#include "orgsim/batch.hpp"
#include "orgsim/scenario.hpp"

namespace {

orgsim::Scenario load(const char* name, int replications)
{
    auto s = orgsim::load_scenario_file(std::string(ORGSIM_SCENARIO_DIR) + "/" + name + ".json");
    s.replications = replications;
    return s;
}

void batch(benchmark::State& state, const char* name, bool parallel)
{
    const auto runner = parallel ? orgsim::run_batch : orgsim::run_batch_serial;
    const auto s = load(name, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto result = runner(s);
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK_CAPTURE(batch, retail_parallel, "retail_six_staff", true)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(batch, retail_serial, "retail_six_staff", false)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(batch, ant_parallel, "ant_mass_large", true)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(batch, ant_serial, "ant_mass_large", false)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(batch, team_parallel, "team_gatewayed", true)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(batch, team_serial, "team_gatewayed", false)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
