#include "orgsim/world.hpp"

namespace orgsim {

static_assert(static_cast<std::size_t>(ModelKind::AntForaging) == 0);
static_assert(static_cast<std::size_t>(ModelKind::Retail) == 1);
static_assert(static_cast<std::size_t>(ModelKind::TeamComms) == 2);

MetricMap WorldState::metrics() const
{
    return std::visit([](const auto& m) { return m.metrics(); }, model);
}

bool WorldState::finished() const
{
    return std::visit([](const auto& m) { return m.finished(); }, model);
}

namespace {

ModelState make_model(const Scenario& s, std::uint64_t seed)
{
    return std::visit(
        [&](const auto& c) -> ModelState {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, AntConfig>) {
                return ant::AntColony(make_grid(c, seed), c.params, seed);
            } else if constexpr (std::is_same_v<T, RetailConfig>) {
                return retail::RetailStore(c.departments, c.staff, c.manager, c.params, seed);
            } else {
                return team::TeamWorld(c, seed);
            }
        },
        s.config);
}

void sample(const WorldState& world, RunResult& result)
{
    for (const auto& [name, value] : world.metrics()) {
        result.series.push_back(MetricSample{world.clock.now(), name, value});
    }
}

} // namespace

WorldState make_world(const Scenario& scenario, std::uint64_t seed, bool retain_events)
{
    return WorldState{SimClock{}, make_model(scenario, seed), EventLog(retain_events),
        RngStream(seed, streams::kSchedule)};
}

void tick(WorldState& world)
{
    std::visit([&](auto& m) { step_model(m, world.clock, world.schedule, world.log); }, world.model);
}

void advance(WorldState& world, Tick until, Tick metric_interval, RunResult& result)
{
    if (world.clock.now() == 0 && result.series.empty()) {
        sample(world, result);
    }
    bool sampled_last = true;
    while (world.clock.now() < until && !world.finished()) {
        tick(world);
        sampled_last = world.clock.now() % metric_interval == 0;
        if (sampled_last) {
            sample(world, result);
        }
    }
    if (!sampled_last) {
        sample(world, result);
    }
    result.final_metrics = world.metrics();
    result.event_counts = world.log.counts();
    result.ticks_executed = world.clock.now();
}

RunResult run(const Scenario& scenario, std::uint64_t seed, bool retain_events)
{
    WorldState world = make_world(scenario, seed, retain_events);
    RunResult result;
    advance(world, scenario.tick_limit(), scenario.metric_interval, result);
    return result;
}

} // namespace orgsim
