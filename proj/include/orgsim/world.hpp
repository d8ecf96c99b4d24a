#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "orgsim/ant_foraging.hpp"
#include "orgsim/engine.hpp"
#include "orgsim/events.hpp"
#include "orgsim/retail.hpp"
#include "orgsim/rng.hpp"
#include "orgsim/scenario.hpp"
#include "orgsim/team_comms.hpp"

namespace orgsim {

using ModelState = std::variant<ant::AntColony, retail::RetailStore, team::TeamWorld>;

/// Everything one replication owns. Plain values, so a world can be copied
/// or handed to another thread.
struct WorldState {
    SimClock clock;
    ModelState model;
    EventLog log;
    RngStream schedule;

    ModelKind kind() const noexcept { return static_cast<ModelKind>(model.index()); }
    MetricMap metrics() const;
    bool finished() const;

    friend bool operator==(const WorldState&, const WorldState&) = default;
};

/// Initial world for `scenario` under `seed` (the replication seed).
WorldState make_world(const Scenario& scenario, std::uint64_t seed, bool retain_events = true);

/// One engine step.
void tick(WorldState& world);

struct RunResult {
    /// Samples at tick 0, every metric_interval ticks and at the last tick.
    std::vector<MetricSample> series;
    MetricMap final_metrics;
    EventLog::CountMap event_counts;
    Tick ticks_executed = 0;

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Steps `world` until `until` or until the model reports finished,
/// sampling metrics into `result` (tick 0 is sampled only when the world
/// is fresh).
void advance(WorldState& world, Tick until, Tick metric_interval, RunResult& result);

/// One replication of `scenario` with the given seed.
RunResult run(const Scenario& scenario, std::uint64_t seed, bool retain_events = false);

/// One replication with the scenario's own seed.
inline RunResult run(const Scenario& scenario) { return run(scenario, scenario.seed); }

} // namespace orgsim
