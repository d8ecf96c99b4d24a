#pragma once

#include <concepts>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "orgsim/events.hpp"
#include "orgsim/rng.hpp"

namespace orgsim {

using MetricMap = std::map<std::string, double>;

/// What the engine needs from a model. Only update_agent may change agent
/// state; begin_tick/end_tick handle environment bookkeeping (evaporation,
/// arrivals, removals). live_agents() must be sorted so the shuffle input
/// is canonical.
template <class M>
concept AgentModel = requires(M& m, const M& cm, StepContext& ctx, AgentId id) {
    m.begin_tick(ctx);
    { cm.live_agents() } -> std::convertible_to<std::vector<AgentId>>;
    m.update_agent(id, ctx);
    m.end_tick(ctx);
    { cm.metrics() } -> std::convertible_to<MetricMap>;
    { cm.finished() } -> std::convertible_to<bool>;
};

/// Uniform random permutation of `ids` drawn from the schedule stream.
inline std::vector<AgentId> schedule_order(std::vector<AgentId> ids, RngStream& schedule)
{
    schedule.shuffle(std::span<AgentId>(ids));
    return ids;
}

/// One synchronous step: advance the clock, then update every live agent
/// exactly once in a freshly shuffled order.
template <AgentModel M>
void step_model(M& model, SimClock& clock, RngStream& schedule, EventLog& log)
{
    clock.advance();
    StepContext ctx(clock.now(), log);
    model.begin_tick(ctx);
    for (AgentId id : schedule_order(model.live_agents(), schedule)) {
        model.update_agent(id, ctx);
    }
    model.end_tick(ctx);
}

} // namespace orgsim
