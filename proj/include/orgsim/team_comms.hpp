#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "orgsim/engine.hpp"
#include "orgsim/events.hpp"
#include "orgsim/rng.hpp"

namespace orgsim::team {

using FactId = int;
using MessageId = std::uint32_t;
using FactSet = std::set<FactId>;

enum class Role { Member, Liaison, Leader };

std::string_view to_string(Role r) noexcept;

enum class Policy { AnyToAny, Gatewayed };

std::string_view to_string(Policy p) noexcept;
std::optional<Policy> parse_policy(std::string_view text) noexcept;

enum class FactDistribution { RoundRobin, Random, SingleTeam };

std::string_view to_string(FactDistribution d) noexcept;
std::optional<FactDistribution> parse_distribution(std::string_view text) noexcept;

/// Who knows a fact at tick 0: only its owner, or the owner's whole team.
enum class InitialKnowledge { Owner, Team };

std::string_view to_string(InitialKnowledge k) noexcept;
std::optional<InitialKnowledge> parse_initial(std::string_view text) noexcept;

struct Engineer {
    AgentId id = 0;
    int team = 0;
    Role role = Role::Member;
    std::deque<MessageId> inbox;
    int capacity = 2;
    FactSet knowledge;
    std::map<AgentId, double> trust;
    RngStream rng;

    friend bool operator==(const Engineer&, const Engineer&) = default;
};

struct Team {
    int id = 0;
    std::vector<AgentId> members;
    std::optional<AgentId> liaison;
    std::optional<AgentId> leader;

    friend bool operator==(const Team&, const Team&) = default;
};

class Topology {
public:
    Topology() = default;
    Topology(Policy policy, std::size_t n_engineers);

    Policy policy() const noexcept { return policy_; }
    /// Unordered pairs stored as (low, high).
    const std::set<std::pair<AgentId, AgentId>>& edges() const noexcept { return edges_; }
    bool has_edge(AgentId a, AgentId b) const noexcept;
    const std::vector<AgentId>& neighbors(AgentId a) const { return adjacency_.at(a); }
    std::size_t size() const noexcept { return adjacency_.size(); }

    void add_edge(AgentId a, AgentId b);

    friend bool operator==(const Topology&, const Topology&) = default;

private:
    Policy policy_ = Policy::AnyToAny;
    std::set<std::pair<AgentId, AgentId>> edges_;
    std::vector<std::vector<AgentId>> adjacency_;
};

/// Complete graphs inside each team plus the cross-team edges of the
/// policy: every pair under AnyToAny, liaison to liaison under Gatewayed.
/// Throws ConfigError for fewer than two teams or a missing liaison.
Topology build_topology(const std::vector<Team>& teams, Policy policy);

/// Shortest path src..dst (both included), lowest ids first among equals.
/// Throws Unreachable when no path exists and std::invalid_argument when
/// src == dst.
std::vector<AgentId> route(AgentId src, AgentId dst, const Topology& topology);

struct Message {
    MessageId id = 0;
    FactId fact = 0;
    AgentId origin = 0;
    AgentId destination = 0;
    Tick created_tick = 0;
    /// Full route; path[hop] currently holds the message, so path[0..hop]
    /// is the path so far.
    std::vector<AgentId> path;
    std::size_t hop = 0;
    /// Sent to satisfy a task (as opposed to a liaison's broadcast copy).
    bool addressed = true;
    bool cross_team = false;

    friend bool operator==(const Message&, const Message&) = default;
};

struct Task {
    int id = 0;
    FactSet required_facts;
    Tick created_tick = 0;
    /// Last tick at which the task can still complete.
    Tick deadline = 0;
    AgentId assignee = 0;
    std::optional<Tick> completed_tick;

    friend bool operator==(const Task&, const Task&) = default;
};

struct TaskParams {
    int count = 10;
    int k = 2;
    /// Ticks allowed after creation.
    Tick deadline = 50;
    /// Ticks between consecutive task creations; 0 creates all at tick 1.
    Tick spacing = 0;

    friend bool operator==(const TaskParams&, const TaskParams&) = default;
};

/// Draws `params.count` tasks, each needing k distinct facts from
/// [0, universe). Creation ticks and deadlines are filled in; assignees are
/// left for the leaders. Throws ConfigError when k exceeds the universe.
std::vector<Task> generate_tasks(RngStream& rng, const TaskParams& params, int universe);

enum class TrustOutcome { Novel, Duplicate };

/// Applies one interaction to engineer.trust[peer] (0.5 on first contact),
/// clamped to [0,1], and returns the new value.
double update_trust(Engineer& engineer, AgentId peer, TrustOutcome outcome, double delta_up, double delta_down);

/// Union of the members' knowledge.
FactSet team_knowledge(const Team& team, const std::vector<Engineer>& engineers);

/// Jaccard overlap of the two knowledge unions; 1 when both are empty.
double shared_understanding(const Team& a, const Team& b, const std::vector<Engineer>& engineers);

struct TeamSpec {
    int size = 1;
    /// Index within the team.
    std::optional<int> liaison;
    int leader = 0;

    friend bool operator==(const TeamSpec&, const TeamSpec&) = default;
};

struct TeamParams {
    Policy policy = Policy::AnyToAny;
    std::vector<TeamSpec> teams = {TeamSpec{4, 0, 0}, TeamSpec{4, 0, 0}};
    int fact_universe = 20;
    FactDistribution distribution = FactDistribution::RoundRobin;
    InitialKnowledge initial = InitialKnowledge::Owner;
    TaskParams tasks;
    int member_capacity = 2;
    int liaison_capacity = 2;
    double trust_up = 0.05;
    double trust_down = 0.02;
    /// Drop a message at a hop with probability (1 - trust in the sender).
    bool trust_drop = false;
    /// Cap on task-driven messages; unlimited when empty.
    std::optional<std::int64_t> message_budget;

    void validate() const;

    friend bool operator==(const TeamParams&, const TeamParams&) = default;
};

struct Effectiveness {
    double task_completion_rate = 0.0;
    double mean_fact_latency = 0.0;
    std::int64_t latency_count = 0;
};

/// Reads completion rate and latency back out of a final metric map.
Effectiveness effectiveness(const MetricMap& final_metrics);

class TeamWorld {
public:
    TeamWorld(TeamParams params, std::uint64_t seed);

    // Engine interface.
    void begin_tick(StepContext& ctx);
    std::vector<AgentId> live_agents() const;
    void update_agent(AgentId id, StepContext& ctx);
    void end_tick(StepContext& ctx);
    MetricMap metrics() const;
    /// True once every task exists and no message is in flight; nothing can
    /// change after that.
    bool finished() const noexcept;

    /// Processes up to `capacity` messages from the head of the inbox.
    void comm_tick(Engineer& engineer, StepContext& ctx);

    /// Places a message on the route origin..destination directly into the
    /// inbox of `holder`, which must lie on that route. Used for hand-built
    /// traces. Returns the new message id.
    MessageId inject(AgentId holder, AgentId origin, AgentId destination, FactId fact, Tick created_tick);

    const TeamParams& params() const noexcept { return params_; }
    const std::vector<Engineer>& engineers() const noexcept { return engineers_; }
    std::vector<Engineer>& engineers() noexcept { return engineers_; }
    const std::vector<Team>& teams() const noexcept { return teams_; }
    const Topology& topology() const noexcept { return topology_; }
    const std::vector<Task>& tasks() const noexcept { return tasks_; }
    const std::vector<Message>& messages() const noexcept { return messages_; }
    /// Owner of each fact.
    const std::vector<AgentId>& owners() const noexcept { return owners_; }

    std::int64_t in_flight() const noexcept { return in_flight_; }
    std::int64_t cross_delivered() const noexcept { return cross_delivered_; }
    std::int64_t latency_sum() const noexcept { return latency_sum_; }

    friend bool operator==(const TeamWorld&, const TeamWorld&) = default;

private:
    void create_task(Task& task, StepContext& ctx);
    MessageId send(AgentId origin, AgentId destination, FactId fact, bool addressed, Tick now);
    void handle(Engineer& e, MessageId mid, StepContext& ctx);
    void broadcast(Engineer& liaison, const Message& m, StepContext& ctx);
    void check_tasks(StepContext& ctx);

    TeamParams params_;
    std::vector<Engineer> engineers_;
    std::vector<Team> teams_;
    Topology topology_;
    std::vector<AgentId> owners_;
    std::vector<Task> tasks_;
    std::size_t next_task_ = 0;
    std::vector<int> assign_cursor_;
    std::vector<Message> messages_;
    /// Arrivals for the next tick, per engineer, in send order.
    std::vector<std::vector<MessageId>> staged_;

    std::int64_t in_flight_ = 0;
    std::int64_t sent_ = 0;
    std::int64_t delivered_ = 0;
    std::int64_t dropped_ = 0;
    std::int64_t cross_delivered_ = 0;
    std::int64_t latency_sum_ = 0;
    std::int64_t completed_ = 0;
};

} // namespace orgsim::team
