#include "orgsim/team_comms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

#include "orgsim/errors.hpp"

namespace orgsim::team {

std::string_view to_string(Role r) noexcept
{
    switch (r) {
    case Role::Member:
        return "Member";
    case Role::Liaison:
        return "Liaison";
    case Role::Leader:
        return "Leader";
    }
    return "?";
}

std::string_view to_string(Policy p) noexcept
{
    return p == Policy::AnyToAny ? "any_to_any" : "gatewayed";
}

std::optional<Policy> parse_policy(std::string_view text) noexcept
{
    if (text == "any_to_any" || text == "AnyToAny") {
        return Policy::AnyToAny;
    }
    if (text == "gatewayed" || text == "Gatewayed") {
        return Policy::Gatewayed;
    }
    return std::nullopt;
}

std::string_view to_string(FactDistribution d) noexcept
{
    switch (d) {
    case FactDistribution::RoundRobin:
        return "round_robin";
    case FactDistribution::Random:
        return "random";
    case FactDistribution::SingleTeam:
        return "single_team";
    }
    return "?";
}

std::optional<FactDistribution> parse_distribution(std::string_view text) noexcept
{
    if (text == "round_robin") {
        return FactDistribution::RoundRobin;
    }
    if (text == "random") {
        return FactDistribution::Random;
    }
    if (text == "single_team") {
        return FactDistribution::SingleTeam;
    }
    return std::nullopt;
}

std::string_view to_string(InitialKnowledge k) noexcept
{
    return k == InitialKnowledge::Owner ? "owner" : "team";
}

std::optional<InitialKnowledge> parse_initial(std::string_view text) noexcept
{
    if (text == "owner") {
        return InitialKnowledge::Owner;
    }
    if (text == "team") {
        return InitialKnowledge::Team;
    }
    return std::nullopt;
}

Topology::Topology(Policy policy, std::size_t n_engineers)
    : policy_(policy)
    , adjacency_(n_engineers)
{
}

bool Topology::has_edge(AgentId a, AgentId b) const noexcept
{
    return edges_.contains({std::min(a, b), std::max(a, b)});
}

void Topology::add_edge(AgentId a, AgentId b)
{
    if (a == b || a >= adjacency_.size() || b >= adjacency_.size()) {
        throw std::invalid_argument("bad edge " + std::to_string(a) + "-" + std::to_string(b));
    }
    if (!edges_.insert({std::min(a, b), std::max(a, b)}).second) {
        return;
    }
    auto insert_sorted = [](std::vector<AgentId>& v, AgentId x) { v.insert(std::upper_bound(v.begin(), v.end(), x), x); };
    insert_sorted(adjacency_[a], b);
    insert_sorted(adjacency_[b], a);
}

Topology build_topology(const std::vector<Team>& teams, Policy policy)
{
    if (teams.size() < 2) {
        throw ConfigError("a topology needs at least two teams (got " + std::to_string(teams.size()) + ")");
    }
    std::size_t n = 0;
    for (const auto& t : teams) {
        if (t.members.empty()) {
            throw ConfigError("team " + std::to_string(t.id) + " has no members");
        }
        for (AgentId m : t.members) {
            n = std::max<std::size_t>(n, m + 1);
        }
        if (policy == Policy::Gatewayed && !t.liaison) {
            throw ConfigError("gatewayed policy requires a liaison for team " + std::to_string(t.id));
        }
    }
    Topology topo(policy, n);
    for (const auto& t : teams) {
        for (std::size_t i = 0; i < t.members.size(); ++i) {
            for (std::size_t j = i + 1; j < t.members.size(); ++j) {
                topo.add_edge(t.members[i], t.members[j]);
            }
        }
    }
    for (std::size_t a = 0; a < teams.size(); ++a) {
        for (std::size_t b = a + 1; b < teams.size(); ++b) {
            if (policy == Policy::Gatewayed) {
                topo.add_edge(*teams[a].liaison, *teams[b].liaison);
                continue;
            }
            for (AgentId x : teams[a].members) {
                for (AgentId y : teams[b].members) {
                    topo.add_edge(x, y);
                }
            }
        }
    }
    return topo;
}

std::vector<AgentId> route(AgentId src, AgentId dst, const Topology& topology)
{
    if (src == dst) {
        throw std::invalid_argument("route needs distinct endpoints");
    }
    const std::size_t n = topology.size();
    if (src >= n || dst >= n) {
        throw Unreachable("engineer outside the topology");
    }
    constexpr AgentId kNone = ~AgentId{0};
    std::vector<AgentId> parent(n, kNone);
    parent[src] = src;
    std::queue<AgentId> frontier;
    frontier.push(src);
    while (!frontier.empty() && parent[dst] == kNone) {
        const AgentId u = frontier.front();
        frontier.pop();
        for (AgentId v : topology.neighbors(u)) {
            if (parent[v] == kNone) {
                parent[v] = u;
                frontier.push(v);
            }
        }
    }
    if (parent[dst] == kNone) {
        throw Unreachable("no route from " + std::to_string(src) + " to " + std::to_string(dst));
    }
    std::vector<AgentId> path{dst};
    while (path.back() != src) {
        path.push_back(parent[path.back()]);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<Task> generate_tasks(RngStream& rng, const TaskParams& params, int universe)
{
    if (params.k < 1) {
        throw RangeError("tasks.k", "[1,universe]", std::to_string(params.k));
    }
    if (params.k > universe) {
        throw ConfigError("tasks.k (" + std::to_string(params.k) + ") exceeds the fact universe ("
            + std::to_string(universe) + ")");
    }
    std::vector<Task> tasks;
    std::vector<FactId> pool(static_cast<std::size_t>(universe));
    for (int i = 0; i < params.count; ++i) {
        std::iota(pool.begin(), pool.end(), 0);
        Task t;
        t.id = i;
        // Partial Fisher-Yates: the first k slots become the sample.
        for (int j = 0; j < params.k; ++j) {
            const auto pick = static_cast<std::size_t>(j)
                + static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(universe - j)));
            std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
            t.required_facts.insert(pool[static_cast<std::size_t>(j)]);
        }
        t.created_tick = 1 + static_cast<Tick>(i) * params.spacing;
        t.deadline = t.created_tick + params.deadline;
        tasks.push_back(std::move(t));
    }
    return tasks;
}

double update_trust(Engineer& engineer, AgentId peer, TrustOutcome outcome, double delta_up, double delta_down)
{
    auto [it, inserted] = engineer.trust.try_emplace(peer, 0.5);
    const double delta = outcome == TrustOutcome::Novel ? delta_up : -delta_down;
    it->second = std::clamp(it->second + delta, 0.0, 1.0);
    return it->second;
}

FactSet team_knowledge(const Team& team, const std::vector<Engineer>& engineers)
{
    FactSet out;
    for (AgentId m : team.members) {
        out.insert(engineers.at(m).knowledge.begin(), engineers.at(m).knowledge.end());
    }
    return out;
}

double shared_understanding(const Team& a, const Team& b, const std::vector<Engineer>& engineers)
{
    const FactSet ka = team_knowledge(a, engineers);
    const FactSet kb = team_knowledge(b, engineers);
    std::size_t inter = 0;
    for (FactId f : ka) {
        inter += kb.count(f);
    }
    const std::size_t uni = ka.size() + kb.size() - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

void TeamParams::validate() const
{
    if (teams.size() < 2) {
        throw RangeError("teams", "at least 2 teams", std::to_string(teams.size()));
    }
    for (const auto& t : teams) {
        if (t.size < 1) {
            throw RangeError("teams.size", "[1,inf)", std::to_string(t.size));
        }
        if (t.liaison && (*t.liaison < 0 || *t.liaison >= t.size)) {
            throw RangeError("teams.liaison", "[0," + std::to_string(t.size - 1) + "]", std::to_string(*t.liaison));
        }
        if (t.leader < 0 || t.leader >= t.size) {
            throw RangeError("teams.leader", "[0," + std::to_string(t.size - 1) + "]", std::to_string(t.leader));
        }
        if (policy == Policy::Gatewayed && !t.liaison) {
            throw ConfigError("gatewayed policy requires every team to designate a liaison");
        }
    }
    if (fact_universe < 1) {
        throw RangeError("facts.universe", "[1,inf)", std::to_string(fact_universe));
    }
    if (tasks.count < 0) {
        throw RangeError("tasks.count", "[0,inf)", std::to_string(tasks.count));
    }
    if (tasks.k < 1) {
        throw RangeError("tasks.k", "[1,universe]", std::to_string(tasks.k));
    }
    if (tasks.k > fact_universe) {
        throw ConfigError("tasks.k (" + std::to_string(tasks.k) + ") exceeds the fact universe ("
            + std::to_string(fact_universe) + ")");
    }
    if (member_capacity < 1) {
        throw RangeError("member_capacity", "[1,inf)", std::to_string(member_capacity));
    }
    if (liaison_capacity < 1) {
        throw RangeError("liaison_capacity", "[1,inf)", std::to_string(liaison_capacity));
    }
    if (!(trust_up >= 0.0 && trust_up <= 1.0)) {
        throw RangeError("trust_up", "[0,1]", std::to_string(trust_up));
    }
    if (!(trust_down >= 0.0 && trust_down <= 1.0)) {
        throw RangeError("trust_down", "[0,1]", std::to_string(trust_down));
    }
    if (message_budget && *message_budget < 0) {
        throw RangeError("message_budget", "[0,inf)", std::to_string(*message_budget));
    }
}

Effectiveness effectiveness(const MetricMap& m)
{
    return Effectiveness{m.at("task_completion_rate"), m.at("mean_fact_latency"),
        static_cast<std::int64_t>(m.at("cross_team_delivered"))};
}

TeamWorld::TeamWorld(TeamParams params, std::uint64_t seed)
    : params_(std::move(params))
{
    params_.validate();
    AgentId next = 0;
    for (std::size_t ti = 0; ti < params_.teams.size(); ++ti) {
        const auto& spec = params_.teams[ti];
        Team team;
        team.id = static_cast<int>(ti);
        for (int i = 0; i < spec.size; ++i) {
            Engineer e;
            e.id = next++;
            e.team = team.id;
            e.rng = RngStream(seed, streams::kAgentStreamBase + e.id);
            if (spec.liaison && *spec.liaison == i) {
                e.role = Role::Liaison;
                team.liaison = e.id;
            } else if (spec.leader == i) {
                e.role = Role::Leader;
            }
            e.capacity = e.role == Role::Liaison ? params_.liaison_capacity : params_.member_capacity;
            if (spec.leader == i) {
                team.leader = e.id;
            }
            team.members.push_back(e.id);
            engineers_.push_back(std::move(e));
        }
        teams_.push_back(std::move(team));
    }
    topology_ = build_topology(teams_, params_.policy);
    staged_.resize(engineers_.size());
    assign_cursor_.assign(teams_.size(), 0);

    RngStream setup(seed, streams::kSetup);
    const int n_teams = static_cast<int>(teams_.size());
    for (FactId f = 0; f < params_.fact_universe; ++f) {
        int ti = 0;
        std::size_t member = 0;
        switch (params_.distribution) {
        case FactDistribution::RoundRobin:
            ti = f % n_teams;
            member = static_cast<std::size_t>(f / n_teams) % teams_[static_cast<std::size_t>(ti)].members.size();
            break;
        case FactDistribution::Random:
            ti = static_cast<int>(setup.uniform_index(static_cast<std::uint64_t>(n_teams)));
            member = setup.uniform_index(teams_[static_cast<std::size_t>(ti)].members.size());
            break;
        case FactDistribution::SingleTeam:
            ti = 0;
            member = static_cast<std::size_t>(f) % teams_[0].members.size();
            break;
        }
        const Team& team = teams_[static_cast<std::size_t>(ti)];
        owners_.push_back(team.members[member]);
        if (params_.initial == InitialKnowledge::Team) {
            for (AgentId m : team.members) {
                engineers_[m].knowledge.insert(f);
            }
        } else {
            engineers_[team.members[member]].knowledge.insert(f);
        }
    }

    RngStream workload(seed, streams::kWorkload);
    tasks_ = generate_tasks(workload, params_.tasks, params_.fact_universe);
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        // Tasks go to teams in turn; each team's leader deals them out to its
        // members in turn.
        Team& team = teams_[i % teams_.size()];
        int& cursor = assign_cursor_[i % teams_.size()];
        tasks_[i].assignee = team.members[static_cast<std::size_t>(cursor) % team.members.size()];
        ++cursor;
    }
}

void TeamWorld::begin_tick(StepContext& ctx)
{
    while (next_task_ < tasks_.size() && tasks_[next_task_].created_tick <= ctx.tick()) {
        create_task(tasks_[next_task_], ctx);
        ++next_task_;
    }
}

void TeamWorld::create_task(Task& task, StepContext& ctx)
{
    const Team& team = teams_[static_cast<std::size_t>(engineers_[task.assignee].team)];
    ctx.emit(team.leader, "assign",
        {{"task", task.id}, {"assignee", task.assignee}, {"deadline", static_cast<double>(task.deadline)}});
    for (FactId f : task.required_facts) {
        if (engineers_[task.assignee].knowledge.contains(f)) {
            continue;
        }
        if (params_.message_budget && sent_ >= *params_.message_budget) {
            break;
        }
        const AgentId owner = owners_[static_cast<std::size_t>(f)];
        const MessageId mid = send(owner, task.assignee, f, true, ctx.tick());
        // The request lands in the owner's current inbox, so the first hop
        // can leave this tick.
        engineers_[owner].inbox.push_back(mid);
        ++sent_;
        ctx.emit(owner, "send",
            {{"msg", mid}, {"fact", f}, {"to", task.assignee}, {"cross", messages_[mid].cross_team ? 1.0 : 0.0}});
    }
}

MessageId TeamWorld::send(AgentId origin, AgentId destination, FactId fact, bool addressed, Tick now)
{
    Message m;
    m.id = static_cast<MessageId>(messages_.size());
    m.fact = fact;
    m.origin = origin;
    m.destination = destination;
    m.created_tick = now;
    m.path = route(origin, destination, topology_);
    m.addressed = addressed;
    m.cross_team = engineers_[origin].team != engineers_[destination].team;
    messages_.push_back(std::move(m));
    ++in_flight_;
    return messages_.back().id;
}

MessageId TeamWorld::inject(AgentId holder, AgentId origin, AgentId destination, FactId fact, Tick created_tick)
{
    if (fact < 0 || fact >= params_.fact_universe) {
        throw RangeError("fact", "[0," + std::to_string(params_.fact_universe - 1) + "]", std::to_string(fact));
    }
    const MessageId mid = send(origin, destination, fact, true, created_tick);
    Message& m = messages_[mid];
    auto it = std::find(m.path.begin(), m.path.end(), holder);
    if (it == m.path.end()) {
        messages_.pop_back();
        --in_flight_;
        throw std::invalid_argument("holder is not on the message route");
    }
    m.hop = static_cast<std::size_t>(it - m.path.begin());
    engineers_[holder].inbox.push_back(mid);
    return mid;
}

std::vector<AgentId> TeamWorld::live_agents() const
{
    std::vector<AgentId> ids(engineers_.size());
    std::iota(ids.begin(), ids.end(), AgentId{0});
    return ids;
}

void TeamWorld::update_agent(AgentId id, StepContext& ctx)
{
    comm_tick(engineers_.at(id), ctx);
}

void TeamWorld::comm_tick(Engineer& e, StepContext& ctx)
{
    for (int processed = 0; processed < e.capacity && !e.inbox.empty(); ++processed) {
        const MessageId mid = e.inbox.front();
        e.inbox.pop_front();
        handle(e, mid, ctx);
    }
}

void TeamWorld::handle(Engineer& e, MessageId mid, StepContext& ctx)
{
    // Copy: broadcast() may grow messages_.
    const Message m = messages_[mid];
    const bool novel = !e.knowledge.contains(m.fact);
    if (m.hop > 0) {
        const AgentId from = m.path[m.hop - 1];
        const double before = e.trust.contains(from) ? e.trust.at(from) : 0.5;
        if (params_.trust_drop && !e.rng.bernoulli(before)) {
            --in_flight_;
            ++dropped_;
            ctx.emit(e.id, "drop", {{"msg", mid}, {"fact", m.fact}, {"from", from}});
            return;
        }
        const double after = update_trust(
            e, from, novel ? TrustOutcome::Novel : TrustOutcome::Duplicate, params_.trust_up, params_.trust_down);
        ctx.emit(e.id, "receive", {{"msg", mid}, {"fact", m.fact}, {"from", from}, {"novel", novel ? 1.0 : 0.0},
                                      {"trust", after}});
    }
    if (novel) {
        e.knowledge.insert(m.fact);
        ctx.emit(e.id, "learn", {{"fact", m.fact}, {"msg", mid}});
    }
    // The receiving liaison relays a new fact to the rest of its team.
    if (params_.policy == Policy::Gatewayed && novel && m.hop > 0 && e.role == Role::Liaison
        && engineers_[m.path[m.hop - 1]].team != e.team) {
        broadcast(e, m, ctx);
    }
    if (m.hop + 1 == m.path.size()) {
        --in_flight_;
        ++delivered_;
        const auto latency = static_cast<std::int64_t>(ctx.tick() - m.created_tick);
        const bool counted = m.addressed && m.cross_team;
        if (counted) {
            ++cross_delivered_;
            latency_sum_ += latency;
        }
        ctx.emit(e.id, "deliver", {{"msg", mid}, {"fact", m.fact}, {"origin", m.origin},
                                      {"latency", static_cast<double>(latency)}, {"cross", counted ? 1.0 : 0.0}});
        return;
    }
    const AgentId to = m.path[m.hop + 1];
    messages_[mid].hop = m.hop + 1;
    staged_[to].push_back(mid);
    ctx.emit(e.id, "forward",
        {{"msg", mid}, {"fact", m.fact}, {"to", to}, {"final", m.hop + 2 == m.path.size() ? 1.0 : 0.0}});
}

void TeamWorld::broadcast(Engineer& liaison, const Message& m, StepContext& ctx)
{
    const Team& team = teams_[static_cast<std::size_t>(liaison.team)];
    for (AgentId peer : team.members) {
        if (peer == liaison.id || peer == m.destination) {
            continue;
        }
        const MessageId copy = send(liaison.id, peer, m.fact, false, ctx.tick());
        // Copies queue behind whatever the liaison already holds.
        liaison.inbox.push_back(copy);
        ctx.emit(liaison.id, "broadcast", {{"msg", copy}, {"fact", m.fact}, {"to", peer}, {"source", m.id}});
    }
}

void TeamWorld::end_tick(StepContext& ctx)
{
    for (std::size_t i = 0; i < staged_.size(); ++i) {
        for (MessageId mid : staged_[i]) {
            engineers_[i].inbox.push_back(mid);
        }
        staged_[i].clear();
    }
    check_tasks(ctx);
}

void TeamWorld::check_tasks(StepContext& ctx)
{
    for (std::size_t i = 0; i < next_task_; ++i) {
        Task& t = tasks_[i];
        if (t.completed_tick || ctx.tick() > t.deadline) {
            continue;
        }
        for (const auto& e : engineers_) {
            if (std::includes(e.knowledge.begin(), e.knowledge.end(), t.required_facts.begin(), t.required_facts.end())) {
                t.completed_tick = ctx.tick();
                ++completed_;
                ctx.emit(std::nullopt, "task_complete", {{"task", t.id}, {"engineer", e.id}});
                break;
            }
        }
    }
}

bool TeamWorld::finished() const noexcept
{
    return next_task_ == tasks_.size() && in_flight_ == 0;
}

MetricMap TeamWorld::metrics() const
{
    MetricMap m;
    m["tasks_total"] = static_cast<double>(tasks_.size());
    m["tasks_completed"] = static_cast<double>(completed_);
    m["task_completion_rate"]
        = tasks_.empty() ? 0.0 : static_cast<double>(completed_) / static_cast<double>(tasks_.size());
    m["cross_team_delivered"] = static_cast<double>(cross_delivered_);
    m["mean_fact_latency"]
        = cross_delivered_ == 0 ? 0.0 : static_cast<double>(latency_sum_) / static_cast<double>(cross_delivered_);
    m["messages_sent"] = static_cast<double>(sent_);
    m["messages_delivered"] = static_cast<double>(delivered_);
    m["messages_dropped"] = static_cast<double>(dropped_);
    m["messages_in_flight"] = static_cast<double>(in_flight_);

    double trust_sum = 0.0;
    std::size_t trust_n = 0;
    for (const auto& e : engineers_) {
        for (const auto& [peer, value] : e.trust) {
            trust_sum += value;
            ++trust_n;
        }
    }
    m["mean_trust"] = trust_n == 0 ? 0.5 : trust_sum / static_cast<double>(trust_n);

    double su = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < teams_.size(); ++a) {
        for (std::size_t b = a + 1; b < teams_.size(); ++b) {
            su += shared_understanding(teams_[a], teams_[b], engineers_);
            ++pairs;
        }
    }
    m["shared_understanding"] = pairs == 0 ? 1.0 : su / static_cast<double>(pairs);
    return m;
}

} // namespace orgsim::team
