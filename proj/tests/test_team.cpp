#include <algorithm>
#include <set>

#include "doctest.h"

#include "audit.hpp"
#include "orgsim/errors.hpp"
#include "orgsim/team_comms.hpp"

using namespace orgsim;
using namespace orgsim::team;

namespace {

std::vector<Team> two_teams(int a, int b, bool liaisons = true)
{
    std::vector<Team> teams(2);
    AgentId next = 0;
    for (int t = 0; t < 2; ++t) {
        teams[t].id = t;
        const int n = t == 0 ? a : b;
        for (int i = 0; i < n; ++i) {
            teams[t].members.push_back(next++);
        }
        if (liaisons) {
            teams[t].liaison = teams[t].members.front();
        }
        teams[t].leader = teams[t].members.front();
    }
    return teams;
}

std::size_t cross_edges(const Topology& t, const std::vector<Team>& teams)
{
    const std::set<AgentId> a(teams[0].members.begin(), teams[0].members.end());
    return static_cast<std::size_t>(std::count_if(t.edges().begin(), t.edges().end(),
        [&](const auto& e) { return a.contains(e.first) != a.contains(e.second); }));
}

TeamParams sized(Policy policy, int a, int b)
{
    TeamParams p;
    p.policy = policy;
    p.teams = {TeamSpec{a, 0, 0}, TeamSpec{b, 0, 0}};
    return p;
}

void run_ticks(TeamWorld& w, SimClock& clock, RngStream& sched, EventLog& log, int n)
{
    for (int t = 0; t < n; ++t) {
        step_model(w, clock, sched, log);
    }
}

} // namespace

TEST_CASE("topology edge counts for teams of 4 and 5")
{
    const auto teams = two_teams(4, 5);
    const auto any = build_topology(teams, Policy::AnyToAny);
    const auto gated = build_topology(teams, Policy::Gatewayed);
    CHECK(cross_edges(any, teams) == 20);
    CHECK(cross_edges(gated, teams) == 1);
    CHECK(any.edges().size() - cross_edges(any, teams) == 16);
    CHECK(gated.edges().size() - cross_edges(gated, teams) == 16);
    CHECK(gated.has_edge(4, 0));
    CHECK_FALSE(gated.has_edge(1, 5));
}

TEST_CASE("gatewayed topology without a liaison is rejected")
{
    CHECK_THROWS_AS(build_topology(two_teams(3, 3, false), Policy::Gatewayed), ConfigError);
    CHECK_NOTHROW(build_topology(two_teams(3, 3, false), Policy::AnyToAny));
    TeamParams p = sized(Policy::Gatewayed, 3, 3);
    p.teams[1].liaison.reset();
    CHECK_THROWS_AS(TeamWorld(p, 1), ConfigError);
    std::vector<Team> one(1);
    one[0].members = {0, 1};
    CHECK_THROWS_AS(build_topology(one, Policy::AnyToAny), ConfigError);
}

TEST_CASE("route lengths")
{
    const auto teams = two_teams(4, 5);
    const auto any = build_topology(teams, Policy::AnyToAny);
    const auto gated = build_topology(teams, Policy::Gatewayed);
    CHECK(route(1, 2, gated).size() - 1 == 1);
    const auto path = route(1, 6, gated);
    CHECK(path == std::vector<AgentId>{1, 0, 4, 6});
    CHECK(route(1, 6, any).size() - 1 == 1);
    CHECK_THROWS_AS(route(2, 2, any), std::invalid_argument);
    CHECK_THROWS_AS(route(0, 1, Topology(Policy::AnyToAny, 3)), Unreachable);
}

TEST_CASE("trust update and clamp")
{
    Engineer e;
    CHECK(update_trust(e, 3, TrustOutcome::Novel, 0.1, 0.1) == doctest::Approx(0.6));
    e.trust[3] = 0.95;
    CHECK(update_trust(e, 3, TrustOutcome::Novel, 0.1, 0.1) == 1.0);
    e.trust[4] = 0.01;
    CHECK(update_trust(e, 4, TrustOutcome::Duplicate, 0.1, 0.1) == 0.0);
}

TEST_CASE("shared understanding")
{
    std::vector<Engineer> es(2);
    es[0].knowledge = {1, 2};
    es[1].knowledge = {1, 2};
    Team a;
    a.members = {0};
    Team b;
    b.members = {1};
    CHECK(shared_understanding(a, b, es) == 1.0);
    es[1].knowledge = {3, 4};
    CHECK(shared_understanding(a, b, es) == 0.0);
    es[1].knowledge = {2, 3};
    CHECK(shared_understanding(a, b, es) == doctest::Approx(1.0 / 3.0));
    es[0].knowledge.clear();
    es[1].knowledge.clear();
    CHECK(shared_understanding(a, b, es) == 1.0);
}

TEST_CASE("generate_tasks")
{
    RngStream r(5, streams::kWorkload);
    TaskParams p;
    p.k = 21;
    CHECK_THROWS_AS(generate_tasks(r, p, 20), ConfigError);

    p = {};
    p.count = 30;
    p.k = 3;
    p.spacing = 2;
    RngStream a(5, streams::kWorkload);
    RngStream b(5, streams::kWorkload);
    const auto ta = generate_tasks(a, p, 10);
    CHECK(ta == generate_tasks(b, p, 10));
    REQUIRE(ta.size() == 30);
    for (std::size_t i = 0; i < ta.size(); ++i) {
        CHECK(ta[i].required_facts.size() == 3);
        CHECK(*ta[i].required_facts.begin() >= 0);
        CHECK(*ta[i].required_facts.rbegin() < 10);
        CHECK(ta[i].created_tick == 1 + static_cast<Tick>(i) * 2);
        CHECK(ta[i].deadline == ta[i].created_tick + p.deadline);
    }
}

TEST_CASE("inbox is FIFO and bounded by capacity")
{
    TeamParams p = sized(Policy::AnyToAny, 3, 3);
    p.tasks.count = 0;
    p.member_capacity = 2;
    p.liaison_capacity = 2;
    TeamWorld w(p, 1);
    // Engineer 1 relays three single-hop messages it originates.
    std::vector<MessageId> ids;
    for (int i = 0; i < 3; ++i) {
        ids.push_back(w.inject(1, 1, 2, 0, 0));
    }
    EventLog log;
    StepContext ctx(1, log);
    w.comm_tick(w.engineers()[1], ctx);
    REQUIRE(w.engineers()[1].inbox.size() == 1);
    CHECK(w.engineers()[1].inbox.front() == ids[2]);
    std::vector<double> order;
    for (const auto& e : log.records()) {
        if (e.kind == "forward") {
            order.push_back(e.payload.at("msg"));
        }
    }
    CHECK(order == std::vector<double>{static_cast<double>(ids[0]), static_cast<double>(ids[1])});
}

TEST_CASE("congestion: five messages through a capacity-1 liaison")
{
    // Teams of 4 (0..3) and 5 (4..8), liaisons 0 and 4.
    TeamParams p = sized(Policy::Gatewayed, 4, 5);
    p.tasks.count = 0;
    p.liaison_capacity = 1;
    TeamWorld w(p, 3);
    std::set<double> injected;
    for (AgentId dst : {5, 6, 7, 8, 5}) {
        injected.insert(static_cast<double>(w.inject(4, 1, dst, 0, 0)));
    }
    SimClock clock;
    RngStream sched(3, streams::kSchedule);
    EventLog log;
    run_ticks(w, clock, sched, log, 10);
    std::vector<Tick> departures;
    for (const auto& e : log.records()) {
        if (e.kind == "forward" && e.payload.at("final") == 1.0 && injected.contains(e.payload.at("msg"))) {
            departures.push_back(e.tick);
        }
    }
    REQUIRE(departures.size() == 5);
    CHECK(departures.back() - departures.front() == 4);
    for (std::size_t i = 1; i < departures.size(); ++i) {
        CHECK(departures[i] == departures[i - 1] + 1);
    }
}

TEST_CASE("liaison broadcasts a new cross-team fact to its team")
{
    TeamParams p = sized(Policy::Gatewayed, 3, 3);
    p.tasks.count = 0;
    TeamWorld w(p, 2);
    w.inject(3, 1, 4, 0, 0);
    SimClock clock;
    RngStream sched(2, streams::kSchedule);
    EventLog log;
    run_ticks(w, clock, sched, log, 6);
    // Copies go to everyone in team B except the liaison and the addressee.
    CHECK(log.count("broadcast") == 1);
    for (AgentId id : {3, 4, 5}) {
        CHECK(w.engineers()[id].knowledge.contains(0));
    }
    CHECK(w.in_flight() == 0);
    CHECK(w.cross_delivered() == 1);
}

TEST_CASE("any-to-any single cross-team fact arrives in one tick")
{
    TeamParams p = sized(Policy::AnyToAny, 4, 4);
    p.fact_universe = 1;
    p.distribution = FactDistribution::SingleTeam;
    p.tasks.count = 2;
    p.tasks.k = 1;
    TeamWorld w(p, 1);
    REQUIRE(w.tasks()[1].assignee == 4);
    SimClock clock;
    RngStream sched(1, streams::kSchedule);
    EventLog log;
    run_ticks(w, clock, sched, log, 5);
    const auto eff = effectiveness(w.metrics());
    CHECK(eff.latency_count == 1);
    CHECK(eff.mean_fact_latency == 1.0);
    CHECK(eff.task_completion_rate == 1.0);
    CHECK(w.finished());
}

TEST_CASE("zero message budget: completion equals what is known at the start")
{
    TeamParams p = sized(Policy::AnyToAny, 4, 4);
    p.fact_universe = 6;
    p.tasks.count = 40;
    p.tasks.k = 2;
    p.initial = InitialKnowledge::Team;
    p.message_budget = 0;
    TeamWorld w(p, 11);
    // A task counts when some single engineer already holds all its facts.
    double completable = 0.0;
    for (const auto& t : w.tasks()) {
        completable += std::any_of(w.engineers().begin(), w.engineers().end(), [&](const Engineer& e) {
            return std::includes(
                e.knowledge.begin(), e.knowledge.end(), t.required_facts.begin(), t.required_facts.end());
        }) ? 1 : 0;
    }
    completable /= static_cast<double>(w.tasks().size());
    REQUIRE(completable > 0.0);
    REQUIRE(completable < 1.0);
    SimClock clock;
    RngStream sched(11, streams::kSchedule);
    EventLog log;
    run_ticks(w, clock, sched, log, 200);
    const auto m = w.metrics();
    CHECK(m.at("messages_sent") == 0.0);
    CHECK(m.at("task_completion_rate") == doctest::Approx(completable));
}

TEST_CASE("params validation")
{
    TeamParams p;
    CHECK_NOTHROW(p.validate());
    p.tasks.k = 25;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.trust_up = 1.5;
    CHECK_THROWS_AS(p.validate(), RangeError);
    p = {};
    p.teams = {TeamSpec{4, 0, 0}};
    CHECK_THROWS_AS(p.validate(), RangeError);
    p = {};
    p.teams[0].leader = 4;
    CHECK_THROWS_AS(p.validate(), RangeError);
    CHECK(parse_policy("gatewayed") == Policy::Gatewayed);
    CHECK_FALSE(parse_policy("mesh").has_value());
}

TEST_CASE("property: knowledge only grows, trust bounded, hops legal, latency dominates path length")
{
    for (Policy policy : {Policy::AnyToAny, Policy::Gatewayed}) {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            TeamParams p = sized(policy, 4, 5);
            p.distribution = FactDistribution::Random;
            p.tasks.count = 30;
            p.tasks.k = 3;
            p.tasks.spacing = 3;
            p.trust_drop = seed % 2 == 0;
            p.member_capacity = 1;
            TeamWorld w(p, seed);
            const TeamWorld initial = w;
            SimClock clock;
            RngStream sched(seed, streams::kSchedule);
            EventLog log;
            for (int t = 0; t < 300; ++t) {
                std::vector<FactSet> before;
                for (const auto& e : w.engineers()) {
                    before.push_back(e.knowledge);
                }
                step_model(w, clock, sched, log);
                for (std::size_t i = 0; i < before.size(); ++i) {
                    const auto& now = w.engineers()[i].knowledge;
                    REQUIRE(std::includes(now.begin(), now.end(), before[i].begin(), before[i].end()));
                    for (const auto& [peer, v] : w.engineers()[i].trust) {
                        REQUIRE(v >= 0.0);
                        REQUIRE(v <= 1.0);
                    }
                }
                REQUIRE(w.in_flight() >= 0);
            }
            for (const auto& e : log.records()) {
                if (e.kind == "deliver") {
                    const auto& m = w.messages()[static_cast<std::size_t>(e.payload.at("msg"))];
                    CHECK(e.payload.at("latency") >= static_cast<double>(m.path.size() - 1));
                }
            }
            std::string problem;
            const auto recomputed = audit::team_metrics(initial, log, &problem);
            CHECK(problem.empty());
            CHECK(audit::mismatches(w.metrics(), recomputed).empty());
        }
    }
}
