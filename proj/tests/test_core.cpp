#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "orgsim/engine.hpp"
#include "orgsim/events.hpp"
#include "orgsim/rng.hpp"

using namespace orgsim;

namespace {

// Minimal model: each agent emits one event per update.
struct Echo {
    std::vector<AgentId> ids;
    std::vector<AgentId> order;
    std::int64_t updates = 0;

    void begin_tick(StepContext&) { order.clear(); }
    std::vector<AgentId> live_agents() const { return ids; }
    void update_agent(AgentId id, StepContext& ctx)
    {
        order.push_back(id);
        ++updates;
        ctx.emit(id, "ping", {{"n", static_cast<double>(updates)}});
    }
    void end_tick(StepContext&) {}
    MetricMap metrics() const { return {{"updates", static_cast<double>(updates)}}; }
    bool finished() const { return false; }
};

static_assert(AgentModel<Echo>);

} // namespace

TEST_CASE("rng: fixed outputs for a pinned seed")
{
    // Frozen when the generator was pinned; any change here breaks every
    // previously exported result.
    RngStream r(42, 0);
    CHECK(r.next_u64() == 0x1ff785474f113b15ULL);
    CHECK(r.next_u64() == 0x4b7867ceff5d8325ULL);
    CHECK(r.next_u64() == 0x90ca7a95a9909966ULL);
    CHECK(RngStream(42, 1).next_u64() == 0x584870a53e6ddcdfULL);
    CHECK(RngStream::kVersion == 1);
}

TEST_CASE("rng: same key, same sequence")
{
    RngStream a(42, 0);
    RngStream b(42, 0);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_uniform() == b.next_uniform());
    }
    CHECK(a == b);
}

TEST_CASE("rng: uniform range and mean")
{
    RngStream r(7, 3);
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double d = r.next_uniform();
        REQUIRE(d >= 0.0);
        REQUIRE(d < 1.0);
        sum += d;
    }
    const double mean = sum / 10000.0;
    CHECK(mean >= 0.45);
    CHECK(mean <= 0.55);
}

TEST_CASE("rng: distinct streams differ and are uncorrelated")
{
    RngStream a(42, 0);
    RngStream b(42, 1);
    int equal = 0;
    double sxy = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double x = a.next_uniform();
        const double y = b.next_uniform();
        equal += x == y;
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    CHECK(equal == 0);
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double corr = cov / std::sqrt((sxx / n - (sx / n) * (sx / n)) * (syy / n - (sy / n) * (sy / n)));
    CHECK(std::abs(corr) < 0.05);
}

TEST_CASE("rng: uniform_index is unbiased (chi-square)")
{
    RngStream r(11, 5);
    std::array<int, 8> counts{};
    const int n = 8000;
    for (int i = 0; i < n; ++i) {
        ++counts[r.uniform_index(8)];
    }
    double chi2 = 0.0;
    for (int c : counts) {
        chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
    }
    // 7 degrees of freedom, 0.999 quantile.
    CHECK(chi2 < 24.32);
}

TEST_CASE("rng: uniform_int bounds, bernoulli edges, poisson mean")
{
    RngStream r(3, 9);
    for (int i = 0; i < 1000; ++i) {
        const auto v = r.uniform_int(-2, 4);
        REQUIRE(v >= -2);
        REQUIRE(v <= 4);
    }
    CHECK(r.uniform_int(5, 5) == 5);
    for (int i = 0; i < 100; ++i) {
        CHECK_FALSE(r.bernoulli(0.0));
        CHECK(r.bernoulli(1.0));
    }
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        sum += static_cast<double>(r.poisson(0.3));
    }
    CHECK(sum / 20000.0 == doctest::Approx(0.3).epsilon(0.05));
    CHECK(r.poisson(0.0) == 0);
}

TEST_CASE("rng: shuffle is a permutation")
{
    RngStream r(1, 1);
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    r.shuffle(std::span<int>(v));
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) {
        CHECK(sorted[static_cast<std::size_t>(i)] == i);
    }
}

TEST_CASE("clock and log")
{
    SimClock clock;
    CHECK(clock.now() == 0);
    clock.advance();
    CHECK(clock.now() == 1);

    EventLog log;
    log.append({2, 1, "a", {}});
    CHECK_THROWS_AS(log.append({1, 1, "a", {}}), std::logic_error);
    log.append({2, std::nullopt, "b", {{"x", 1.5}}});
    CHECK(log.total() == 2);
    CHECK(log.count("a") == 1);
    CHECK(log.count("zzz") == 0);

    EventLog counting(false);
    counting.append({1, 0, "a", {}});
    CHECK(counting.records().empty());
    CHECK(counting.count("a") == 1);
}

TEST_CASE("payload lookups")
{
    Payload p{{"a", 1.0}, {"b", 2.0}};
    CHECK(p.size() == 2);
    CHECK(p.at("b") == 2.0);
    CHECK_FALSE(p.find("c").has_value());
    CHECK_THROWS(p.at("c"));
}

TEST_CASE("events CSV export")
{
    EventLog log;
    log.append({1, 3, "move", {{"x", 1}, {"y", 0.25}}});
    log.append({2, std::nullopt, "tick", {}});
    CHECK(export_events_csv(log)
        == "tick,agent_id,kind,key,value\n"
           "1,3,move,x,1\n"
           "1,3,move,y,0.25\n"
           "2,,tick,,\n");
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(-2.0) == "-2");
}

TEST_CASE("engine: empty world only advances the clock")
{
    Echo m;
    SimClock clock;
    RngStream sched(1, streams::kSchedule);
    EventLog log;
    step_model(m, clock, sched, log);
    CHECK(clock.now() == 1);
    CHECK(log.total() == 0);
}

TEST_CASE("engine: each agent updated exactly once per tick, events counted")
{
    Echo m;
    m.ids = {0, 1, 2, 3, 4};
    SimClock clock;
    RngStream sched(1, streams::kSchedule);
    EventLog log;
    for (int t = 0; t < 20; ++t) {
        step_model(m, clock, sched, log);
        std::vector<AgentId> seen = m.order;
        std::sort(seen.begin(), seen.end());
        CHECK(seen == m.ids);
    }
    CHECK(log.total() == 100);
    CHECK(clock.now() == 20);
}

TEST_CASE("engine: same seed, same successor")
{
    Echo a;
    a.ids = {0, 1, 2, 3, 4, 5, 6};
    Echo b = a;
    SimClock ca;
    SimClock cb;
    RngStream sa(9, streams::kSchedule);
    RngStream sb(9, streams::kSchedule);
    EventLog la;
    EventLog lb;
    for (int t = 0; t < 5; ++t) {
        step_model(a, ca, sa, la);
        step_model(b, cb, sb, lb);
    }
    CHECK(la == lb);
    CHECK(a.order == b.order);
}

TEST_CASE("engine: schedule positions are fair")
{
    const std::size_t n = 5;
    std::vector<AgentId> ids(n);
    std::iota(ids.begin(), ids.end(), AgentId{0});
    RngStream sched(2024, streams::kSchedule);
    std::vector<std::vector<int>> freq(n, std::vector<int>(n, 0));
    const int ticks = 1000;
    for (int t = 0; t < ticks; ++t) {
        const auto order = schedule_order(ids, sched);
        for (std::size_t pos = 0; pos < n; ++pos) {
            ++freq[order[pos]][pos];
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t pos = 0; pos < n; ++pos) {
            CHECK(std::abs(freq[a][pos] / double(ticks) - 1.0 / n) <= 0.05);
        }
    }
}
