#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "orgsim/batch.hpp"
#include "orgsim/errors.hpp"
#include "orgsim/scenario.hpp"
#include "orgsim/stats.hpp"
#include "orgsim/world.hpp"

using namespace orgsim;

namespace {

Scenario small_retail(int replications, Tick ticks = 200)
{
    Scenario s = load_scenario(R"({"model": "retail", "staff": [{"department": 0}, {"department": 1}]})");
    s.name = "small_retail";
    s.replications = replications;
    s.ticks = ticks;
    s.metric_interval = 50;
    s.seed = 77;
    return s;
}

std::size_t count_lines(const std::string& text)
{
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

} // namespace

TEST_CASE("loader: minimal document takes defaults")
{
    // Food is the one field the ant model requires.
    const Scenario s = load_scenario(R"({"model": "ant_foraging", "food": [{"cell": [1, 1], "units": 3}]})");
    CHECK(s.model == ModelKind::AntForaging);
    CHECK(s.name == "ant_foraging");
    AntConfig expected;
    expected.food = {FoodSpec{{1, 1}, 3}};
    CHECK(std::get<AntConfig>(s.config) == expected);
    CHECK_THROWS_AS(load_scenario(R"({"model": "ant_foraging"})"), ConfigError);

    const Scenario r = load_scenario(R"({"model": "retail"})");
    CHECK(std::get<RetailConfig>(r.config) == RetailConfig{});
    CHECK(s.seed == 1);
    CHECK(s.replications == 1);

    const Scenario t = load_scenario(R"({"model": "team_comms"})");
    CHECK(std::get<team::TeamParams>(t.config) == team::TeamParams{});
}

TEST_CASE("loader: errors name the offending key")
{
    try {
        load_scenario(R"({"model": "ant_foraging", "evaporation_rate": 1.5})");
        FAIL("expected RangeError");
    } catch (const RangeError& e) {
        CHECK(e.field() == "evaporation_rate");
        CHECK(std::string(e.what()).find("[0,1]") != std::string::npos);
    }
    try {
        load_scenario(R"({"model": "ant_foraging", "stratgy": "tandem_running"})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("stratgy") != std::string::npos);
    }
    CHECK_THROWS_AS(load_scenario(R"({"seed": 3})"), ConfigError);
    CHECK_THROWS_AS(load_scenario(R"({"model": "bees"})"), ConfigError);
    CHECK_THROWS_AS(load_scenario(R"({"model": "retail", "ticks": "many"})"), ConfigError);
    CHECK_THROWS_AS(load_scenario("{not json"), ConfigError);
    CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.json"), ConfigError);
}

TEST_CASE("loader: to_json round trip")
{
    for (auto kind : {ModelKind::AntForaging, ModelKind::Retail, ModelKind::TeamComms}) {
        const Scenario s = default_scenario(kind);
        const Scenario back = load_scenario(to_json(s).dump());
        CHECK(back == s);
    }
    const Scenario r = small_retail(3);
    CHECK(load_scenario(to_json(r).dump()) == r);
}

TEST_CASE("make_grid places random food off the nest, one source per cell")
{
    AntConfig cfg;
    cfg.width = 5;
    cfg.height = 5;
    cfg.nest = {2, 2};
    cfg.random_food = RandomFoodSpec{24, 1};
    const auto grid = make_grid(cfg, 9);
    CHECK(grid.food_sources.size() == 24);
    std::set<std::pair<int, int>> cells;
    for (const auto& f : grid.food_sources) {
        CHECK_FALSE((f.cell.x == 2 && f.cell.y == 2));
        cells.insert({f.cell.x, f.cell.y});
    }
    CHECK(cells.size() == 24);
    CHECK(make_grid(cfg, 9) == grid);
}

TEST_CASE("stats: Welch oracle")
{
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{2, 3, 4};
    const auto w = stats::welch(a, b);
    CHECK(w.mean_diff == doctest::Approx(-1.0));
    CHECK(w.t == doctest::Approx(-1.2247).epsilon(1e-4));
    CHECK(w.df == doctest::Approx(4.0));
    CHECK(w.ci95_low == doctest::Approx(-3.2669).epsilon(1e-4));
    CHECK(w.ci95_high == doctest::Approx(1.2669).epsilon(1e-4));

    const auto same = compare(a, a, "x");
    CHECK(same.mean_diff == 0.0);
    CHECK(same.welch_t == 0.0);
    CHECK(same.n_a == 3);

    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(stats::welch(one, a), InsufficientReplications);
    CHECK_THROWS_AS(compare(a, one), InsufficientReplications);

    const std::vector<double> c{5, 5, 5};
    const auto flat = stats::welch(c, c);
    CHECK(flat.t == 0.0);
    CHECK(flat.ci95_low == 0.0);
    CHECK(flat.ci95_high == 0.0);
}

TEST_CASE("stats: Mann-Whitney hand example")
{
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{4, 5, 6};
    const auto r = stats::mann_whitney(a, b);
    CHECK(r.u == 0.0);
    CHECK(r.p_less == doctest::Approx(0.0404).epsilon(0.01));
    const auto rev = stats::mann_whitney(b, a);
    CHECK(rev.u == 9.0);
    CHECK(rev.p_less > 0.9);
    // Ties get midranks.
    const std::vector<double> t{1, 1, 2};
    CHECK(stats::mann_whitney(t, t).u == 4.5);
}

TEST_CASE("batch: one replication equals a single run")
{
    const Scenario s = small_retail(1);
    const auto b = run_batch(s);
    REQUIRE(b.runs.size() == 1);
    CHECK(b.runs[0] == run(s));
}

TEST_CASE("batch: parallel and serial agree; CSV is reproducible")
{
    const Scenario s = small_retail(4);
    const auto par = run_batch(s);
    const auto ser = run_batch_serial(s);
    CHECK(par == ser);
    const std::string csv = export_csv(par);
    CHECK(csv == export_csv(run_batch(s)));
    CHECK(csv.rfind("scenario,replication,metric,tick,value\n", 0) == 0);
    std::size_t rows = 0;
    for (const auto& r : par.runs) {
        rows += r.series.size();
    }
    CHECK(count_lines(csv) == rows + 1);
    // Distinct seeds per replication.
    CHECK(par.runs[0].final_metrics != par.runs[1].final_metrics);
    CHECK(final_values(par, "conversions").size() == 4);
    CHECK_THROWS_AS(final_values(par, "nope"), std::runtime_error);

    BatchResult empty;
    empty.scenario = "none";
    CHECK(export_csv(empty) == "scenario,replication,metric,tick,value\n");
}

TEST_CASE("batch: CSV survives a parse and re-export")
{
    const Scenario s = small_retail(2, 120);
    const auto b = run_batch(s);
    const std::string csv = export_csv(b);

    BatchResult parsed;
    parsed.scenario = b.scenario;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string scenario;
        std::string rep;
        std::string metric;
        std::string tick;
        std::string value;
        std::getline(fields, scenario, ',');
        std::getline(fields, rep, ',');
        std::getline(fields, metric, ',');
        std::getline(fields, tick, ',');
        std::getline(fields, value, ',');
        const auto r = static_cast<std::size_t>(std::stoul(rep));
        if (parsed.runs.size() <= r) {
            parsed.runs.resize(r + 1);
        }
        parsed.runs[r].series.push_back(MetricSample{static_cast<Tick>(std::stoll(tick)), metric, std::stod(value)});
    }
    CHECK(export_csv(parsed) == csv);
}

TEST_CASE("runs compose: T then T' equals T + T'")
{
    for (auto kind : {ModelKind::AntForaging, ModelKind::Retail, ModelKind::TeamComms}) {
        Scenario s = default_scenario(kind);
        s.seed = 5;
        WorldState split = make_world(s, 5);
        WorldState whole = make_world(s, 5);
        RunResult r1;
        RunResult r2;
        advance(split, 70, 10, r1);
        advance(split, 150, 10, r1);
        advance(whole, 150, 10, r2);
        CHECK(split == whole);
        CHECK(r1.final_metrics == r2.final_metrics);
    }
}

TEST_CASE("zero ticks records only the initial snapshot")
{
    Scenario s = small_retail(1, 0);
    const auto r = run(s);
    CHECK(r.ticks_executed == 0);
    REQUIRE_FALSE(r.series.empty());
    for (const auto& m : r.series) {
        CHECK(m.tick == 0);
    }
    CHECK(r.series.size() == r.final_metrics.size());
}

TEST_CASE("baseline validation")
{
    const Scenario s = small_retail(3);
    const auto b = run_batch(s);
    const auto conv = final_values(b, "conversions");
    const double mean = stats::mean(conv);

    auto report = validate_baseline(b, {{"conversions", Reference{mean, 0.0}}});
    CHECK(report.pass);
    REQUIRE(report.metrics.size() == 1);
    CHECK(report.metrics[0].deviation == 0.0);

    report = validate_baseline(b, {{"conversions", Reference{mean + 1.0, 0.0}}});
    CHECK_FALSE(report.pass);
    report = validate_baseline(b, {{"conversions", Reference{mean + 1.0, 1.0}}});
    CHECK(report.pass);

    CHECK_THROWS_AS(validate_baseline(b, {{"bogus", Reference{1.0, 1.0}}}), ConfigError);

    const auto ref = load_reference(R"({"mean_wait": {"value": 2.5, "tolerance": 0.5}})");
    CHECK(ref.at("mean_wait").value == 2.5);
    CHECK(ref.at("mean_wait").tolerance == 0.5);
    CHECK_THROWS_AS(load_reference(R"({"mean_wait": {"value": 2.5}})"), ConfigError);
}
