// orgsim command-line front end: run, validate, compare, models.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "orgsim/batch.hpp"
#include "orgsim/errors.hpp"
#include "orgsim/scenario.hpp"
#include "orgsim/stats.hpp"
#include "orgsim/world.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace orgsim;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<Tick> ticks;
    std::optional<int> replications;

    json applied() const
    {
        json j = json::object();
        if (seed) {
            j["seed"] = *seed;
        }
        if (ticks) {
            j["ticks"] = *ticks;
        }
        if (replications) {
            j["replications"] = *replications;
        }
        return j;
    }
};

Scenario load(const std::string& path, const Overrides& o)
{
    if (!fs::exists(path)) {
        throw ConfigError("scenario file not found: " + path);
    }
    Scenario s = load_scenario_file(path);
    if (o.seed) {
        s.seed = *o.seed;
    }
    if (o.ticks) {
        s.ticks = *o.ticks;
    }
    if (o.replications) {
        if (*o.replications < 1) {
            throw RangeError("replications", "[1,inf)", std::to_string(*o.replications));
        }
        s.replications = *o.replications;
    }
    return s;
}

void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

json batch_summary(const Scenario& s, const BatchResult& batch, const Overrides& o, double wall_seconds)
{
    json means = json::object();
    if (!batch.runs.empty()) {
        for (const auto& [name, value] : batch.runs.front().final_metrics) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& r : batch.runs) {
                if (auto it = r.final_metrics.find(name); it != r.final_metrics.end()) {
                    sum += it->second;
                    ++n;
                }
            }
            means[name] = n == 0 ? 0.0 : sum / static_cast<double>(n);
        }
    }
    json ticks = json::array();
    for (const auto& r : batch.runs) {
        ticks.push_back(r.ticks_executed);
    }
    return json{{"scenario", s.name}, {"model", std::string(to_string(s.model))}, {"seed", s.seed},
        {"replications", s.replications}, {"ticks", s.ticks}, {"overrides", o.applied()},
        {"wall_time_seconds", wall_seconds}, {"ticks_executed", ticks}, {"final_metric_means", means},
        {"config", to_json(s)}};
}

int cmd_run(const std::string& path, const Overrides& o, const std::string& out_dir, bool events)
{
    const Scenario s = load(path, o);
    const auto start = std::chrono::steady_clock::now();
    const BatchResult batch = run_batch(s);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path dir(out_dir);
    write_file(dir / (s.name + ".metrics.csv"), export_csv(batch));
    write_file(dir / (s.name + ".summary.json"), batch_summary(s, batch, o, wall).dump(2) + "\n");
    if (events) {
        WorldState world = make_world(s, s.seed, true);
        RunResult r;
        advance(world, s.tick_limit(), s.metric_interval, r);
        write_file(dir / (s.name + ".events.csv"), export_events_csv(world.log));
    }
    std::cout << s.name << ": " << s.replications << " replication(s) written to " << dir.string() << "\n";
    return kOk;
}

int cmd_validate(const std::string& path, const std::string& reference_path, const Overrides& o,
    const std::string& out_dir)
{
    const Scenario s = load(path, o);
    std::ifstream in(reference_path);
    if (!in) {
        throw ConfigError("reference file not found: " + reference_path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    const auto reference = load_reference(text.str());
    const BatchResult batch = run_batch(s);
    const ValidationReport report = validate_baseline(batch, reference);
    write_file(fs::path(out_dir) / (s.name + ".validation.json"), to_json(report).dump(2) + "\n");
    for (const auto& m : report.metrics) {
        std::printf("%-24s mean %.6f reference %.6f tolerance %.6f %s\n", m.metric.c_str(), m.simulated_mean,
            m.reference_value, m.tolerance, m.pass ? "PASS" : "FAIL");
    }
    std::printf("validation %s\n", report.pass ? "PASS" : "FAIL");
    return kOk;
}

int cmd_compare(const std::string& path_a, const std::string& path_b, const std::string& metric, const Overrides& o,
    const std::string& out_dir)
{
    const Scenario a = load(path_a, o);
    const Scenario b = load(path_b, o);
    if (a.model != b.model) {
        throw ConfigError("cannot compare different models: '" + a.name + "' is " + std::string(to_string(a.model))
            + ", '" + b.name + "' is " + std::string(to_string(b.model)));
    }
    if (a.replications < 2 || b.replications < 2) {
        throw InsufficientReplications("compare needs at least 2 replications per scenario (got "
            + std::to_string(a.replications) + " and " + std::to_string(b.replications) + ")");
    }
    const BatchResult ba = run_batch(a);
    const BatchResult bb = run_batch(b);
    const Comparison c = compare(ba, bb, metric);
    write_file(fs::path(out_dir) / (a.name + "_vs_" + b.name + "." + metric + ".comparison.json"),
        to_json(c).dump(2) + "\n");
    std::printf("%s: %s - %s mean diff %.6f (95%% CI %.6f .. %.6f, t %.6f, df %.6f)\n", metric.c_str(),
        a.name.c_str(), b.name.c_str(), c.mean_diff, c.ci95_low, c.ci95_high, c.welch_t, c.degrees_of_freedom);
    return kOk;
}

int cmd_models()
{
    for (ModelKind m : {ModelKind::AntForaging, ModelKind::Retail, ModelKind::TeamComms}) {
        json schema = to_json(default_scenario(m));
        for (const char* common : {"name", "model", "seed", "ticks", "replications", "metric_interval"}) {
            schema.erase(common);
        }
        std::cout << to_string(m) << "\n" << schema.dump(2) << "\n\n";
    }
    std::cout << "common keys: name, model, seed, ticks, replications, metric_interval\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"orgsim: agent-based organisational simulation"};
    app.require_subcommand(1);

    Overrides o;
    std::string out_dir = ".";
    std::string scenario;
    std::string scenario_b;
    std::string reference;
    std::string metric;
    bool events = false;

    auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--seed", o.seed, "Base seed (replication r uses seed + r)");
        cmd->add_option("--ticks", o.ticks, "Ticks per replication");
        cmd->add_option("--replications", o.replications, "Number of replications");
        cmd->add_option("--out", out_dir, "Output directory");
    };

    auto* run_cmd = app.add_subcommand("run", "Run a scenario batch and export metrics");
    run_cmd->add_option("scenario", scenario, "Scenario JSON")->required();
    add_overrides(run_cmd);
    run_cmd->add_flag("--events", events, "Also export the event log of the first replication");

    auto* validate_cmd = app.add_subcommand("validate", "Check batch means against reference values");
    validate_cmd->add_option("scenario", scenario, "Scenario JSON")->required();
    validate_cmd->add_option("--reference", reference, "Reference JSON: metric -> {value, tolerance}")->required();
    add_overrides(validate_cmd);

    auto* compare_cmd = app.add_subcommand("compare", "Welch comparison of two scenarios on one metric");
    compare_cmd->add_option("a", scenario, "First scenario JSON")->required();
    compare_cmd->add_option("b", scenario_b, "Second scenario JSON")->required();
    compare_cmd->add_option("--metric", metric, "Final metric to compare")->required();
    add_overrides(compare_cmd);

    app.add_subcommand("models", "List built-in models and their parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (run_cmd->parsed()) {
            return cmd_run(scenario, o, out_dir, events);
        }
        if (validate_cmd->parsed()) {
            return cmd_validate(scenario, reference, o, out_dir);
        }
        if (compare_cmd->parsed()) {
            return cmd_compare(scenario, scenario_b, metric, o, out_dir);
        }
        return cmd_models();
    } catch (const ConfigError& e) {
        std::cerr << "orgsim: " << e.what() << "\n";
        return kConfigError;
    } catch (const InsufficientReplications& e) {
        std::cerr << "orgsim: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "orgsim: " << e.what() << "\n";
        return kRuntimeError;
    }
}
