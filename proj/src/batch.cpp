#include "orgsim/batch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "orgsim/errors.hpp"
#include "orgsim/stats.hpp"

namespace orgsim {

namespace {

BatchResult empty_batch(const Scenario& scenario)
{
    BatchResult b;
    b.scenario = scenario.name;
    b.runs.resize(static_cast<std::size_t>(scenario.replications));
    return b;
}

} // namespace

BatchResult run_batch(const Scenario& scenario)
{
    BatchResult b = empty_batch(scenario);
    const long n = scenario.replications;
    // Each replication writes only its own slot, so the result does not
    // depend on which thread ran what.
#pragma omp parallel for schedule(dynamic, 1)
    for (long r = 0; r < n; ++r) {
        b.runs[static_cast<std::size_t>(r)] = run(scenario, scenario.seed + static_cast<std::uint64_t>(r));
    }
    return b;
}

BatchResult run_batch_serial(const Scenario& scenario)
{
    BatchResult b = empty_batch(scenario);
    for (std::size_t r = 0; r < b.runs.size(); ++r) {
        b.runs[r] = run(scenario, scenario.seed + r);
    }
    return b;
}

std::vector<double> final_values(const BatchResult& batch, const std::string& metric)
{
    std::vector<double> out;
    out.reserve(batch.runs.size());
    for (std::size_t r = 0; r < batch.runs.size(); ++r) {
        auto it = batch.runs[r].final_metrics.find(metric);
        if (it == batch.runs[r].final_metrics.end()) {
            throw std::runtime_error("replication " + std::to_string(r) + " of '" + batch.scenario
                + "' did not report metric '" + metric + "'");
        }
        out.push_back(it->second);
    }
    return out;
}

std::string export_csv(const BatchResult& batch)
{
    std::string out = "scenario,replication,metric,tick,value\n";
    char num[64];
    for (std::size_t r = 0; r < batch.runs.size(); ++r) {
        std::vector<const MetricSample*> rows;
        rows.reserve(batch.runs[r].series.size());
        for (const auto& s : batch.runs[r].series) {
            rows.push_back(&s);
        }
        std::sort(rows.begin(), rows.end(), [](const MetricSample* x, const MetricSample* y) {
            return std::tie(x->name, x->tick) < std::tie(y->name, y->tick);
        });
        for (const MetricSample* s : rows) {
            std::snprintf(num, sizeof num, "%.6g", s->value);
            out += batch.scenario;
            out += ',';
            out += std::to_string(r);
            out += ',';
            out += s->name;
            out += ',';
            out += std::to_string(s->tick);
            out += ',';
            out += num;
            out += '\n';
        }
    }
    return out;
}

ValidationReport validate_baseline(const BatchResult& batch, const std::map<std::string, Reference>& reference)
{
    ValidationReport report;
    report.pass = true;
    for (const auto& [metric, ref] : reference) {
        std::vector<double> values;
        try {
            values = final_values(batch, metric);
        } catch (const std::runtime_error&) {
            throw ConfigError("reference names metric '" + metric + "' which the scenario does not report");
        }
        MetricCheck c;
        c.metric = metric;
        c.simulated_mean = stats::mean(values);
        c.reference_value = ref.value;
        c.tolerance = ref.tolerance;
        c.deviation = std::abs(c.simulated_mean - ref.value);
        c.pass = c.deviation <= ref.tolerance;
        report.pass = report.pass && c.pass;
        report.metrics.push_back(c);
    }
    return report;
}

Comparison compare(const std::vector<double>& a, const std::vector<double>& b, const std::string& metric)
{
    const auto w = stats::welch(a, b);
    Comparison c;
    c.metric = metric;
    c.mean_a = stats::mean(a);
    c.mean_b = stats::mean(b);
    c.mean_diff = w.mean_diff;
    c.welch_t = w.t;
    c.degrees_of_freedom = w.df;
    c.ci95_low = w.ci95_low;
    c.ci95_high = w.ci95_high;
    c.n_a = a.size();
    c.n_b = b.size();
    return c;
}

Comparison compare(const BatchResult& a, const BatchResult& b, const std::string& metric)
{
    return compare(final_values(a, metric), final_values(b, metric), metric);
}

} // namespace orgsim
