#pragma once

#include <map>
#include <string>
#include <vector>

#include "orgsim/scenario.hpp"
#include "orgsim/world.hpp"

namespace orgsim {

struct BatchResult {
    std::string scenario;
    /// Indexed by replication; replication r ran with seed = scenario seed + r.
    std::vector<RunResult> runs;

    friend bool operator==(const BatchResult&, const BatchResult&) = default;
};

/// Runs every replication, in parallel when built with OpenMP.
BatchResult run_batch(const Scenario& scenario);

/// Same result, one replication after another.
BatchResult run_batch_serial(const Scenario& scenario);

/// Final value of `metric` for each replication. Throws std::runtime_error
/// when a replication did not report it.
std::vector<double> final_values(const BatchResult& batch, const std::string& metric);

/// CSV with header `scenario,replication,metric,tick,value`, rows sorted by
/// (replication, metric, tick), values with 6 significant digits.
std::string export_csv(const BatchResult& batch);

struct Reference {
    double value = 0.0;
    double tolerance = 0.0;
};

struct MetricCheck {
    std::string metric;
    double simulated_mean = 0.0;
    double reference_value = 0.0;
    double tolerance = 0.0;
    double deviation = 0.0;
    bool pass = false;
};

struct ValidationReport {
    std::vector<MetricCheck> metrics;
    bool pass = false;
};

/// Pass per metric when |batch mean - reference| <= tolerance. Throws
/// ConfigError for a reference metric the batch does not report.
ValidationReport validate_baseline(const BatchResult& batch, const std::map<std::string, Reference>& reference);

/// Reads `{"metric": {"value": v, "tolerance": t}, ...}`.
std::map<std::string, Reference> load_reference(std::string_view document);

struct Comparison {
    std::string metric;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double mean_diff = 0.0;
    double welch_t = 0.0;
    double degrees_of_freedom = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
};

/// Welch comparison of per-replication final values (a minus b).
Comparison compare(const std::vector<double>& a, const std::vector<double>& b, const std::string& metric = "");
Comparison compare(const BatchResult& a, const BatchResult& b, const std::string& metric);

nlohmann::json to_json(const Comparison& c);
nlohmann::json to_json(const ValidationReport& r);

} // namespace orgsim
