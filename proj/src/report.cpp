#include <string>

#include "orgsim/batch.hpp"
#include "orgsim/errors.hpp"

namespace orgsim {

using nlohmann::json;

json to_json(const Comparison& c)
{
    return json{{"metric", c.metric}, {"mean_a", c.mean_a}, {"mean_b", c.mean_b}, {"mean_diff", c.mean_diff},
        {"welch_t", c.welch_t}, {"degrees_of_freedom", c.degrees_of_freedom}, {"ci95_low", c.ci95_low},
        {"ci95_high", c.ci95_high}, {"n_a", c.n_a}, {"n_b", c.n_b}};
}

json to_json(const ValidationReport& r)
{
    json metrics = json::array();
    for (const auto& m : r.metrics) {
        metrics.push_back({{"metric", m.metric}, {"simulated_mean", m.simulated_mean},
            {"reference_value", m.reference_value}, {"tolerance", m.tolerance}, {"deviation", m.deviation},
            {"pass", m.pass}});
    }
    return json{{"metrics", metrics}, {"pass", r.pass}};
}

std::map<std::string, Reference> load_reference(std::string_view document)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed reference JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("reference must be an object of metric -> {value, tolerance}");
    }
    std::map<std::string, Reference> out;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const json& entry = it.value();
        if (!entry.is_object()) {
            throw ConfigError("reference entry '" + it.key() + "' must be an object");
        }
        Reference ref;
        bool has_value = false;
        bool has_tolerance = false;
        for (auto f = entry.begin(); f != entry.end(); ++f) {
            if (!f.value().is_number()) {
                throw ConfigError("'" + it.key() + "." + f.key() + "' must be a number");
            }
            if (f.key() == "value") {
                ref.value = f.value().get<double>();
                has_value = true;
            } else if (f.key() == "tolerance") {
                ref.tolerance = f.value().get<double>();
                has_tolerance = true;
            } else {
                throw ConfigError("unknown key '" + it.key() + "." + f.key() + "'");
            }
        }
        if (!has_value || !has_tolerance) {
            throw ConfigError("reference entry '" + it.key() + "' needs both 'value' and 'tolerance'");
        }
        if (!(ref.tolerance >= 0.0)) {
            throw RangeError(it.key() + ".tolerance", "[0,inf)", std::to_string(ref.tolerance));
        }
        out.emplace(it.key(), ref);
    }
    return out;
}

} // namespace orgsim
