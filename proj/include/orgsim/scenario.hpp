#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "orgsim/ant_foraging.hpp"
#include "orgsim/retail.hpp"
#include "orgsim/team_comms.hpp"

namespace orgsim {

enum class ModelKind { AntForaging, Retail, TeamComms };

std::string_view to_string(ModelKind m) noexcept;
std::optional<ModelKind> parse_model(std::string_view text) noexcept;

struct FoodSpec {
    ant::Cell cell;
    int units = 0;

    friend bool operator==(const FoodSpec&, const FoodSpec&) = default;
};

/// `count` sources of `units` each, placed uniformly at random (off the
/// nest, one per cell) from the replication seed.
struct RandomFoodSpec {
    int count = 0;
    int units = 0;

    friend bool operator==(const RandomFoodSpec&, const RandomFoodSpec&) = default;
};

struct AntConfig {
    int width = 50;
    int height = 50;
    ant::Cell nest{25, 25};
    std::vector<FoodSpec> food;
    std::optional<RandomFoodSpec> random_food;
    ant::ForagingParams params;

    friend bool operator==(const AntConfig&, const AntConfig&) = default;
};

struct RetailConfig {
    int departments = 3;
    std::vector<retail::StaffSpec> staff;
    retail::ManagerSpec manager;
    retail::RetailParams params;

    friend bool operator==(const RetailConfig&, const RetailConfig&) = default;
};

using ModelConfig = std::variant<AntConfig, RetailConfig, team::TeamParams>;

struct Scenario {
    std::string name;
    ModelKind model = ModelKind::AntForaging;
    std::uint64_t seed = 1;
    Tick ticks = 1000;
    int replications = 1;
    Tick metric_interval = 100;
    ModelConfig config;

    /// Engine steps a run may take: `ticks`, further capped by max_ticks for
    /// the ant model.
    Tick tick_limit() const noexcept;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses and validates a scenario document. Unknown keys and malformed
/// values raise ConfigError naming the key; out-of-range values raise
/// RangeError.
Scenario load_scenario(std::string_view document);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Full effective scenario (defaults included); load_scenario accepts it back.
nlohmann::json to_json(const Scenario& scenario);

/// Default scenario for a model, used by the models listing.
Scenario default_scenario(ModelKind model);

/// Builds the ant world for one replication seed (random food is placed here).
ant::GridWorld make_grid(const AntConfig& config, std::uint64_t seed);

} // namespace orgsim
