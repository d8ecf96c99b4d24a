#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "orgsim/engine.hpp"
#include "orgsim/events.hpp"
#include "orgsim/rng.hpp"

namespace orgsim::ant {

struct Cell {
    int x = 0;
    int y = 0;

    friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Chebyshev (king-move) distance.
int chebyshev(Cell a, Cell b) noexcept;

enum class Strategy { MassRecruitment, TandemRecruitment };

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view text) noexcept;

enum class AntState {
    Seeking,
    ReturningWithFood,
    IdleAtNest,
    LeadingTandem,
    FollowingTandem,
    TravelingToKnownFood,
};

std::string_view to_string(AntState s) noexcept;

/// Per-cell trail intensity. Intensities never go negative.
class PheromoneField {
public:
    PheromoneField() = default;
    PheromoneField(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool in_bounds(Cell c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

    /// Throws BoundsError for cells outside the grid.
    double at(Cell c) const;
    double total() const noexcept;
    const std::vector<double>& cells() const noexcept { return intensity_; }

    friend bool operator==(const PheromoneField&, const PheromoneField&) = default;

private:
    friend void evaporate(PheromoneField&, double);
    friend void deposit(PheromoneField&, Cell, double);

    std::size_t index(Cell c) const noexcept
    {
        return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> intensity_;
};

/// Multiplies every cell by (1 - rate). Throws RangeError unless 0 <= rate <= 1.
void evaporate(PheromoneField& field, double rate);

/// Adds `amount` to one cell. Throws BoundsError off-grid and RangeError for
/// a negative amount.
void deposit(PheromoneField& field, Cell cell, double amount);

struct FoodSource {
    Cell cell;
    int remaining = 0;
    int initial = 0;

    friend bool operator==(const FoodSource&, const FoodSource&) = default;
};

/// Takes one unit. Throws NoFood when the source is exhausted.
void harvest(FoodSource& source);

/// Non-toroidal grid: the edges are walls.
struct GridWorld {
    int width = 0;
    int height = 0;
    Cell nest;
    std::vector<FoodSource> food_sources;
    PheromoneField pheromone;

    GridWorld() = default;
    GridWorld(int width, int height, Cell nest, std::vector<FoodSource> food);

    bool in_bounds(Cell c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }

    /// Source located at `c`, if any.
    FoodSource* food_at(Cell c) noexcept;
    const FoodSource* food_at(Cell c) const noexcept;

    friend bool operator==(const GridWorld&, const GridWorld&) = default;
};

/// In-bounds 8-neighbourhood of `c`, in a fixed (dx, dy) scan order.
std::vector<Cell> neighbors(Cell c, int width, int height);

/// One greedy king move from `from` toward `to`.
Cell step_toward(Cell from, Cell to) noexcept;

struct ForagingParams {
    Strategy strategy = Strategy::MassRecruitment;
    int n_ants = 50;
    double evaporation_rate = 0.02;
    double deposit_seek = 0.03;
    double deposit_return = 500.0;
    double exploration_prob = 0.05;
    double smoothing_bias = 0.1;
    Tick max_ticks = 5000;
    /// Tandem only: per-tick probability that an ant resting at the nest
    /// leaves to scout.
    double departure_prob = 0.2;
    /// End the run once every source is empty and nothing is being carried.
    bool stop_when_depleted = true;

    /// Throws RangeError naming the first offending field.
    void validate() const;

    friend bool operator==(const ForagingParams&, const ForagingParams&) = default;
};

struct Ant {
    AgentId id = 0;
    Cell position;
    AntState state = AntState::Seeking;
    int carrying = 0;
    /// Route back to the nest; back() is the current cell. Whenever a step
    /// lands next to the nest or next to an earlier cell of the route, the
    /// route is cut back to that cell, so it never holds loops.
    std::vector<Cell> path;
    std::optional<Cell> known_food;
    /// Destination while leading, travelling, or released by a leader.
    std::optional<Cell> target;
    std::optional<AgentId> partner;
    RngStream rng;

    friend bool operator==(const Ant&, const Ant&) = default;
};

/// Next cell for a seeking ant under mass recruitment: with probability
/// exploration_prob a uniform in-bounds neighbour, otherwise a neighbour
/// drawn with weight (intensity + smoothing_bias). The cell the ant just
/// left (`previous`) gets weight zero in the weighted draw; if nothing else
/// has positive weight the ant falls back to a uniform neighbour.
Cell choose_step_mass(Cell position, std::optional<Cell> previous, const PheromoneField& field, RngStream& rng,
    const ForagingParams& params);

/// Uniform in-bounds neighbour.
Cell choose_step_uniform(Cell position, int width, int height, RngStream& rng);

struct ForagingMetrics {
    std::optional<Tick> time_to_depletion;
    std::int64_t units_delivered = 0;
    std::int64_t ant_steps = 0;
    double efficiency = 0.0;
};

/// Efficiency is units per ant-step, 0 when no step was taken.
double foraging_efficiency(std::int64_t units_delivered, std::int64_t ant_steps) noexcept;

/// Reads the foraging summary back out of a final metric map.
ForagingMetrics foraging_metrics(const MetricMap& final_metrics);

/// The ant colony as an engine model.
class AntColony {
public:
    AntColony(GridWorld world, ForagingParams params, std::uint64_t seed);

    // Engine interface.
    void begin_tick(StepContext& ctx);
    std::vector<AgentId> live_agents() const;
    void update_agent(AgentId id, StepContext& ctx);
    void end_tick(StepContext& ctx);
    MetricMap metrics() const;
    bool finished() const noexcept;

    const GridWorld& world() const noexcept { return world_; }
    GridWorld& world() noexcept { return world_; }
    const std::vector<Ant>& ants() const noexcept { return ants_; }
    std::vector<Ant>& ants() noexcept { return ants_; }
    const ForagingParams& params() const noexcept { return params_; }

    std::int64_t delivered() const noexcept { return delivered_; }
    std::int64_t ant_steps() const noexcept { return ant_steps_; }
    std::int64_t initial_food() const noexcept { return initial_food_; }
    std::int64_t remaining_food() const noexcept;
    std::int64_t carried_food() const noexcept;
    std::optional<Tick> depletion_tick() const noexcept { return depletion_tick_; }

    friend bool operator==(const AntColony&, const AntColony&) = default;

private:
    void tick_mass(Ant& ant, StepContext& ctx);
    void tick_tandem(Ant& ant, StepContext& ctx);

    void move(Ant& ant, Cell to, StepContext& ctx);
    bool try_harvest(Ant& ant, StepContext& ctx);
    void step_back(Ant& ant, StepContext& ctx);
    void deliver(Ant& ant, StepContext& ctx);
    void recruit_or_depart(Ant& ant, StepContext& ctx);
    void travel(Ant& ant, StepContext& ctx);
    void lead(Ant& ant, StepContext& ctx);
    void release_follower(Ant& follower, Cell food, bool to_food, StepContext& ctx);
    void arrive_at_target(Ant& ant, StepContext& ctx);
    void begin_seeking(Ant& ant);
    void push_path(Ant& ant, Cell next);
    std::optional<Cell> previous_cell(const Ant& ant) const;

    GridWorld world_;
    ForagingParams params_;
    std::vector<Ant> ants_;
    std::int64_t initial_food_ = 0;
    std::int64_t delivered_ = 0;
    std::int64_t ant_steps_ = 0;
    std::optional<Tick> depletion_tick_;
};

} // namespace orgsim::ant
