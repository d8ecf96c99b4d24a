#include "orgsim/ant_foraging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "orgsim/errors.hpp"

namespace orgsim::ant {

namespace {

std::string cell_text(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

void check_unit_interval(const char* field, double v)
{
    if (!(v >= 0.0 && v <= 1.0)) {
        throw RangeError(field, "[0,1]", std::to_string(v));
    }
}

void check_non_negative(const char* field, double v)
{
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw RangeError(field, "[0,inf)", std::to_string(v));
    }
}

int sign(int v) noexcept { return (v > 0) - (v < 0); }

} // namespace

int chebyshev(Cell a, Cell b) noexcept { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

std::string_view to_string(Strategy s) noexcept
{
    return s == Strategy::MassRecruitment ? "mass_recruitment" : "tandem_recruitment";
}

std::optional<Strategy> parse_strategy(std::string_view text) noexcept
{
    if (text == "mass_recruitment" || text == "MassRecruitment") {
        return Strategy::MassRecruitment;
    }
    if (text == "tandem_recruitment" || text == "TandemRecruitment") {
        return Strategy::TandemRecruitment;
    }
    return std::nullopt;
}

std::string_view to_string(AntState s) noexcept
{
    switch (s) {
    case AntState::Seeking:
        return "Seeking";
    case AntState::ReturningWithFood:
        return "ReturningWithFood";
    case AntState::IdleAtNest:
        return "IdleAtNest";
    case AntState::LeadingTandem:
        return "LeadingTandem";
    case AntState::FollowingTandem:
        return "FollowingTandem";
    case AntState::TravelingToKnownFood:
        return "TravelingToKnownFood";
    }
    return "?";
}

PheromoneField::PheromoneField(int width, int height)
    : width_(width)
    , height_(height)
    , intensity_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0)
{
    if (width <= 0 || height <= 0) {
        throw RangeError("grid", "positive dimensions", std::to_string(width) + "x" + std::to_string(height));
    }
}

double PheromoneField::at(Cell c) const
{
    if (!in_bounds(c)) {
        throw BoundsError("cell " + cell_text(c) + " outside pheromone field");
    }
    return intensity_[index(c)];
}

double PheromoneField::total() const noexcept { return std::accumulate(intensity_.begin(), intensity_.end(), 0.0); }

void evaporate(PheromoneField& field, double rate)
{
    check_unit_interval("evaporation_rate", rate);
    if (rate == 0.0) {
        return;
    }
    const double keep = 1.0 - rate;
    double* cells = field.intensity_.data();
    const std::size_t n = field.intensity_.size();
#pragma omp simd
    for (std::size_t i = 0; i < n; ++i) {
        cells[i] *= keep;
    }
}

void deposit(PheromoneField& field, Cell cell, double amount)
{
    if (!field.in_bounds(cell)) {
        throw BoundsError("deposit at " + cell_text(cell) + " outside pheromone field");
    }
    check_non_negative("deposit amount", amount);
    field.intensity_[field.index(cell)] += amount;
}

void harvest(FoodSource& source)
{
    if (source.remaining <= 0) {
        throw NoFood();
    }
    --source.remaining;
}

GridWorld::GridWorld(int width_, int height_, Cell nest_, std::vector<FoodSource> food)
    : width(width_)
    , height(height_)
    , nest(nest_)
    , food_sources(std::move(food))
    , pheromone(width_, height_)
{
    if (!in_bounds(nest)) {
        throw BoundsError("nest " + cell_text(nest) + " outside grid");
    }
    for (const auto& f : food_sources) {
        if (!in_bounds(f.cell)) {
            throw BoundsError("food source " + cell_text(f.cell) + " outside grid");
        }
        if (f.initial <= 0 || f.remaining < 0 || f.remaining > f.initial) {
            throw RangeError("food.units", "[1,inf)", std::to_string(f.initial));
        }
    }
}

FoodSource* GridWorld::food_at(Cell c) noexcept
{
    auto it = std::find_if(food_sources.begin(), food_sources.end(), [c](const FoodSource& f) { return f.cell == c; });
    return it == food_sources.end() ? nullptr : &*it;
}

const FoodSource* GridWorld::food_at(Cell c) const noexcept
{
    return const_cast<GridWorld*>(this)->food_at(c);
}

std::vector<Cell> neighbors(Cell c, int width, int height)
{
    std::vector<Cell> out;
    out.reserve(8);
    for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
            if (dx == 0 && dy == 0) {
                continue;
            }
            Cell n{c.x + dx, c.y + dy};
            if (n.x >= 0 && n.y >= 0 && n.x < width && n.y < height) {
                out.push_back(n);
            }
        }
    }
    return out;
}

Cell step_toward(Cell from, Cell to) noexcept { return Cell{from.x + sign(to.x - from.x), from.y + sign(to.y - from.y)}; }

void ForagingParams::validate() const
{
    if (n_ants < 1) {
        throw RangeError("n_ants", "[1,inf)", std::to_string(n_ants));
    }
    check_unit_interval("evaporation_rate", evaporation_rate);
    check_non_negative("deposit_seek", deposit_seek);
    check_non_negative("deposit_return", deposit_return);
    check_unit_interval("exploration_prob", exploration_prob);
    check_non_negative("smoothing_bias", smoothing_bias);
    check_unit_interval("departure_prob", departure_prob);
    if (max_ticks < 1) {
        throw RangeError("max_ticks", "[1,inf)", std::to_string(max_ticks));
    }
}

Cell choose_step_uniform(Cell position, int width, int height, RngStream& rng)
{
    const auto options = neighbors(position, width, height);
    return options[rng.uniform_index(options.size())];
}

Cell choose_step_mass(Cell position, std::optional<Cell> previous, const PheromoneField& field, RngStream& rng,
    const ForagingParams& params)
{
    const auto options = neighbors(position, field.width(), field.height());
    if (rng.bernoulli(params.exploration_prob)) {
        return options[rng.uniform_index(options.size())];
    }
    double weights[8];
    double total = 0.0;
    for (std::size_t i = 0; i < options.size(); ++i) {
        // No U-turns while following the gradient.
        weights[i] = (previous && options[i] == *previous) ? 0.0 : field.at(options[i]) + params.smoothing_bias;
        total += weights[i];
    }
    if (!(total > 0.0)) {
        // Dead end, or beta = 0 on unmarked ground: wander.
        return options[rng.uniform_index(options.size())];
    }
    double pick = rng.next_uniform() * total;
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (weights[i] <= 0.0) {
            continue;
        }
        if (pick < weights[i]) {
            return options[i];
        }
        pick -= weights[i];
    }
    // Rounding left a sliver past the last bucket.
    for (std::size_t i = options.size(); i-- > 0;) {
        if (weights[i] > 0.0) {
            return options[i];
        }
    }
    return options.back();
}

double foraging_efficiency(std::int64_t units_delivered, std::int64_t ant_steps) noexcept
{
    return ant_steps == 0 ? 0.0 : static_cast<double>(units_delivered) / static_cast<double>(ant_steps);
}

ForagingMetrics foraging_metrics(const MetricMap& m)
{
    ForagingMetrics out;
    if (auto it = m.find("time_to_depletion"); it != m.end()) {
        out.time_to_depletion = static_cast<Tick>(it->second);
    }
    out.units_delivered = static_cast<std::int64_t>(m.at("units_delivered"));
    out.ant_steps = static_cast<std::int64_t>(m.at("ant_steps"));
    out.efficiency = foraging_efficiency(out.units_delivered, out.ant_steps);
    return out;
}

AntColony::AntColony(GridWorld world, ForagingParams params, std::uint64_t seed)
    : world_(std::move(world))
    , params_(params)
{
    params_.validate();
    ants_.reserve(static_cast<std::size_t>(params_.n_ants));
    for (int i = 0; i < params_.n_ants; ++i) {
        Ant a;
        a.id = static_cast<AgentId>(i);
        a.position = world_.nest;
        a.state = AntState::Seeking;
        a.rng = RngStream(seed, streams::kAgentStreamBase + a.id);
        ants_.push_back(std::move(a));
    }
    for (const auto& f : world_.food_sources) {
        initial_food_ += f.initial;
    }
}

std::int64_t AntColony::remaining_food() const noexcept
{
    std::int64_t total = 0;
    for (const auto& f : world_.food_sources) {
        total += f.remaining;
    }
    return total;
}

std::int64_t AntColony::carried_food() const noexcept
{
    std::int64_t total = 0;
    for (const auto& a : ants_) {
        total += a.carrying;
    }
    return total;
}

void AntColony::begin_tick(StepContext&)
{
    if (params_.strategy == Strategy::MassRecruitment) {
        evaporate(world_.pheromone, params_.evaporation_rate);
    }
}

std::vector<AgentId> AntColony::live_agents() const
{
    std::vector<AgentId> ids(ants_.size());
    std::iota(ids.begin(), ids.end(), AgentId{0});
    return ids;
}

void AntColony::update_agent(AgentId id, StepContext& ctx)
{
    Ant& ant = ants_.at(id);
    if (params_.strategy == Strategy::MassRecruitment) {
        tick_mass(ant, ctx);
    } else {
        tick_tandem(ant, ctx);
    }
}

void AntColony::end_tick(StepContext&) {}

MetricMap AntColony::metrics() const
{
    MetricMap m;
    m["units_delivered"] = static_cast<double>(delivered_);
    m["ant_steps"] = static_cast<double>(ant_steps_);
    m["efficiency"] = foraging_efficiency(delivered_, ant_steps_);
    m["food_remaining"] = static_cast<double>(remaining_food());
    m["food_carried"] = static_cast<double>(carried_food());
    if (depletion_tick_) {
        m["time_to_depletion"] = static_cast<double>(*depletion_tick_);
    }
    return m;
}

bool AntColony::finished() const noexcept
{
    return params_.stop_when_depleted && initial_food_ > 0 && remaining_food() == 0 && carried_food() == 0;
}

void AntColony::move(Ant& ant, Cell to, StepContext& ctx)
{
    const Cell from = ant.position;
    ant.position = to;
    ++ant_steps_;
    ctx.emit(ant.id, "move",
        {{"from_x", from.x}, {"from_y", from.y}, {"x", to.x}, {"y", to.y}});
}

bool AntColony::try_harvest(Ant& ant, StepContext& ctx)
{
    FoodSource* src = world_.food_at(ant.position);
    if (src == nullptr || src->remaining == 0) {
        return false;
    }
    harvest(*src);
    ant.carrying = 1;
    ant.state = AntState::ReturningWithFood;
    ctx.emit(ant.id, "harvest", {{"x", ant.position.x}, {"y", ant.position.y}, {"remaining", src->remaining}});
    if (!depletion_tick_ && remaining_food() == 0) {
        depletion_tick_ = ctx.tick();
    }
    return true;
}

void AntColony::step_back(Ant& ant, StepContext& ctx)
{
    if (!ant.path.empty()) {
        ant.path.pop_back();
    }
    const Cell next = ant.path.empty() ? world_.nest : ant.path.back();
    move(ant, next, ctx);
    if (ant.position == world_.nest) {
        deliver(ant, ctx);
    }
}

void AntColony::deliver(Ant& ant, StepContext& ctx)
{
    ant.path.clear();
    if (ant.carrying > 0) {
        ant.carrying = 0;
        ++delivered_;
        ctx.emit(ant.id, "deliver", {{"units", 1}});
    }
    if (params_.strategy == Strategy::MassRecruitment) {
        ant.state = AntState::Seeking;
        return;
    }
    recruit_or_depart(ant, ctx);
}

void AntColony::push_path(Ant& ant, Cell next)
{
    if (chebyshev(next, world_.nest) <= 1) {
        ant.path.assign(1, next);
        return;
    }
    for (std::size_t i = 0; i < ant.path.size(); ++i) {
        if (chebyshev(ant.path[i], next) <= 1) {
            ant.path.resize(i + 1);
            if (ant.path.back() != next) {
                ant.path.push_back(next);
            }
            return;
        }
    }
    ant.path.push_back(next);
}

std::optional<Cell> AntColony::previous_cell(const Ant& ant) const
{
    if (ant.path.size() >= 2) {
        return ant.path[ant.path.size() - 2];
    }
    if (ant.path.size() == 1) {
        return world_.nest;
    }
    return std::nullopt;
}

void AntColony::begin_seeking(Ant& ant)
{
    ant.state = AntState::Seeking;
    ant.target.reset();
    ant.partner.reset();
}

void AntColony::tick_mass(Ant& ant, StepContext& ctx)
{
    switch (ant.state) {
    case AntState::Seeking: {
        deposit(world_.pheromone, ant.position, params_.deposit_seek);
        const Cell next = choose_step_mass(ant.position, previous_cell(ant), world_.pheromone, ant.rng, params_);
        move(ant, next, ctx);
        if (next == world_.nest) {
            ant.path.clear();
            return;
        }
        push_path(ant, next);
        try_harvest(ant, ctx);
        return;
    }
    case AntState::ReturningWithFood:
        deposit(world_.pheromone, ant.position, params_.deposit_return);
        step_back(ant, ctx);
        return;
    default:
        // Tandem-only states never occur under mass recruitment.
        begin_seeking(ant);
        return;
    }
}

void AntColony::tick_tandem(Ant& ant, StepContext& ctx)
{
    switch (ant.state) {
    case AntState::Seeking: {
        const Cell next = choose_step_uniform(ant.position, world_.width, world_.height, ant.rng);
        move(ant, next, ctx);
        if (next == world_.nest) {
            ant.path.clear();
            ant.state = AntState::IdleAtNest;
            ctx.emit(ant.id, "rest", {{"x", next.x}, {"y", next.y}});
            return;
        }
        push_path(ant, next);
        if (try_harvest(ant, ctx)) {
            if (ant.known_food != ant.position) {
                ant.known_food = ant.position;
                ctx.emit(ant.id, "learn", {{"x", ant.position.x}, {"y", ant.position.y}});
            }
        }
        return;
    }
    case AntState::ReturningWithFood:
        step_back(ant, ctx);
        return;
    case AntState::IdleAtNest:
        if (ant.rng.bernoulli(params_.departure_prob)) {
            ant.state = AntState::Seeking;
            ctx.emit(ant.id, "depart", {{"x", ant.position.x}, {"y", ant.position.y}});
        }
        return;
    case AntState::LeadingTandem:
        lead(ant, ctx);
        return;
    case AntState::FollowingTandem:
        // Moved by its leader.
        return;
    case AntState::TravelingToKnownFood:
        travel(ant, ctx);
        return;
    }
}

void AntColony::recruit_or_depart(Ant& ant, StepContext& ctx)
{
    if (!ant.known_food) {
        ant.state = AntState::IdleAtNest;
        return;
    }
    std::vector<AgentId> idle;
    for (const auto& other : ants_) {
        if (other.id != ant.id && other.state == AntState::IdleAtNest && other.position == world_.nest) {
            idle.push_back(other.id);
        }
    }
    ant.target = ant.known_food;
    if (idle.empty()) {
        ant.state = AntState::TravelingToKnownFood;
        ctx.emit(ant.id, "depart_alone", {{"x", ant.known_food->x}, {"y", ant.known_food->y}});
        return;
    }
    Ant& follower = ants_[idle[ant.rng.uniform_index(idle.size())]];
    follower.state = AntState::FollowingTandem;
    follower.partner = ant.id;
    follower.path.clear();
    ant.state = AntState::LeadingTandem;
    ant.partner = follower.id;
    ctx.emit(ant.id, "recruit", {{"follower", follower.id}});
}

void AntColony::travel(Ant& ant, StepContext& ctx)
{
    const Cell next = step_toward(ant.position, *ant.target);
    move(ant, next, ctx);
    if (next != world_.nest) {
        push_path(ant, next);
    }
    if (next == *ant.target) {
        arrive_at_target(ant, ctx);
    }
}

void AntColony::lead(Ant& ant, StepContext& ctx)
{
    const Cell previous = ant.position;
    const Cell next = step_toward(ant.position, *ant.target);
    move(ant, next, ctx);
    if (next != world_.nest) {
        push_path(ant, next);
    }
    Ant& follower = ants_.at(*ant.partner);
    if (follower.position != previous) {
        move(follower, previous, ctx);
        if (previous == world_.nest) {
            follower.path.clear();
        } else {
            push_path(follower, previous);
        }
    }
    if (next == *ant.target) {
        arrive_at_target(ant, ctx);
    }
}

void AntColony::arrive_at_target(Ant& ant, StepContext& ctx)
{
    const Cell food = *ant.target;
    const bool was_leading = ant.state == AntState::LeadingTandem;
    const auto follower = ant.partner;
    ant.target.reset();
    ant.partner.reset();
    const bool harvested = try_harvest(ant, ctx);
    if (harvested) {
        if (ant.known_food != food) {
            ant.known_food = food;
            ctx.emit(ant.id, "learn", {{"x", food.x}, {"y", food.y}});
        }
    } else {
        if (ant.known_food) {
            ctx.emit(ant.id, "forget", {{"x", food.x}, {"y", food.y}});
            ant.known_food.reset();
        }
        begin_seeking(ant);
    }
    if (was_leading && follower) {
        release_follower(ants_.at(*follower), food, harvested, ctx);
    }
}

void AntColony::release_follower(Ant& follower, Cell food, bool to_food, StepContext& ctx)
{
    follower.partner.reset();
    if (to_food) {
        // Guided to within one step; learns the source when it gets there.
        follower.state = AntState::TravelingToKnownFood;
        follower.target = food;
    } else {
        begin_seeking(follower);
    }
    ctx.emit(follower.id, "release", {{"to_food", to_food ? 1.0 : 0.0}});
}

} // namespace orgsim::ant
