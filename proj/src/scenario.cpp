#include "orgsim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "orgsim/errors.hpp"

namespace orgsim {

using nlohmann::json;

std::string_view to_string(ModelKind m) noexcept
{
    switch (m) {
    case ModelKind::AntForaging:
        return "ant_foraging";
    case ModelKind::Retail:
        return "retail";
    case ModelKind::TeamComms:
        return "team_comms";
    }
    return "?";
}

std::optional<ModelKind> parse_model(std::string_view text) noexcept
{
    if (text == "ant_foraging") {
        return ModelKind::AntForaging;
    }
    if (text == "retail") {
        return ModelKind::Retail;
    }
    if (text == "team_comms") {
        return ModelKind::TeamComms;
    }
    return std::nullopt;
}

Tick Scenario::tick_limit() const noexcept
{
    if (const auto* a = std::get_if<AntConfig>(&config)) {
        return std::min(ticks, a->params.max_ticks);
    }
    return ticks;
}

namespace {

/// Reads the keys of one JSON object and rejects any it did not consume.
class Reader {
public:
    Reader(const json& object, std::string prefix)
        : object_(object)
        , prefix_(std::move(prefix))
    {
        if (!object_.is_object()) {
            throw ConfigError("'" + (prefix_.empty() ? std::string("scenario") : prefix_) + "' must be an object");
        }
    }

    std::string path(std::string_view key) const { return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key); }

    const json* get(std::string_view key)
    {
        seen_.insert(std::string(key));
        auto it = object_.find(key);
        return it == object_.end() ? nullptr : &*it;
    }

    bool has(std::string_view key) const { return object_.contains(key); }

    template <class T>
    void read(std::string_view key, T& out)
    {
        if (const json* v = get(key)) {
            out = convert<T>(*v, path(key));
        }
    }

    template <class T>
    static T convert(const json& v, const std::string& where)
    {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                throw ConfigError("'" + where + "' must be a boolean");
            }
            return v.get<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) {
                throw ConfigError("'" + where + "' must be an integer");
            }
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_unsigned()) {
                    return static_cast<T>(v.get<std::uint64_t>());
                }
                const auto s = v.get<std::int64_t>();
                if (s < 0) {
                    throw RangeError(where, "[0,inf)", std::to_string(s));
                }
                return static_cast<T>(s);
            } else {
                return static_cast<T>(v.get<std::int64_t>());
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) {
                throw ConfigError("'" + where + "' must be a number");
            }
            return v.get<double>();
        } else {
            if (!v.is_string()) {
                throw ConfigError("'" + where + "' must be a string");
            }
            return v.get<std::string>();
        }
    }

    void finish() const
    {
        for (auto it = object_.begin(); it != object_.end(); ++it) {
            if (!seen_.contains(it.key())) {
                throw ConfigError("unknown key '" + path(it.key()) + "'");
            }
        }
    }

private:
    const json& object_;
    std::string prefix_;
    std::set<std::string, std::less<>> seen_;
};

ant::Cell read_cell(const json& v, const std::string& where)
{
    if (!v.is_array() || v.size() != 2) {
        throw ConfigError("'" + where + "' must be an [x, y] pair");
    }
    return ant::Cell{Reader::convert<int>(v[0], where + "[0]"), Reader::convert<int>(v[1], where + "[1]")};
}

const json& read_array(Reader& r, std::string_view key, const json& empty)
{
    const json* v = r.get(key);
    if (v == nullptr) {
        return empty;
    }
    if (!v->is_array()) {
        throw ConfigError("'" + r.path(key) + "' must be an array");
    }
    return *v;
}

AntConfig read_ant(Reader& r)
{
    AntConfig c;
    auto& p = c.params;
    if (const json* s = r.get("strategy")) {
        const auto text = Reader::convert<std::string>(*s, "strategy");
        auto parsed = ant::parse_strategy(text);
        if (!parsed) {
            throw ConfigError("'strategy' must be mass_recruitment or tandem_recruitment (got " + text + ")");
        }
        p.strategy = *parsed;
    }
    if (const json* g = r.get("grid")) {
        Reader gr(*g, "grid");
        gr.read("width", c.width);
        gr.read("height", c.height);
        gr.finish();
    }
    if (const json* n = r.get("nest")) {
        c.nest = read_cell(*n, "nest");
    }
    const json empty = json::array();
    const json& food = read_array(r, "food", empty);
    for (std::size_t i = 0; i < food.size(); ++i) {
        Reader fr(food[i], "food[" + std::to_string(i) + "]");
        FoodSpec f;
        const json* cell = fr.get("cell");
        if (cell == nullptr) {
            throw ConfigError("'" + fr.path("cell") + "' is required");
        }
        f.cell = read_cell(*cell, fr.path("cell"));
        fr.read("units", f.units);
        fr.finish();
        c.food.push_back(f);
    }
    if (const json* rf = r.get("random_food")) {
        Reader rr(*rf, "random_food");
        RandomFoodSpec spec;
        rr.read("count", spec.count);
        rr.read("units", spec.units);
        rr.finish();
        c.random_food = spec;
    }
    r.read("n_ants", p.n_ants);
    r.read("evaporation_rate", p.evaporation_rate);
    r.read("deposit_seek", p.deposit_seek);
    r.read("deposit_return", p.deposit_return);
    r.read("exploration_prob", p.exploration_prob);
    r.read("smoothing_bias", p.smoothing_bias);
    r.read("max_ticks", p.max_ticks);
    r.read("departure_prob", p.departure_prob);
    r.read("stop_when_depleted", p.stop_when_depleted);
    return c;
}

void validate_ant(const AntConfig& c)
{
    c.params.validate();
    if (c.width < 1) {
        throw RangeError("grid.width", "[1,inf)", std::to_string(c.width));
    }
    if (c.height < 1) {
        throw RangeError("grid.height", "[1,inf)", std::to_string(c.height));
    }
    auto in_grid = [&](ant::Cell x) { return x.x >= 0 && x.y >= 0 && x.x < c.width && x.y < c.height; };
    const std::string bounds = "[0," + std::to_string(c.width - 1) + "]x[0," + std::to_string(c.height - 1) + "]";
    if (!in_grid(c.nest)) {
        throw RangeError("nest", bounds, "[" + std::to_string(c.nest.x) + "," + std::to_string(c.nest.y) + "]");
    }
    if (c.food.empty() && (!c.random_food || c.random_food->count == 0)) {
        throw ConfigError("ant_foraging scenario needs 'food' or 'random_food'");
    }
    for (const auto& f : c.food) {
        if (!in_grid(f.cell)) {
            throw RangeError("food.cell", bounds, "[" + std::to_string(f.cell.x) + "," + std::to_string(f.cell.y) + "]");
        }
        if (f.units < 1) {
            throw RangeError("food.units", "[1,inf)", std::to_string(f.units));
        }
    }
    if (c.random_food) {
        const long cells = static_cast<long>(c.width) * c.height - 1 - static_cast<long>(c.food.size());
        if (c.random_food->count < 0 || c.random_food->count > cells) {
            throw RangeError("random_food.count", "[0," + std::to_string(cells) + "]", std::to_string(c.random_food->count));
        }
        if (c.random_food->units < 1) {
            throw RangeError("random_food.units", "[1,inf)", std::to_string(c.random_food->units));
        }
    }
    // GridWorld checks nest and food placement.
    (void)make_grid(c, 0);
}

RetailConfig read_retail(Reader& r)
{
    RetailConfig c;
    auto& p = c.params;
    r.read("departments", c.departments);
    const json empty = json::array();
    const json& staff = read_array(r, "staff", empty);
    for (std::size_t i = 0; i < staff.size(); ++i) {
        Reader sr(staff[i], "staff[" + std::to_string(i) + "]");
        retail::StaffSpec s;
        sr.read("department", s.department);
        sr.read("skill", s.skill);
        sr.read("attitude", s.attitude);
        if (const json* band = sr.get("age_band")) {
            const auto text = Reader::convert<std::string>(*band, sr.path("age_band"));
            auto parsed = retail::parse_age_band(text);
            if (!parsed) {
                throw ConfigError("'" + sr.path("age_band") + "' must be Under25, 25to45 or Over45 (got " + text + ")");
            }
            s.age_band = *parsed;
        }
        sr.finish();
        c.staff.push_back(s);
    }
    if (const json* m = r.get("manager")) {
        Reader mr(*m, "manager");
        mr.read("review_period", c.manager.review_period);
        mr.read("min_staff_floor", c.manager.min_staff_floor);
        mr.finish();
    }
    r.read("arrival_rate", p.arrival_rate);
    r.read("browser_fraction", p.browser_fraction);
    r.read("base_service_time", p.base_service_time);
    r.read("skill_speedup", p.skill_speedup);
    r.read("base_purchase_prob", p.base_purchase_prob);
    r.read("attitude_weight", p.attitude_weight);
    r.read("goal_bonus", p.goal_bonus);
    r.read("impulse_prob", p.impulse_prob);
    r.read("browse_exit_prob", p.browse_exit_prob);
    if (const json* pt = r.get("patience")) {
        Reader pr(*pt, "patience");
        pr.read("min", p.patience_min);
        pr.read("max", p.patience_max);
        pr.finish();
    }
    if (const json* am = r.get("age_service_multiplier")) {
        Reader ar(*am, "age_service_multiplier");
        ar.read("Under25", p.age_service_multiplier[0]);
        ar.read("25to45", p.age_service_multiplier[1]);
        ar.read("Over45", p.age_service_multiplier[2]);
        ar.finish();
    }
    return c;
}

team::TeamParams read_team(Reader& r)
{
    team::TeamParams p;
    if (const json* t = r.get("teams")) {
        if (!t->is_array()) {
            throw ConfigError("'teams' must be an array");
        }
        p.teams.clear();
        for (std::size_t i = 0; i < t->size(); ++i) {
            Reader tr((*t)[i], "teams[" + std::to_string(i) + "]");
            team::TeamSpec spec;
            tr.read("size", spec.size);
            if (const json* l = tr.get("liaison"); l != nullptr && !l->is_null()) {
                spec.liaison = Reader::convert<int>(*l, tr.path("liaison"));
            }
            tr.read("leader", spec.leader);
            tr.finish();
            p.teams.push_back(spec);
        }
    }
    if (const json* pol = r.get("policy")) {
        const auto text = Reader::convert<std::string>(*pol, "policy");
        auto parsed = team::parse_policy(text);
        if (!parsed) {
            throw ConfigError("'policy' must be any_to_any or gatewayed (got " + text + ")");
        }
        p.policy = *parsed;
    }
    if (const json* f = r.get("facts")) {
        Reader fr(*f, "facts");
        fr.read("universe", p.fact_universe);
        if (const json* d = fr.get("distribution")) {
            const auto text = Reader::convert<std::string>(*d, "facts.distribution");
            auto parsed = team::parse_distribution(text);
            if (!parsed) {
                throw ConfigError("'facts.distribution' must be round_robin, random or single_team (got " + text + ")");
            }
            p.distribution = *parsed;
        }
        if (const json* in = fr.get("initial")) {
            const auto text = Reader::convert<std::string>(*in, "facts.initial");
            auto parsed = team::parse_initial(text);
            if (!parsed) {
                throw ConfigError("'facts.initial' must be owner or team (got " + text + ")");
            }
            p.initial = *parsed;
        }
        fr.finish();
    }
    if (const json* t = r.get("tasks")) {
        Reader tr(*t, "tasks");
        tr.read("count", p.tasks.count);
        tr.read("k", p.tasks.k);
        tr.read("deadline", p.tasks.deadline);
        tr.read("spacing", p.tasks.spacing);
        tr.finish();
    }
    r.read("member_capacity", p.member_capacity);
    r.read("liaison_capacity", p.liaison_capacity);
    r.read("trust_up", p.trust_up);
    r.read("trust_down", p.trust_down);
    r.read("trust_drop", p.trust_drop);
    if (const json* b = r.get("message_budget"); b != nullptr && !b->is_null()) {
        p.message_budget = Reader::convert<std::int64_t>(*b, "message_budget");
    }
    return p;
}

} // namespace

ant::GridWorld make_grid(const AntConfig& config, std::uint64_t seed)
{
    std::vector<ant::FoodSource> food;
    for (const auto& f : config.food) {
        food.push_back(ant::FoodSource{f.cell, f.units, f.units});
    }
    if (config.random_food) {
        RngStream setup(seed, streams::kSetup);
        for (int i = 0; i < config.random_food->count; ++i) {
            ant::Cell c;
            auto taken = [&](ant::Cell x) {
                return x == config.nest
                    || std::any_of(food.begin(), food.end(), [&](const ant::FoodSource& s) { return s.cell == x; });
            };
            do {
                c = ant::Cell{static_cast<int>(setup.uniform_index(static_cast<std::uint64_t>(config.width))),
                    static_cast<int>(setup.uniform_index(static_cast<std::uint64_t>(config.height)))};
            } while (taken(c));
            food.push_back(ant::FoodSource{c, config.random_food->units, config.random_food->units});
        }
    }
    return ant::GridWorld(config.width, config.height, config.nest, std::move(food));
}

Scenario load_scenario(std::string_view document)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed scenario JSON: ") + e.what());
    }
    Reader r(doc, "");
    Scenario s;
    const json* model = r.get("model");
    if (model == nullptr) {
        throw ConfigError("scenario is missing required key 'model'");
    }
    const auto model_text = Reader::convert<std::string>(*model, "model");
    auto kind = parse_model(model_text);
    if (!kind) {
        throw ConfigError("unknown model '" + model_text + "' (expected ant_foraging, retail or team_comms)");
    }
    s.model = *kind;
    s.name = std::string(to_string(s.model));
    r.read("name", s.name);
    r.read("seed", s.seed);
    r.read("ticks", s.ticks);
    r.read("replications", s.replications);
    r.read("metric_interval", s.metric_interval);
    if (s.name.empty()) {
        throw ConfigError("'name' must not be empty");
    }
    if (s.replications < 1) {
        throw RangeError("replications", "[1,inf)", std::to_string(s.replications));
    }
    if (s.metric_interval < 1) {
        throw RangeError("metric_interval", "[1,inf)", std::to_string(s.metric_interval));
    }

    switch (s.model) {
    case ModelKind::AntForaging: {
        auto c = read_ant(r);
        r.finish();
        validate_ant(c);
        s.config = std::move(c);
        break;
    }
    case ModelKind::Retail: {
        auto c = read_retail(r);
        r.finish();
        retail::RetailStore probe(c.departments, c.staff, c.manager, c.params, 0);
        s.config = std::move(c);
        break;
    }
    case ModelKind::TeamComms: {
        auto p = read_team(r);
        r.finish();
        team::TeamWorld probe(p, 0);
        s.config = std::move(p);
        break;
    }
    }
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read scenario file '" + path.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return load_scenario(text.str());
}

namespace {

json cell_json(ant::Cell c)
{
    return json::array({c.x, c.y});
}

void write_ant(json& j, const AntConfig& c)
{
    const auto& p = c.params;
    j["strategy"] = std::string(ant::to_string(p.strategy));
    j["grid"] = {{"width", c.width}, {"height", c.height}};
    j["nest"] = cell_json(c.nest);
    j["food"] = json::array();
    for (const auto& f : c.food) {
        j["food"].push_back({{"cell", cell_json(f.cell)}, {"units", f.units}});
    }
    if (c.random_food) {
        j["random_food"] = {{"count", c.random_food->count}, {"units", c.random_food->units}};
    }
    j["n_ants"] = p.n_ants;
    j["evaporation_rate"] = p.evaporation_rate;
    j["deposit_seek"] = p.deposit_seek;
    j["deposit_return"] = p.deposit_return;
    j["exploration_prob"] = p.exploration_prob;
    j["smoothing_bias"] = p.smoothing_bias;
    j["max_ticks"] = p.max_ticks;
    j["departure_prob"] = p.departure_prob;
    j["stop_when_depleted"] = p.stop_when_depleted;
}

void write_retail(json& j, const RetailConfig& c)
{
    const auto& p = c.params;
    j["departments"] = c.departments;
    j["staff"] = json::array();
    for (const auto& s : c.staff) {
        j["staff"].push_back({{"department", s.department}, {"skill", s.skill}, {"attitude", s.attitude},
            {"age_band", std::string(retail::to_string(s.age_band))}});
    }
    j["manager"] = {{"review_period", c.manager.review_period}, {"min_staff_floor", c.manager.min_staff_floor}};
    j["arrival_rate"] = p.arrival_rate;
    j["browser_fraction"] = p.browser_fraction;
    j["base_service_time"] = p.base_service_time;
    j["skill_speedup"] = p.skill_speedup;
    j["base_purchase_prob"] = p.base_purchase_prob;
    j["attitude_weight"] = p.attitude_weight;
    j["goal_bonus"] = p.goal_bonus;
    j["impulse_prob"] = p.impulse_prob;
    j["browse_exit_prob"] = p.browse_exit_prob;
    j["patience"] = {{"min", p.patience_min}, {"max", p.patience_max}};
    j["age_service_multiplier"] = {{"Under25", p.age_service_multiplier[0]}, {"25to45", p.age_service_multiplier[1]},
        {"Over45", p.age_service_multiplier[2]}};
}

void write_team(json& j, const team::TeamParams& p)
{
    j["teams"] = json::array();
    for (const auto& t : p.teams) {
        json tj = {{"size", t.size}, {"leader", t.leader}};
        tj["liaison"] = t.liaison ? json(*t.liaison) : json(nullptr);
        j["teams"].push_back(tj);
    }
    j["policy"] = std::string(team::to_string(p.policy));
    j["facts"] = {{"universe", p.fact_universe}, {"distribution", std::string(team::to_string(p.distribution))},
        {"initial", std::string(team::to_string(p.initial))}};
    j["tasks"] = {{"count", p.tasks.count}, {"k", p.tasks.k}, {"deadline", p.tasks.deadline},
        {"spacing", p.tasks.spacing}};
    j["member_capacity"] = p.member_capacity;
    j["liaison_capacity"] = p.liaison_capacity;
    j["trust_up"] = p.trust_up;
    j["trust_down"] = p.trust_down;
    j["trust_drop"] = p.trust_drop;
    j["message_budget"] = p.message_budget ? json(*p.message_budget) : json(nullptr);
}

} // namespace

json to_json(const Scenario& s)
{
    json j;
    j["name"] = s.name;
    j["model"] = std::string(to_string(s.model));
    j["seed"] = s.seed;
    j["ticks"] = s.ticks;
    j["replications"] = s.replications;
    j["metric_interval"] = s.metric_interval;
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, AntConfig>) {
                write_ant(j, c);
            } else if constexpr (std::is_same_v<T, RetailConfig>) {
                write_retail(j, c);
            } else {
                write_team(j, c);
            }
        },
        s.config);
    return j;
}

Scenario default_scenario(ModelKind model)
{
    json doc{{"model", std::string(to_string(model))}};
    if (model == ModelKind::AntForaging) {
        doc["food"] = json::array({json{{"cell", {43, 43}}, {"units", 200}}});
    }
    return load_scenario(doc.dump());
}

} // namespace orgsim
