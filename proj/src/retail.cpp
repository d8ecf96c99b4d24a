#include "orgsim/retail.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "orgsim/errors.hpp"

namespace orgsim::retail {

namespace {

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

std::size_t age_index(AgeBand b) noexcept { return static_cast<std::size_t>(b); }

} // namespace

std::string_view to_string(CustomerState s) noexcept
{
    switch (s) {
    case CustomerState::Entering:
        return "Entering";
    case CustomerState::Browsing:
        return "Browsing";
    case CustomerState::Traveling:
        return "Traveling";
    case CustomerState::Waiting:
        return "Waiting";
    case CustomerState::InService:
        return "InService";
    case CustomerState::Exiting:
        return "Exiting";
    }
    return "?";
}

std::string_view to_string(AgeBand b) noexcept
{
    switch (b) {
    case AgeBand::Under25:
        return "Under25";
    case AgeBand::From25To45:
        return "25to45";
    case AgeBand::Over45:
        return "Over45";
    }
    return "?";
}

std::optional<AgeBand> parse_age_band(std::string_view text) noexcept
{
    if (text == "Under25") {
        return AgeBand::Under25;
    }
    if (text == "25to45") {
        return AgeBand::From25To45;
    }
    if (text == "Over45") {
        return AgeBand::Over45;
    }
    return std::nullopt;
}

void RetailParams::validate() const
{
    check_non_negative("arrival_rate", arrival_rate);
    check_unit_interval("browser_fraction", browser_fraction);
    if (base_service_time < 1) {
        throw RangeError("base_service_time", "[1,inf)", std::to_string(base_service_time));
    }
    check_non_negative("skill_speedup", skill_speedup);
    check_unit_interval("base_purchase_prob", base_purchase_prob);
    check_non_negative("attitude_weight", attitude_weight);
    check_non_negative("goal_bonus", goal_bonus);
    check_unit_interval("impulse_prob", impulse_prob);
    if (patience_min < 1) {
        throw RangeError("patience.min", "[1,inf)", std::to_string(patience_min));
    }
    if (patience_max < patience_min) {
        throw RangeError("patience.max", "[patience.min,inf)", std::to_string(patience_max));
    }
    check_unit_interval("browse_exit_prob", browse_exit_prob);
    for (double m : age_service_multiplier) {
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw RangeError("age_service_multiplier", "(0,inf)", std::to_string(m));
        }
    }
}

std::vector<Customer> spawn_arrivals(Tick tick, RngStream& rng, const RetailParams& params, int n_departments,
    AgentId& next_id, std::uint64_t seed)
{
    std::vector<Customer> out;
    const auto count = rng.poisson(params.arrival_rate);
    for (std::uint64_t i = 0; i < count; ++i) {
        Customer c;
        c.id = next_id++;
        c.entered_tick = tick;
        c.state = CustomerState::Entering;
        c.department = 0;
        if (rng.bernoulli(params.browser_fraction)) {
            c.mode = CustomerMode::Browser;
        } else {
            c.mode = CustomerMode::GoalDirected;
            c.target_department = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n_departments)));
        }
        c.patience = static_cast<int>(rng.uniform_int(params.patience_min, params.patience_max));
        c.rng = RngStream(seed, streams::kAgentStreamBase + c.id);
        out.push_back(std::move(c));
    }
    return out;
}

int service_time(const StaffMember& staff, const RetailParams& params)
{
    const double raw = static_cast<double>(params.base_service_time) * params.age_service_multiplier[age_index(staff.age_band)]
        / (1.0 + params.skill_speedup * staff.skill);
    return std::max(1, static_cast<int>(std::ceil(raw)));
}

double purchase_probability(double attitude, CustomerMode mode, const RetailParams& params) noexcept
{
    const double goal = mode == CustomerMode::GoalDirected ? 1.0 : 0.0;
    return std::clamp(params.base_purchase_prob + params.attitude_weight * attitude + params.goal_bonus * goal, 0.0, 1.0);
}

ServiceOutcome service_outcome(const StaffMember& staff, const Customer& customer, const RetailParams& params)
{
    return ServiceOutcome{service_time(staff, params), purchase_probability(staff.attitude, customer.mode, params)};
}

std::optional<Reassignment> plan_reassignment(const RetailStore& store, int min_staff_floor)
{
    const auto& depts = store.departments();
    if (depts.size() < 2) {
        return std::nullopt;
    }
    std::size_t longest = 0;
    std::size_t shortest = 0;
    for (std::size_t d = 1; d < depts.size(); ++d) {
        if (depts[d].wait_queue.size() > depts[longest].wait_queue.size()) {
            longest = d;
        }
        if (depts[d].wait_queue.size() < depts[shortest].wait_queue.size()) {
            shortest = d;
        }
    }
    if (depts[longest].wait_queue.size() < depts[shortest].wait_queue.size() + 2) {
        return std::nullopt;
    }
    const auto& donor = depts[shortest];
    if (static_cast<int>(donor.staff.size()) - 1 < min_staff_floor) {
        return std::nullopt;
    }
    std::optional<AgentId> pick;
    for (AgentId sid : donor.staff) {
        if (store.staff()[sid].idle() && (!pick || sid < *pick)) {
            pick = sid;
        }
    }
    if (!pick) {
        return std::nullopt;
    }
    return Reassignment{*pick, static_cast<int>(shortest), static_cast<int>(longest)};
}

RetailSummary retail_metrics(const MetricMap& m)
{
    RetailSummary s;
    s.conversions = static_cast<std::int64_t>(m.at("conversions"));
    s.reneges = static_cast<std::int64_t>(m.at("reneges"));
    s.mean_wait = m.at("mean_wait");
    s.served = static_cast<std::int64_t>(m.at("customers_served"));
    s.staff_utilization = m.at("staff_utilization");
    s.customers_entered = static_cast<std::int64_t>(m.at("customers_entered"));
    s.customers_exited = static_cast<std::int64_t>(m.at("customers_exited"));
    return s;
}

RetailStore::RetailStore(int n_departments, const std::vector<StaffSpec>& staff, ManagerSpec manager,
    RetailParams params, std::uint64_t seed)
    : params_(params)
    , seed_(seed)
    , arrivals_(seed, streams::kArrivals)
{
    params_.validate();
    if (n_departments < 1) {
        throw RangeError("departments", "[1,inf)", std::to_string(n_departments));
    }
    if (manager.review_period < 1) {
        throw RangeError("manager.review_period", "[1,inf)", std::to_string(manager.review_period));
    }
    if (manager.min_staff_floor < 0) {
        throw RangeError("manager.min_staff_floor", "[0,inf)", std::to_string(manager.min_staff_floor));
    }
    for (int d = 0; d < n_departments; ++d) {
        departments_.push_back(Department{d, {}, {}});
    }
    for (const auto& spec : staff) {
        if (spec.department < 0 || spec.department >= n_departments) {
            throw RangeError("staff.department", "[0," + std::to_string(n_departments - 1) + "]",
                std::to_string(spec.department));
        }
        check_unit_interval("staff.skill", spec.skill);
        check_unit_interval("staff.attitude", spec.attitude);
        StaffMember s;
        s.id = static_cast<AgentId>(staff_.size());
        s.department = spec.department;
        s.skill = spec.skill;
        s.attitude = spec.attitude;
        s.age_band = spec.age_band;
        s.rng = RngStream(seed, streams::kAgentStreamBase + s.id);
        departments_[static_cast<std::size_t>(s.department)].staff.push_back(s.id);
        staff_.push_back(s);
    }
    for (int d = 0; d < n_departments; ++d) {
        managers_.push_back(Manager{static_cast<AgentId>(staff_.size() + static_cast<std::size_t>(d)), d,
            manager.review_period, manager.min_staff_floor});
    }
    next_customer_id_ = static_cast<AgentId>(staff_.size() + managers_.size());
}

Customer& RetailStore::add_customer(Customer customer)
{
    // Keeps ids unique and customers_ sorted.
    if (customer.id < next_customer_id_) {
        throw std::invalid_argument("customer id " + std::to_string(customer.id) + " is already taken");
    }
    if (customer.department < 0 || customer.department >= static_cast<int>(departments_.size())) {
        throw RangeError("customer.department", "a valid department", std::to_string(customer.department));
    }
    if (customer.mode == CustomerMode::GoalDirected
        && (customer.target_department < 0 || customer.target_department >= static_cast<int>(departments_.size()))) {
        throw RangeError("customer.target_department", "a valid department",
            std::to_string(customer.target_department));
    }
    next_customer_id_ = std::max<AgentId>(next_customer_id_, customer.id + 1);
    ++entered_;
    customers_.push_back(std::move(customer));
    Customer& c = customers_.back();
    if (c.state == CustomerState::Waiting) {
        departments_[static_cast<std::size_t>(c.department)].wait_queue.push_back(c.id);
    }
    return c;
}

Customer* RetailStore::find_customer(AgentId id) noexcept
{
    auto it = std::lower_bound(
        customers_.begin(), customers_.end(), id, [](const Customer& c, AgentId key) { return c.id < key; });
    return (it != customers_.end() && it->id == id) ? &*it : nullptr;
}

const Customer* RetailStore::find_customer(AgentId id) const noexcept
{
    return const_cast<RetailStore*>(this)->find_customer(id);
}

void RetailStore::begin_tick(StepContext& ctx)
{
    ++ticks_;
    for (auto& c : spawn_arrivals(ctx.tick(), arrivals_, params_, static_cast<int>(departments_.size()),
             next_customer_id_, seed_)) {
        ++entered_;
        ctx.emit(c.id, "arrive",
            {{"goal", c.mode == CustomerMode::GoalDirected ? 1.0 : 0.0}, {"target", c.target_department},
                {"patience", c.patience}});
        customers_.push_back(std::move(c));
    }
}

std::vector<AgentId> RetailStore::live_agents() const
{
    std::vector<AgentId> ids;
    ids.reserve(staff_.size() + managers_.size() + customers_.size());
    for (const auto& s : staff_) {
        ids.push_back(s.id);
    }
    for (const auto& m : managers_) {
        ids.push_back(m.id);
    }
    for (const auto& c : customers_) {
        ids.push_back(c.id);
    }
    return ids;
}

void RetailStore::update_agent(AgentId id, StepContext& ctx)
{
    if (id < staff_.size()) {
        staff_tick(staff_[id], ctx);
        return;
    }
    if (id < staff_.size() + managers_.size()) {
        manager_tick(managers_[id - staff_.size()], ctx);
        return;
    }
    if (Customer* c = find_customer(id)) {
        customer_tick(*c, ctx);
    }
}

void RetailStore::end_tick(StepContext&)
{
    std::erase_if(customers_, [](const Customer& c) { return c.state == CustomerState::Exiting; });
    pending_removal_ = 0;
}

MetricMap RetailStore::metrics() const
{
    MetricMap m;
    m["customers_entered"] = static_cast<double>(entered_);
    m["customers_exited"] = static_cast<double>(exited_purchased_ + exited_unpurchased_);
    m["customers_inside"] = static_cast<double>(inside());
    m["exited_unpurchased"] = static_cast<double>(exited_unpurchased_);
    std::size_t queued = 0;
    for (const auto& d : departments_) {
        queued += d.wait_queue.size();
    }
    m["queue_length"] = static_cast<double>(queued);
    m["conversions"] = static_cast<double>(exited_purchased_);
    m["reneges"] = static_cast<double>(reneges_);
    m["customers_served"] = static_cast<double>(served_);
    m["mean_wait"] = served_ == 0 ? 0.0 : static_cast<double>(total_wait_) / static_cast<double>(served_);
    const double capacity = static_cast<double>(staff_.size()) * static_cast<double>(ticks_);
    m["staff_utilization"] = capacity == 0.0 ? 0.0 : static_cast<double>(serving_ticks_) / capacity;
    return m;
}

void RetailStore::customer_tick(Customer& c, StepContext& ctx)
{
    if (c.state == CustomerState::Entering) {
        c.state = c.mode == CustomerMode::Browser ? CustomerState::Browsing : CustomerState::Traveling;
        ctx.emit(c.id, "start", {{"goal", c.mode == CustomerMode::GoalDirected ? 1.0 : 0.0}});
    }
    switch (c.state) {
    case CustomerState::Browsing: {
        if (c.rng.bernoulli(params_.browse_exit_prob)) {
            exit_store(c, "leave", ctx);
            return;
        }
        if (c.rng.bernoulli(params_.impulse_prob)) {
            join_queue(c, ctx);
            return;
        }
        const int last = static_cast<int>(departments_.size()) - 1;
        if (last == 0) {
            return;
        }
        int to = c.department;
        if (c.department == 0) {
            to = 1;
        } else if (c.department == last) {
            to = last - 1;
        } else {
            to = c.department + (c.rng.bernoulli(0.5) ? 1 : -1);
        }
        ctx.emit(c.id, "browse", {{"from", c.department}, {"to", to}});
        c.department = to;
        return;
    }
    case CustomerState::Traveling: {
        if (c.department != c.target_department) {
            const int to = c.department + (c.target_department > c.department ? 1 : -1);
            ctx.emit(c.id, "travel", {{"from", c.department}, {"to", to}});
            c.department = to;
        }
        if (c.department == c.target_department) {
            join_queue(c, ctx);
        }
        return;
    }
    case CustomerState::Waiting:
        --c.patience;
        if (c.patience <= 0) {
            auto& q = departments_[static_cast<std::size_t>(c.department)].wait_queue;
            q.erase(std::find(q.begin(), q.end(), c.id));
            ++reneges_;
            exit_store(c, "renege", ctx);
        }
        return;
    default:
        return;
    }
}

void RetailStore::join_queue(Customer& c, StepContext& ctx)
{
    c.state = CustomerState::Waiting;
    c.joined_queue_tick = ctx.tick();
    departments_[static_cast<std::size_t>(c.department)].wait_queue.push_back(c.id);
    ctx.emit(c.id, "join", {{"department", c.department}, {"patience", c.patience}});
}

void RetailStore::exit_store(Customer& c, std::string_view kind, StepContext& ctx)
{
    c.state = CustomerState::Exiting;
    ++pending_removal_;
    if (c.purchased) {
        ++exited_purchased_;
    } else {
        ++exited_unpurchased_;
    }
    ctx.emit(c.id, kind, {{"department", c.department}, {"purchased", c.purchased ? 1.0 : 0.0}});
}

void RetailStore::staff_tick(StaffMember& s, StepContext& ctx)
{
    if (s.serving) {
        continue_service(s, ctx);
        return;
    }
    if (!departments_[static_cast<std::size_t>(s.department)].wait_queue.empty()) {
        begin_service(s, ctx);
    }
}

void RetailStore::begin_service(StaffMember& s, StepContext& ctx)
{
    auto& q = departments_[static_cast<std::size_t>(s.department)].wait_queue;
    const AgentId cid = q.front();
    q.pop_front();
    Customer& c = *find_customer(cid);
    c.state = CustomerState::InService;
    const int duration = service_time(s, params_);
    const auto wait = static_cast<std::int64_t>(ctx.tick() - c.joined_queue_tick);
    ++served_;
    total_wait_ += wait;
    ctx.emit(s.id, "service_start",
        {{"customer", cid}, {"wait", static_cast<double>(wait)}, {"duration", duration},
            {"department", s.department}});
    s.serving = Service{cid, duration};
    continue_service(s, ctx);
}

void RetailStore::continue_service(StaffMember& s, StepContext& ctx)
{
    ++serving_ticks_;
    if (--s.serving->remaining == 0) {
        complete_service(s, ctx);
    }
}

void RetailStore::complete_service(StaffMember& s, StepContext& ctx)
{
    Customer& c = *find_customer(s.serving->customer);
    const double p = purchase_probability(s.attitude, c.mode, params_);
    c.purchased = s.rng.bernoulli(p);
    s.serving.reset();
    exit_store(c, "complete", ctx);
}

void RetailStore::manager_tick(const Manager& manager, StepContext& ctx)
{
    if (ctx.tick() % manager.review_period != 0) {
        return;
    }
    auto plan = plan_reassignment(*this, manager.min_staff_floor);
    // Only the manager of the receiving department acts on the plan.
    if (!plan || plan->to != manager.department) {
        return;
    }
    auto& donor = departments_[static_cast<std::size_t>(plan->from)].staff;
    donor.erase(std::find(donor.begin(), donor.end(), plan->staff));
    departments_[static_cast<std::size_t>(plan->to)].staff.push_back(plan->staff);
    staff_[plan->staff].department = plan->to;
    ctx.emit(manager.id, "reassign", {{"staff", plan->staff}, {"from", plan->from}, {"to", plan->to}});
}

} // namespace orgsim::retail
