#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "orgsim/engine.hpp"
#include "orgsim/events.hpp"
#include "orgsim/rng.hpp"

namespace orgsim::retail {

enum class CustomerMode { Browser, GoalDirected };

enum class CustomerState { Entering, Browsing, Traveling, Waiting, InService, Exiting };

std::string_view to_string(CustomerState s) noexcept;

struct Customer {
    AgentId id = 0;
    CustomerMode mode = CustomerMode::Browser;
    /// Valid only for GoalDirected customers.
    int target_department = -1;
    CustomerState state = CustomerState::Entering;
    /// Department the customer is currently in.
    int department = 0;
    /// Ticks left before reneging; decremented only while Waiting.
    int patience = 0;
    Tick entered_tick = 0;
    Tick joined_queue_tick = 0;
    bool purchased = false;
    RngStream rng;

    friend bool operator==(const Customer&, const Customer&) = default;
};

enum class AgeBand { Under25, From25To45, Over45 };

std::string_view to_string(AgeBand b) noexcept;
std::optional<AgeBand> parse_age_band(std::string_view text) noexcept;

struct Service {
    AgentId customer = 0;
    int remaining = 0;

    friend bool operator==(const Service&, const Service&) = default;
};

struct StaffMember {
    AgentId id = 0;
    int department = 0;
    AgeBand age_band = AgeBand::From25To45;
    double skill = 0.5;
    double attitude = 0.5;
    /// Empty while Idle.
    std::optional<Service> serving;
    RngStream rng;

    bool idle() const noexcept { return !serving.has_value(); }

    friend bool operator==(const StaffMember&, const StaffMember&) = default;
};

struct Manager {
    AgentId id = 0;
    int department = 0;
    Tick review_period = 10;
    int min_staff_floor = 0;

    friend bool operator==(const Manager&, const Manager&) = default;
};

struct Department {
    int id = 0;
    std::vector<AgentId> staff;
    std::deque<AgentId> wait_queue;

    friend bool operator==(const Department&, const Department&) = default;
};

struct RetailParams {
    double arrival_rate = 0.3;
    double browser_fraction = 0.5;
    int base_service_time = 5;
    double skill_speedup = 1.0;
    double base_purchase_prob = 0.25;
    double attitude_weight = 0.3;
    double goal_bonus = 0.3;
    double impulse_prob = 0.1;
    int patience_min = 10;
    int patience_max = 30;
    /// Per-tick chance that a browsing customer walks out.
    double browse_exit_prob = 0.05;
    /// Service-time multiplier per age band (Under25, 25to45, Over45).
    std::array<double, 3> age_service_multiplier = {1.0, 1.0, 1.0};

    void validate() const;

    friend bool operator==(const RetailParams&, const RetailParams&) = default;
};

/// Staff placement as read from a scenario.
struct StaffSpec {
    int department = 0;
    double skill = 0.5;
    double attitude = 0.5;
    AgeBand age_band = AgeBand::From25To45;

    friend bool operator==(const StaffSpec&, const StaffSpec&) = default;
};

struct ManagerSpec {
    Tick review_period = 10;
    int min_staff_floor = 0;

    friend bool operator==(const ManagerSpec&, const ManagerSpec&) = default;
};

/// New customers for one tick: a Poisson(arrival_rate) count, each a Browser
/// with probability browser_fraction, else GoalDirected with a uniformly
/// chosen target. Ids are assigned from `next_id` upward.
std::vector<Customer> spawn_arrivals(Tick tick, RngStream& rng, const RetailParams& params, int n_departments,
    AgentId& next_id, std::uint64_t seed);

/// ceil(T0 * age multiplier / (1 + sigma * skill)), at least one tick.
int service_time(const StaffMember& staff, const RetailParams& params);

/// clamp01(p0 + a * attitude + g * [goal directed]).
double purchase_probability(double attitude, CustomerMode mode, const RetailParams& params) noexcept;

struct ServiceOutcome {
    int service_time = 0;
    double purchase_probability = 0.0;

    friend bool operator==(const ServiceOutcome&, const ServiceOutcome&) = default;
};

ServiceOutcome service_outcome(const StaffMember& staff, const Customer& customer, const RetailParams& params);

struct Reassignment {
    AgentId staff = 0;
    int from = 0;
    int to = 0;

    friend bool operator==(const Reassignment&, const Reassignment&) = default;
};

class RetailStore;

/// The reallocation rule, evaluated for the whole store: move the
/// lowest-id idle staff member from the shortest queue to the longest when
/// the gap is at least 2 and the donor keeps at least min_staff_floor staff.
/// Ties go to the lowest department id.
std::optional<Reassignment> plan_reassignment(const RetailStore& store, int min_staff_floor);

struct RetailSummary {
    std::int64_t conversions = 0;
    std::int64_t reneges = 0;
    double mean_wait = 0.0;
    std::int64_t served = 0;
    double staff_utilization = 0.0;
    std::int64_t customers_entered = 0;
    std::int64_t customers_exited = 0;
};

RetailSummary retail_metrics(const MetricMap& final_metrics);

class RetailStore {
public:
    RetailStore(int n_departments, const std::vector<StaffSpec>& staff, ManagerSpec manager, RetailParams params,
        std::uint64_t seed);

    // Engine interface.
    void begin_tick(StepContext& ctx);
    std::vector<AgentId> live_agents() const;
    void update_agent(AgentId id, StepContext& ctx);
    void end_tick(StepContext& ctx);
    MetricMap metrics() const;
    bool finished() const noexcept { return false; }

    const RetailParams& params() const noexcept { return params_; }
    const std::vector<Department>& departments() const noexcept { return departments_; }
    const std::vector<StaffMember>& staff() const noexcept { return staff_; }
    const std::vector<Manager>& managers() const noexcept { return managers_; }
    const std::vector<Customer>& customers() const noexcept { return customers_; }

    /// Places a customer directly (tests and hand-built scenarios).
    Customer& add_customer(Customer customer);
    Customer* find_customer(AgentId id) noexcept;
    const Customer* find_customer(AgentId id) const noexcept;

    void customer_tick(Customer& customer, StepContext& ctx);
    void staff_tick(StaffMember& staff, StepContext& ctx);
    void manager_tick(const Manager& manager, StepContext& ctx);

    std::int64_t entered() const noexcept { return entered_; }
    std::int64_t exited_purchased() const noexcept { return exited_purchased_; }
    std::int64_t exited_unpurchased() const noexcept { return exited_unpurchased_; }
    std::int64_t inside() const noexcept { return static_cast<std::int64_t>(customers_.size()) - pending_removal_; }
    std::int64_t reneges() const noexcept { return reneges_; }
    std::int64_t served() const noexcept { return served_; }
    std::int64_t serving_ticks() const noexcept { return serving_ticks_; }
    Tick ticks_elapsed() const noexcept { return ticks_; }

    friend bool operator==(const RetailStore&, const RetailStore&) = default;

private:
    void join_queue(Customer& c, StepContext& ctx);
    void exit_store(Customer& c, std::string_view kind, StepContext& ctx);
    void begin_service(StaffMember& s, StepContext& ctx);
    void continue_service(StaffMember& s, StepContext& ctx);
    void complete_service(StaffMember& s, StepContext& ctx);

    RetailParams params_;
    std::uint64_t seed_ = 0;
    std::vector<Department> departments_;
    std::vector<StaffMember> staff_;
    std::vector<Manager> managers_;
    std::vector<Customer> customers_;
    RngStream arrivals_;
    AgentId next_customer_id_ = 0;
    Tick ticks_ = 0;

    std::int64_t entered_ = 0;
    std::int64_t exited_purchased_ = 0;
    std::int64_t exited_unpurchased_ = 0;
    std::int64_t reneges_ = 0;
    std::int64_t served_ = 0;
    std::int64_t total_wait_ = 0;
    std::int64_t serving_ticks_ = 0;
    std::int64_t pending_removal_ = 0;
};

} // namespace orgsim::retail
