#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orgsim {

using AgentId = std::uint32_t;
using Tick = std::uint64_t;

/// Simulation clock. One tick is one synchronous engine step; what a tick
/// means in wall-clock terms is up to each scenario.
class SimClock {
public:
    Tick now() const noexcept { return tick_; }
    void advance() noexcept { ++tick_; }

    friend bool operator==(const SimClock&, const SimClock&) = default;

private:
    Tick tick_ = 0;
};

/// Small fixed-capacity name->scalar map carried by an event.
/// Keys must be string literals (or otherwise outlive the log).
class Payload {
public:
    static constexpr std::size_t kCapacity = 6;
    using Entry = std::pair<std::string_view, double>;

    Payload() = default;
    Payload(std::initializer_list<Entry> entries);

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }
    const Entry* begin() const noexcept { return entries_.data(); }
    const Entry* end() const noexcept { return entries_.data() + size_; }

    /// Value stored under key; throws std::out_of_range when absent.
    double at(std::string_view key) const;
    std::optional<double> find(std::string_view key) const noexcept;

    friend bool operator==(const Payload& a, const Payload& b) noexcept;

private:
    std::array<Entry, kCapacity> entries_{};
    std::size_t size_ = 0;
};

struct EventRecord {
    Tick tick = 0;
    std::optional<AgentId> agent_id;
    std::string_view kind;
    Payload payload;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct MetricSample {
    Tick tick = 0;
    std::string name;
    double value = 0.0;

    friend bool operator==(const MetricSample&, const MetricSample&) = default;
};

/// Append-only event log. Counts per kind are always kept; full records are
/// kept only when retention is on (batch runs switch it off to save memory).
class EventLog {
public:
    explicit EventLog(bool retain = true)
        : retain_(retain)
    {
    }

    void append(EventRecord record);

    bool retains() const noexcept { return retain_; }
    const std::vector<EventRecord>& records() const noexcept { return records_; }
    std::uint64_t total() const noexcept { return total_; }
    using CountMap = std::map<std::string, std::uint64_t, std::less<>>;

    const CountMap& counts() const noexcept { return counts_; }
    std::uint64_t count(std::string_view kind) const;

    friend bool operator==(const EventLog&, const EventLog&) = default;

private:
    bool retain_ = true;
    std::vector<EventRecord> records_;
    CountMap counts_;
    std::uint64_t total_ = 0;
};

/// Per-tick handle the models use to emit events.
class StepContext {
public:
    StepContext(Tick tick, EventLog& log) noexcept
        : tick_(tick)
        , log_(&log)
    {
    }

    Tick tick() const noexcept { return tick_; }

    void emit(std::optional<AgentId> agent, std::string_view kind, Payload payload = {})
    {
        log_->append(EventRecord{tick_, agent, kind, payload});
    }

private:
    Tick tick_;
    EventLog* log_;
};

/// Shortest round-trip decimal rendering of a real.
std::string format_real(double value);

/// CSV with header `tick,agent_id,kind,key,value`, one row per payload
/// entry (a single row with empty key and value when the payload is empty).
std::string export_events_csv(const EventLog& log);

} // namespace orgsim
