#include "orgsim/events.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace orgsim {

Payload::Payload(std::initializer_list<Entry> entries)
{
    if (entries.size() > kCapacity) {
        throw std::length_error("event payload exceeds capacity");
    }
    std::copy(entries.begin(), entries.end(), entries_.begin());
    size_ = entries.size();
}

double Payload::at(std::string_view key) const
{
    if (auto v = find(key)) {
        return *v;
    }
    throw std::out_of_range("payload has no key '" + std::string(key) + "'");
}

std::optional<double> Payload::find(std::string_view key) const noexcept
{
    for (const auto& [k, v] : *this) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

bool operator==(const Payload& a, const Payload& b) noexcept
{
    return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
}

void EventLog::append(EventRecord record)
{
    if (!records_.empty() && record.tick < records_.back().tick) {
        throw std::logic_error("event log must be appended in tick order");
    }
    auto it = counts_.find(record.kind);
    if (it == counts_.end()) {
        it = counts_.emplace(std::string(record.kind), 0).first;
    }
    ++it->second;
    ++total_;
    if (retain_) {
        records_.push_back(record);
    }
}

std::uint64_t EventLog::count(std::string_view kind) const
{
    auto it = counts_.find(kind);
    return it == counts_.end() ? 0 : it->second;
}

std::string format_real(double value)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("cannot format real");
    }
    return std::string(buf, end);
}

std::string export_events_csv(const EventLog& log)
{
    std::string out = "tick,agent_id,kind,key,value\n";
    for (const auto& ev : log.records()) {
        std::string prefix = std::to_string(ev.tick) + ",";
        if (ev.agent_id) {
            prefix += std::to_string(*ev.agent_id);
        }
        prefix += ",";
        prefix += ev.kind;
        prefix += ",";
        if (ev.payload.empty()) {
            out += prefix + ",\n";
            continue;
        }
        for (const auto& [key, value] : ev.payload) {
            out += prefix;
            out += key;
            out += ",";
            out += format_real(value);
            out += "\n";
        }
    }
    return out;
}

} // namespace orgsim
