#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace orgsim {

/// Well-known stream ids. Per-agent streams start at kAgentStreamBase + agent id.
namespace streams {
inline constexpr std::uint64_t kSchedule = 0;
inline constexpr std::uint64_t kSetup = 1;
inline constexpr std::uint64_t kArrivals = 2;
inline constexpr std::uint64_t kWorkload = 3;
inline constexpr std::uint64_t kAgentStreamBase = 1024;
} // namespace streams

/// Reproducible random stream keyed by (seed, stream_id).
///
/// The generator is xoshiro256** whose 256-bit state is expanded with
/// SplitMix64 from a key that mixes seed and stream id. The algorithm and the
/// derivation are part of the file-format contract: changing either changes
/// every exported CSV. Nothing here uses <random> distributions, whose output
/// is implementation-defined.
class RngStream {
public:
    static constexpr int kVersion = 1;

    RngStream() = default;
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 bits of resolution.
    double next_uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n) noexcept;

    /// Uniform integer in [lo, hi] (inclusive).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;

    bool bernoulli(double p) noexcept { return next_uniform() < p; }

    std::uint64_t poisson(double mean) noexcept;

    template <class T>
    void shuffle(std::span<T> items) noexcept
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(uniform_index(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    friend bool operator==(const RngStream&, const RngStream&) = default;

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t s_[4] = {0, 0, 0, 0};
};

} // namespace orgsim
