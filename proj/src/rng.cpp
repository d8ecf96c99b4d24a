#include "orgsim/rng.hpp"

#include <cmath>

namespace orgsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) noexcept
{
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed)
    , stream_id_(stream_id)
{
    // Hash the stream id through its own SplitMix round before combining so
    // that neighbouring (seed, id) pairs do not share expanded states.
    std::uint64_t id_key = stream_id;
    std::uint64_t key = seed ^ splitmix64(id_key);
    for (auto& word : s_) {
        word = splitmix64(key);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
        s_[0] = 1;
    }
}

std::uint64_t RngStream::next_u64() noexcept
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

__extension__ using u128 = unsigned __int128;

std::uint64_t RngStream::uniform_index(std::uint64_t n) noexcept
{
    // Lemire's multiply-shift with rejection; exact for every n.
    auto product = static_cast<u128>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(product);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            product = static_cast<u128>(next_u64()) * n;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) noexcept
{
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(uniform_index(span));
}

std::uint64_t RngStream::poisson(double mean) noexcept
{
    if (!(mean > 0.0)) {
        return 0;
    }
    // Knuth's product method, applied in chunks so exp(-chunk) never underflows.
    constexpr double kChunk = 16.0;
    std::uint64_t total = 0;
    double remaining = mean;
    while (remaining > 0.0) {
        const double part = remaining > kChunk ? kChunk : remaining;
        remaining -= part;
        const double limit = std::exp(-part);
        double product = next_uniform();
        while (product >= limit) {
            ++total;
            product *= next_uniform();
        }
    }
    return total;
}

} // namespace orgsim
