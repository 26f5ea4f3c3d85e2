#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace retrial {

/// SplitMix64 finalizer, used to expand a base seed into per-replication seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for replication `index` derived from `base`; distinct indices give unrelated streams.
constexpr std::uint64_t replication_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return splitmix64(base ^ splitmix64(index + 1));
}

/// Deterministic random stream. Owned by a single consumer.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1), built from the top 53 bits so results
    /// do not depend on the standard library's distribution implementations.
    double uniform() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Exp(rate) by inversion.
    double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

    std::uint64_t next_u64() noexcept { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace retrial
