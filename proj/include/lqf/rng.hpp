#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lqf {

/// splitmix64 finalizer; the constant 0x9e3779b97f4a7c15 is the 64-bit golden ratio.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of replication `index` under `master`: master XOR mix(index).
constexpr std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return master ^ mix64(index);
}

/// Seed of an independent sub-stream (e.g. one grid point of an experiment).
/// Hashed again so that replication seeds of different streams do not alias.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return mix64(master ^ mix64(stream ^ 0x5851f42d4c957f2dULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, bound) by 64x64 -> 128 multiply-high; the
    /// bias is at most bound / 2^64.
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * bound) >> 64);
    }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    double normal() { return normal_(engine_); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace lqf
