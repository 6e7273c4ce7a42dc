#pragma once

#include <cstdint>
#include <random>

namespace martlab {

// splitmix64; used both as a seed scrambler and as a splittable counter so
// per-path streams are independent of evaluation order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(0x5851f42d4c957f2dULL + stream));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(deriveSeed(seed, stream)) {}

    double uniform() { return uni_(engine_); }
    double normal() { return normal_(engine_); }
    int rademacher() { return uniform() < 0.5 ? -1 : 1; }
    std::uint64_t bits() { return engine_(); }

    // uniform integer in [0, n)
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uni_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace martlab
