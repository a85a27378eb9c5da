#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace zoomv {

// splitmix64 step. Small, fast, and fully specified, so seeded runs replay
// bit-identically across processes and platforms.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    return splitmix64_next(s);
}

inline std::uint64_t hash_bytes(std::uint64_t seed, std::string_view bytes) {
    std::uint64_t h = seed ^ 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return splitmix64_next(h);
}

inline std::uint64_t hash_double(std::uint64_t seed, double v) {
    return mix_seed(seed, std::bit_cast<std::uint64_t>(v));
}

// Named substream of a root seed. Subsystems draw from their own stream so
// they cannot desynchronize each other.
inline std::uint64_t substream(std::uint64_t root, std::string_view name) {
    return hash_bytes(root, name);
}

// Deterministic generator over splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x853c49e6748fea9bull) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Inclusive integer range.
    long long uniform_int(long long lo, long long hi) {
        return lo + static_cast<long long>(uniform() * static_cast<double>(hi - lo + 1));
    }

    // Standard normal via Box-Muller; two uniforms per draw, no cached spare,
    // so the stream position is independent of call history.
    double gauss() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t state_;
};

}  // namespace zoomv
