#ifndef MEMECLF_RNG_HPP
#define MEMECLF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace memeclf {

// Deterministic, platform-stable PRNG. std::uniform_real_distribution and
// friends are implementation-defined, so all sampling goes through this
// instead. Streams are keyed by a seed plus an arbitrary list of tags, which
// makes per-(sample, epoch, purpose) streams cheap and order-independent.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class RngStream {
public:
    explicit RngStream(uint64_t seed) : state_(splitmix64(seed ^ 0x5851f42d4c957f2dULL)) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [lo, hi] inclusive.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int64_t>(next_u64() % span);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller; two uniforms per sample keeps the stream stateless.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * M_PI * u2);
    }

private:
    uint64_t state_;
};

class RngKey {
public:
    explicit RngKey(uint64_t seed) : key_(splitmix64(seed)) {}

    RngKey with(std::string_view tag) const { return RngKey(mix(key_, fnv1a64(tag)), 0); }
    RngKey with(uint64_t tag) const { return RngKey(mix(key_, splitmix64(tag)), 0); }

    RngStream stream() const { return RngStream(key_); }
    uint64_t value() const { return key_; }

private:
    RngKey(uint64_t key, int) : key_(key) {}
    static uint64_t mix(uint64_t a, uint64_t b) { return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2))); }
    uint64_t key_;
};

} // namespace memeclf

#endif
