#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hitop {

// Counter-based noise streams. Every draw is a pure function of
// (master seed, stream key, counter), so results are independent of
// evaluation order and thread count. Streams are keyed per
// (pass, device, index) by the engine.
struct StreamKey {
    std::uint64_t pass = 0;
    std::uint32_t device = 0;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
};

namespace detail {

// splitmix64 finalizer; full-avalanche 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_key(std::uint64_t seed, const StreamKey& k, std::uint64_t counter) {
    std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ULL);
    h = mix64(h ^ k.pass);
    h = mix64(h ^ ((std::uint64_t(k.device) << 32) | k.a));
    h = mix64(h ^ ((std::uint64_t(k.b) << 32) | 0x5851f42dULL));
    return mix64(h ^ counter);
}

// Map a 64-bit word to (0,1); never returns 0 or 1 exactly.
inline double to_unit(std::uint64_t h) {
    return (double(h >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace detail

class NoiseStream {
public:
    NoiseStream(std::uint64_t master_seed, StreamKey key)
        : seed_(master_seed), key_(key) {}

    double uniform() { return detail::to_unit(detail::hash_key(seed_, key_, counter_++)); }

    // Standard normal via Box-Muller on two counter draws.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t seed_;
    StreamKey key_;
    std::uint64_t counter_ = 0;
};

// Device indices used for stream keying inside a pass.
enum StreamDevice : std::uint32_t {
    kStreamVcsel = 0,
    kStreamMzm = 1,
    kStreamDetector = 2,
};

} // namespace hitop
