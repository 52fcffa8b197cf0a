#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "arrowlab/vec2.hpp"

namespace arrowlab {

/// splitmix64 stream. All randomness in the lab flows through this generator
/// so that runs are reproducible bit-for-bit across platforms; std::
/// distributions are avoided on purpose (their output is implementation
/// defined).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n). Rejection-free modulo is fine here: n is always
    /// tiny against 2^64, so the bias is far below anything observable.
    std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    /// Standard normal via Box-Muller (deterministic given the stream).
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Vec2 next_unit_vector() {
        const double a = 2.0 * M_PI * next_double();
        return {std::cos(a), std::sin(a)};
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x00000100000001B3ULL;
    }
    return h;
}

/// Independent stream derived from (seed, label). Each consumer draws from
/// its own labelled stream, so adding a consumer never shifts another's
/// sequence.
inline SplitMix64 stream_for(std::uint64_t seed, std::string_view label) {
    SplitMix64 mixer(seed ^ fnv1a64(label));
    // burn one output through the mixer so nearby seeds decorrelate
    return SplitMix64(mixer.next());
}

}  // namespace arrowlab
