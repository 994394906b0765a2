#pragma once

#include <cstdint>

#include "passport/math.hpp"

namespace passport {

// Stream domains keep independent uses of the same seed from colliding.
enum class RngDomain : std::uint64_t {
    Assets = 1,
    Actions = 2,
    PgData = 3,
    A2c = 4,
    DeepHedging = 5,
    VarianceStudy = 6,
    Init = 7,
    Test = 8,
};

// Counter-based splittable generator. A stream is a SplitMix64 sequence whose
// base key mixes (seed, domain, index), so per-path streams are independent of
// how many paths a caller asks for and of any scheduling order.
class RngStream {
public:
    RngStream(std::uint64_t seed, RngDomain domain, std::uint64_t index,
              std::uint64_t subindex = 0) {
        std::uint64_t h = mix(seed ^ 0x2545F4914F6CDD1Dull);
        h = mix(h ^ static_cast<std::uint64_t>(domain));
        h = mix(h ^ index);
        h = mix(h ^ subindex);
        state_ = h;
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform on (0,1), never exactly 0 or 1.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via inverse transform; one uniform per draw keeps the
    // stream alignment independent of the values drawn.
    double next_normal() { return norm_inv(next_uniform()); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
};

}  // namespace passport
