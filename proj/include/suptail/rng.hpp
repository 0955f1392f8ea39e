#pragma once

#include <cstdint>

namespace suptail {

// Counter-based pseudo-random stream (splitmix64 finalizer over a Weyl counter).
//
// Each stream is keyed by (seed, stream id); draws depend only on the key and the
// draw index, never on scheduling, so parallel runs that assign one stream per
// Monte Carlo path reproduce bit-for-bit under any worker count.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : state_(mix(seed + 0x9E3779B97F4A7C15ull) ^ mix(stream + 0xD1B54A32D192ED03ull)) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform draw on the half-open-from-below interval (0, 1]; u = 1 maps inverse-CDF
    // samplers to the infimum of the support, and u = 0 (which would blow up heavy-tail
    // quantiles) is unreachable.
    double next_unit() noexcept {
        const std::uint64_t bits = (next_u64() >> 11) + 1;  // 1 .. 2^53
        return static_cast<double>(bits) * 0x1.0p-53;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace suptail
