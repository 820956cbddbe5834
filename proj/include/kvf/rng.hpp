#pragma once

#include <cstdint>

namespace kvf {

/// SplitMix64 seed scrambler (Steele, Lea, Flood 2014).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xorshift64* generator. Platform-independent recurrence:
///   s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27;  out = s * 0x2545F4914F6CDD1D
/// seeded through one SplitMix64 step so that small seeds decorrelate.
class XorShift64Star {
public:
    explicit XorShift64Star(std::uint64_t seed) {
        std::uint64_t s = seed;
        state_ = splitmix64(s);
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
    }

    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1DULL;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

/// Independent per-trial stream derived from a master seed.
inline XorShift64Star substream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t s = master_seed;
    (void)splitmix64(s);
    s += index * 0xD1B54A32D192ED03ULL;
    return XorShift64Star(splitmix64(s));
}

} // namespace kvf
