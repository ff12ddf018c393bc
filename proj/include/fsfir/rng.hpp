#pragma once

// Deterministic 64-bit RNG (splitmix64) with hashed substreams so that
// replicate r of a run seeded with s is independent of the replicate count.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fsfir {

inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    /// Substream for replicate `rep` of base seed `seed`.
    static Rng substream(uint64_t seed, uint64_t rep) {
        uint64_t s = seed;
        uint64_t a = splitmix64_next(s);
        s ^= rep * 0xd1b54a32d192ed03ULL;
        uint64_t b = splitmix64_next(s);
        return Rng(a ^ (b + 0x9e3779b97f4a7c15ULL));
    }

    uint64_t next_u64() { return splitmix64_next(state_); }

    /// Uniform in (0, 1), never exactly 0 or 1.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; pairs are cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return next_u64() % n; }

  private:
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fsfir
