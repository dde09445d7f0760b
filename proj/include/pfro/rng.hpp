#pragma once

#include <cmath>
#include <cstdint>

namespace pfro {

// Deterministic, bit-portable random streams.
//
// The standard <random> engines are portable but the *distributions* are not
// (libstdc++ and libc++ produce different uniform_real sequences), so results
// would not reproduce across toolchains. We therefore use xoshiro256++ with a
// SplitMix64 seeder and fixed double conversion: the full u64 -> [0,1) map is
// (x >> 11) * 2^-53, and exponentials come from -log1p(-u). Both are exact
// IEEE-754 expressions and identical everywhere.

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// One-shot finalizer used for seed derivation (splitmix64 with throwaway state).
inline uint64_t mix64(uint64_t x) {
    return splitmix64(x);
}

class Rng {
  public:
    explicit Rng(uint64_t seed) {
        // Expand the 64-bit seed into the 256-bit state; SplitMix64 is the
        // initialization recommended by the xoshiro authors.
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    uint64_t next() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform on [0, 1)^d written into out[0..d).
    void fill_uniform(double* out, int d) {
        for (int i = 0; i < d; ++i) out[i] = uniform01();
    }

    // Exp(1) via inversion; -log1p(-u) is finite for u in [0,1).
    double exponential() {
        return -std::log1p(-uniform01());
    }

  private:
    static uint64_t rotl(uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    uint64_t s_[4];
};

// Seed-derivation scheme (documented in the README):
//   replicate_seed(S, r)  -- independent per-replicate run seeds from a base seed
//   stream_seed(s, which) -- independent substreams of one run (positions, clock)
// The constants are arbitrary distinct odd 64-bit values; mix64 decorrelates
// nearby inputs so consecutive replicate indices give unrelated streams.

inline uint64_t replicate_seed(uint64_t base_seed, uint64_t replicate) {
    return mix64(base_seed ^ 0x5851f42d4c957f2dULL ^ (replicate * 0x14057b7ef767814fULL + 0x9e3779b97f4a7c15ULL));
}

enum class Stream : uint64_t {
    Positions = 0,
    Clock = 1,
};

inline uint64_t stream_seed(uint64_t run_seed, Stream which) {
    return mix64(run_seed + 0xd1342543de82ef95ULL * (static_cast<uint64_t>(which) + 1));
}

} // namespace pfro
