#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace dcw {

// Deterministic, platform-independent random streams. All stochastic engines
// draw from these instead of <random> distributions so that a (seed, stream)
// pair reproduces bit-identical runs on any compiler.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ with a cached Gaussian spare. Streams are derived from
/// (seed, stream_id); distinct ids give statistically independent streams,
/// which is what lets coupled runs share per-particle noise by construction.
class Rng {
public:
    Rng() : Rng(0, 0) {}

    Rng(std::uint64_t seed, std::uint64_t stream_id) { reseed(seed, stream_id); }

    void reseed(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t mix = seed;
        // fold the stream id in before expanding the state
        mix ^= 0x587ed5bf9cbcac8bULL * (stream_id + 1);
        state_[0] = splitmix64(mix);
        state_[1] = splitmix64(mix);
        state_[2] = splitmix64(mix);
        state_[3] = splitmix64(mix);
        have_spare_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, hi); never returns 0 exactly.
    double uniform_open(double hi) {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u * hi;
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Lemire rejection-free-ish multiply-shift; bias < 2^-64 * n.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Exponential with the given rate.
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    /// Standard normal via the Marsaglia polar method (spare cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    bool operator==(const Rng& other) const {
        return state_[0] == other.state_[0] && state_[1] == other.state_[1] &&
               state_[2] == other.state_[2] && state_[3] == other.state_[3];
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace dcw
