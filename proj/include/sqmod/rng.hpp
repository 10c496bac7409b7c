#ifndef SQMOD_RNG_HPP
#define SQMOD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace sqmod {

// xoshiro256++ with splitmix64 seeding. Self-contained so that streams are
// bit-identical across platforms and standard-library versions, which the
// deterministic-output contract requires (std::normal_distribution is not
// portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) { reseed(seed); }

    // Derives an independent sub-stream from (seed, path...). Streams with
    // distinct paths never share state, so repetitions and sweep points can
    // run in any order or thread.
    static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
        std::uint64_t x = seed;
        for (std::uint64_t id : path) {
            x = splitmix(x + 0x9E3779B97F4A7C15ULL * (id + 1));
        }
        return Rng(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via the Marsaglia polar method; the spare deviate of
    // each accepted pair is cached.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

private:
    void reseed(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) {
            x += 0x9E3779B97F4A7C15ULL;
            w = splitmix(x);
        }
        have_spare_ = false;
    }

    static std::uint64_t splitmix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ULL;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBULL;
        x ^= x >> 31;
        return x;
    }

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace sqmod

#endif
