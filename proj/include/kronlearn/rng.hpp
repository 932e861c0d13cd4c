#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace kronlearn {

// SplitMix64; used to expand seeds and to derive independent stream seeds.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ (Blackman & Vigna). Small, fast, and fully portable, so the
// same seed reproduces the same byte stream on every platform.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& s : s_) s = sm.next();
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
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

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Stream labels. Each component of a run draws from its own stream derived
// from (seed, stream), so e.g. re-drawing edge weights never perturbs the
// topology and datasets of different sizes share sample prefixes.
enum class Stream : std::uint64_t {
    FactorTopology1 = 1,
    FactorWeights1 = 2,
    FactorTopology2 = 3,
    FactorWeights2 = 4,
    Signals = 5,
};

// Seeded random stream with the distribution transforms used in this project
// implemented inline (uniform via 53-bit mantissa fill, normal via
// Box-Muller), keeping draws independent of any standard-library internals.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    RandomStream(std::uint64_t seed, Stream stream)
        : gen_(derive_seed(seed, static_cast<std::uint64_t>(stream))) {}

    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 sm(seed ^ (0x632be59bd9b4e019ULL * (stream + 1)));
        return sm.next();
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Uniform integer in [0, n); rejection-sampled, bias-free.
    int uniform_int(int n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<int>(x % bound);
    }

    bool bernoulli(double prob) { return uniform01() < prob; }

    // Standard normal via Box-Muller; pairs are generated together and the
    // spare is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        spare_ = r * std::sin(two_pi * u2);
        has_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

private:
    Xoshiro256pp gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kronlearn
