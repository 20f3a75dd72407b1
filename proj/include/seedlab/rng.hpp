#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace seedlab {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t state, std::uint64_t word) {
    return splitmix64(state ^ (word + 0x9e3779b97f4a7c15ULL));
}

}  // namespace detail

/// Named RNG substreams. Every draw in a seeding run comes from an engine
/// derived from (base_seed, trial, iteration, lane), so runs are reproducible
/// and trials are independent under any execution order. Lane 0 carries the
/// sampling draws of an iteration; lane 1 is reserved for adversary
/// randomness so that a perturbation strategy never shifts the sampling
/// stream.
class SubstreamRng {
public:
    SubstreamRng(std::uint64_t base_seed, std::uint64_t trial)
        : base_seed_(base_seed), trial_(trial) {}

    std::uint64_t base_seed() const { return base_seed_; }
    std::uint64_t trial() const { return trial_; }

    std::mt19937_64 engine(std::uint64_t iteration, std::uint64_t lane = 0) const {
        std::uint64_t s = detail::mix(base_seed_, trial_);
        s = detail::mix(s, iteration);
        s = detail::mix(s, lane);
        return std::mt19937_64(s);
    }

private:
    std::uint64_t base_seed_;
    std::uint64_t trial_;
};

/// Uniform double in [0,1) consuming exactly one engine step.
inline double canonical_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// FNV-1a over the bit patterns of a double array. Used to fingerprint
/// sampling distributions in traces.
inline std::uint64_t hash_doubles(const std::vector<double>& values) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : values) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        __builtin_memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

}  // namespace seedlab
