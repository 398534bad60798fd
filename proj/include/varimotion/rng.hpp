#pragma once

#include <cstdint>
#include <string_view>

namespace vmo {

// Deterministic random generator (xoshiro256** seeded through splitmix64).
// We roll our own rather than using <random> distributions so that every
// stream is bit-stable across standard library versions; reported numbers
// must be reproducible from the master seed alone.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // Derives an independent stream identified by name. Substreams of the
    // same (seed, name) pair are identical; different names decorrelate.
    Rng substream(std::string_view name) const;

    std::uint64_t next_u64();

    // Uniform in [0, 1) with 53 bits of mantissa.
    double uniform();
    double uniform(double lo, double hi);

    // Uniform integer in [0, n), n > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n);

    // Standard Gaussian via Box-Muller.
    double normal();
    double normal(double mean, double stddev);

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t s_[4] = {};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// FNV-1a, used for substream derivation and anywhere a stable string hash
// is needed (never std::hash, which is implementation defined).
std::uint64_t stable_hash(std::string_view text);

} // namespace vmo
