#pragma once

#include <cstdint>
#include <random>

namespace qupass {

// Deterministic pseudo-random stream. Every stochastic operation in this
// library takes one explicitly; there is no hidden global randomness.
// Identical seed + identical call sequence gives identical output. Child
// streams forked from (seed, label) are independent of how much of the
// parent stream has been consumed, so parallel or reordered work stays
// reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(split_mix(seed)) {}

    // Uniform on [0,1) with 53 bits of precision.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t next_u64() { return gen_(); }

    // True with probability p. p <= 0 never fires, p >= 1 always fires.
    bool bernoulli(double p) { return uniform() < p; }

    // Child stream keyed by up to two labels, derived from the original seed.
    Rng fork(std::uint64_t a, std::uint64_t b = 0) const {
        std::uint64_t s = split_mix(seed_ ^ (0x9e3779b97f4a7c15ULL + a));
        s = split_mix(s ^ (0xbf58476d1ce4e5b9ULL + b));
        return Rng(s);
    }

    std::uint64_t seed() const { return seed_; }

private:
    static std::uint64_t split_mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace qupass
