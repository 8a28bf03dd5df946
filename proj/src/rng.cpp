#include "stochgeo/rng.hpp"

#include <cmath>

namespace stochgeo {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SeedState SeedState::substream(std::uint64_t tag) const {
    std::uint64_t st = stream_index ^ (0xa0761d6478bd642fULL * (tag + 1));
    std::uint64_t mixed = splitmix64(st);
    return SeedState{root_seed, mixed};
}

Rng::Rng(SeedState seed) {
    std::uint64_t st = seed.root_seed;
    (void)splitmix64(st);
    st ^= 0xd1b54a32d192ed03ULL * (seed.stream_index + 1);
    for (auto& w : s_) w = splitmix64(st);
}

static inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t Rng::next_u64() {
    // xoshiro256**
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform01_open() {
    double u;
    do {
        u = uniform01();
    } while (u <= 0.0);
    return u;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double Rng::normal() {
    const double u1 = uniform01_open();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
}

double Rng::rademacher() { return (next_u64() & 1ULL) ? 1.0 : -1.0; }

long Rng::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be >= 0");
    if (mean == 0.0) return 0;
    return mean < 10.0 ? poisson_small(mean) : poisson_ptrd(mean);
}

long Rng::poisson_small(double mean) {
    const double limit = std::exp(-mean);
    long k = 0;
    double prod = uniform01_open();
    while (prod > limit) {
        ++k;
        prod *= uniform01_open();
    }
    return k;
}

long Rng::poisson_ptrd(double mean) {
    // Hormann's transformed rejection (PTRS); exact for mean >= 10.
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mu = std::log(mean);
    for (;;) {
        const double u = uniform01() - 0.5;
        const double v = uniform01_open();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<long>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <= k * log_mu - mean - std::lgamma(k + 1.0))
            return static_cast<long>(k);
    }
}

Point Rng::point_in(const Region& region) {
    const std::size_t d = region.dim();
    Point p(d);
    if (region.shape == Shape::Cube) {
        for (std::size_t i = 0; i < d; ++i)
            p[i] = region.center[i] + region.scale * (2.0 * uniform01() - 1.0);
        return p;
    }
    for (;;) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double c = 2.0 * uniform01() - 1.0;
            p[i] = c;
            s += c * c;
        }
        if (s <= 1.0) {
            for (std::size_t i = 0; i < d; ++i) p[i] = region.center[i] + region.scale * p[i];
            return p;
        }
    }
}

}  // namespace stochgeo
