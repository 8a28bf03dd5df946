#pragma once

#include <cstdint>
#include <vector>

#include "stochgeo/geometry.hpp"

namespace stochgeo {

/// Identifies one reproducible random stream. Identical (root_seed,
/// stream_index) always produces identical draw sequences, so replica k of a
/// campaign runs on stream k and parallel execution matches serial.
struct SeedState {
    std::uint64_t root_seed = 0;
    std::uint64_t stream_index = 0;

    SeedState substream(std::uint64_t tag) const;
    bool operator==(const SeedState&) const = default;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic generator. All distributions are implemented locally on top
/// of xoshiro256** so that sequences do not depend on the standard library's
/// unspecified distribution algorithms.
class Rng {
public:
    explicit Rng(SeedState seed);

    std::uint64_t next_u64();

    /// Uniform on [0, 1).
    double uniform01();
    /// Uniform on (0, 1).
    double uniform01_open();
    double uniform(double lo, double hi);
    /// Standard normal via Box-Muller (one value per pair of uniforms).
    double normal();
    /// Exact Poisson sample; inversion below mean 10, transformed rejection above.
    long poisson(double mean);
    /// +1 or -1 with probability 1/2.
    double rademacher();

    /// Uniform point in a region (rejection from the bounding cube for balls).
    Point point_in(const Region& region);

private:
    std::uint64_t s_[4];
    long poisson_small(double mean);
    long poisson_ptrd(double mean);
};

}  // namespace stochgeo
