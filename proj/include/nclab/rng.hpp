#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nclab/matrix.hpp"

namespace nclab {

/// Deterministic random source: xoshiro256++ seeded through splitmix64.
///
/// The generator and its transforms are frozen so that a seed reproduces the
/// same value stream bitwise on any platform:
///   - next_u64:   xoshiro256++ (Blackman/Vigna)
///   - next_unit:  top 53 bits scaled by 2^-53, uniform in [0,1)
///   - next_gaussian: Marsaglia polar method, one spare cached
///   - next_below: rejection sampling, no modulo bias
///
/// One RngState drives one run. Consumption order: layer initialization in
/// layer order at build time; per-epoch shuffles draw from a child stream
/// derived via for_stream(seed, epoch) so they are independent of how many
/// values initialization consumed.
class RngState {
public:
    explicit RngState(std::uint64_t seed);

    /// Child generator for (seed, stream); used for per-epoch permutations
    /// and sharded resampling. Derivation: the seed word of the child is
    /// splitmix64(splitmix64(seed) ^ (stream + golden_gamma)).
    static RngState for_stream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();
    double next_unit();
    double next_gaussian();
    std::uint64_t next_below(std::uint64_t n);

private:
    std::uint64_t seed_ = 0;
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// n standard-normal draws, consuming rng deterministically.
std::vector<double> gaussian(RngState& rng, std::size_t n);

/// fan_out x fan_in matrix with entries N(0, 2/fan_in). Throws on zero fans.
Matrix kaiming_normal(RngState& rng, std::size_t fan_in, std::size_t fan_out);

}  // namespace nclab
