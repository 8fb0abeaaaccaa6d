#pragma once

#include <cstdint>
#include <vector>

#include "plsh/rng.hpp"

namespace plsh {

// One sampled random-binning hash. The real line is cut into segments
// [offset + k*bin_width, offset + (k+1)*bin_width) and a value hashes to the
// index k of the segment containing it. Two values collide with probability
// exp(-|u - u'| / sigma) when bin_width ~ Gamma(2, sigma) and the offset is
// uniform on [0, bin_width).
struct RbfHash {
    double bin_width = 1.0;  // b > 0
    double offset = 0.0;     // c in [0, b)
};

// Contiguous partition of positions 0..n-1 into hash bins. boundaries is
// strictly increasing, starts at 0 and ends at n; block j spans
// [boundaries[j], boundaries[j+1]).
struct BlockPartition {
    std::int64_t n = 0;
    std::vector<std::int64_t> boundaries;

    std::size_t block_count() const { return boundaries.size() - 1; }

    std::int64_t block_size(std::size_t j) const {
        return boundaries[j + 1] - boundaries[j];
    }

    std::int64_t max_block_size() const;

    // Index of the block containing position u in [0, n).
    std::size_t block_of(std::int64_t u) const;
};

// One draw from Gamma(shape 2, scale sigma), built as the sum of two
// inverse-CDF exponentials -sigma*ln(U) with U uniform on (0,1].
double sample_gamma(double sigma, RandomStream& rng);

// Deterministic core of sample_gamma; u1, u2 must lie in (0,1].
double gamma_from_uniforms(double sigma, double u1, double u2);

RbfHash sample_rbf_hash(double sigma, RandomStream& rng);

// floor((u - offset) / bin_width), evaluated in double precision.
std::int64_t hash_position(const RbfHash& hash, double u);

// Groups consecutive integer positions 0..n-1 that share a hash value.
// Built by walking the bin edges offset + k*bin_width rather than hashing
// every position, so contiguity is structural.
BlockPartition partition_from_hash(const RbfHash& hash, std::int64_t n);

// s independent partitions; sample k uses child stream k of seed, so the
// result is identical whether samples are drawn sequentially or in parallel.
std::vector<BlockPartition> sample_partitions(double sigma, std::int64_t n, std::int64_t s,
                                              std::uint64_t seed);

// Fraction of independent hash draws under which positions i and j collide.
double estimate_collision_probability(double i, double j, double sigma, std::int64_t trials,
                                      std::uint64_t seed);

}  // namespace plsh
