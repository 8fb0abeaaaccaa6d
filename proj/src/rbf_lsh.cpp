#include "plsh/rbf_lsh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plsh {

std::int64_t BlockPartition::max_block_size() const {
    std::int64_t best = 0;
    for (std::size_t j = 0; j + 1 < boundaries.size(); ++j)
        best = std::max(best, boundaries[j + 1] - boundaries[j]);
    return best;
}

std::size_t BlockPartition::block_of(std::int64_t u) const {
    if (u < 0 || u >= n) throw std::out_of_range("block_of: position outside partition");
    auto it = std::upper_bound(boundaries.begin(), boundaries.end(), u);
    return static_cast<std::size_t>(it - boundaries.begin()) - 1;
}

double gamma_from_uniforms(double sigma, double u1, double u2) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gamma_from_uniforms: sigma must be positive");
    return -sigma * (std::log(u1) + std::log(u2));
}

double sample_gamma(double sigma, RandomStream& rng) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sample_gamma: sigma must be positive");
    return gamma_from_uniforms(sigma, rng.uniform_unit_pos(), rng.uniform_unit_pos());
}

RbfHash sample_rbf_hash(double sigma, RandomStream& rng) {
    double b = sample_gamma(sigma, rng);
    // b == 0 only when both uniforms hit 1.0 exactly; redraw keeps b > 0.
    while (b == 0.0) b = sample_gamma(sigma, rng);
    const double c = b * rng.uniform_unit();  // [0, b)
    return RbfHash{b, c};
}

std::int64_t hash_position(const RbfHash& hash, double u) {
    return static_cast<std::int64_t>(std::floor((u - hash.offset) / hash.bin_width));
}

BlockPartition partition_from_hash(const RbfHash& hash, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("partition_from_hash: n must be at least 1");
    if (!(hash.bin_width > 0.0)) throw std::invalid_argument("partition_from_hash: invalid hash");

    BlockPartition part;
    part.n = n;
    part.boundaries.reserve(
        static_cast<std::size_t>(std::min<double>(n, n / hash.bin_width + 3)) + 2);
    part.boundaries.push_back(0);

    if (hash.bin_width <= 1.0) {
        // Bins no longer than the integer grid spacing: every position is alone.
        for (std::int64_t u = 1; u <= n; ++u) part.boundaries.push_back(u);
        return part;
    }

    // Walk the bin edges upward starting from the bin that holds position 0.
    // Each edge at real coordinate x puts positions >= ceil(x) into the next
    // bin. Edges are computed as offset + k*bin_width directly (no running
    // sum), so no rounding error accumulates across the walk.
    for (std::int64_t k = hash_position(hash, 0.0) + 1;; ++k) {
        const double edge = hash.offset + static_cast<double>(k) * hash.bin_width;
        const auto boundary = static_cast<std::int64_t>(std::ceil(edge));
        if (boundary >= n) break;
        if (boundary > part.boundaries.back()) part.boundaries.push_back(boundary);
    }
    part.boundaries.push_back(n);
    return part;
}

std::vector<BlockPartition> sample_partitions(double sigma, std::int64_t n, std::int64_t s,
                                              std::uint64_t seed) {
    if (s < 1) throw std::invalid_argument("sample_partitions: s must be at least 1");
    std::vector<BlockPartition> out;
    out.reserve(static_cast<std::size_t>(s));
    for (std::int64_t i = 0; i < s; ++i) {
        RandomStream rng = RandomStream::child(seed, static_cast<std::uint64_t>(i));
        out.push_back(partition_from_hash(sample_rbf_hash(sigma, rng), n));
    }
    return out;
}

double estimate_collision_probability(double i, double j, double sigma, std::int64_t trials,
                                      std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("estimate_collision_probability: trials < 1");
    std::int64_t hits = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        RandomStream rng = RandomStream::child(seed, static_cast<std::uint64_t>(t));
        const RbfHash h = sample_rbf_hash(sigma, rng);
        if (hash_position(h, i) == hash_position(h, j)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace plsh
