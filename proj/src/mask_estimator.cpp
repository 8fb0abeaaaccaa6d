#include "plsh/mask_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plsh/rng.hpp"

namespace plsh {

namespace {

constexpr std::uint64_t kPowerIterationSeed = 0x5eedbea7u;

void check_partition_n(const BlockPartition& p, std::int64_t n) {
    if (p.n != n) throw std::invalid_argument("partition context length mismatch");
}

}  // namespace

DenseMatrix mask_matrix(const BlockPartition& partition) {
    const std::int64_t n = partition.n;
    if (n > kDenseSizeCap) throw std::length_error("mask_matrix: n exceeds dense cap");
    DenseMatrix m(n, n, 0.0);
    for (std::size_t blk = 0; blk < partition.block_count(); ++blk) {
        const std::int64_t lo = partition.boundaries[blk];
        const std::int64_t hi = partition.boundaries[blk + 1];
        for (std::int64_t i = lo; i < hi; ++i)
            for (std::int64_t j = lo; j < hi; ++j) m(i, j) = 1.0;
    }
    return m;
}

DenseMatrix empirical_mean(const std::vector<BlockPartition>& partitions, std::int64_t n) {
    if (partitions.empty()) throw std::invalid_argument("empirical_mean: empty sample list");
    if (n > kDenseSizeCap) throw std::length_error("empirical_mean: n exceeds dense cap");
    DenseMatrix counts(n, n, 0.0);
    for (const auto& p : partitions) {
        check_partition_n(p, n);
        for (std::size_t blk = 0; blk < p.block_count(); ++blk) {
            const std::int64_t lo = p.boundaries[blk];
            const std::int64_t hi = p.boundaries[blk + 1];
            for (std::int64_t i = lo; i < hi; ++i) {
                double* row = counts.row(i);
                for (std::int64_t j = lo; j < hi; ++j) row[j] += 1.0;
            }
        }
    }
    const double inv_s = 1.0 / static_cast<double>(partitions.size());
    for (double& v : counts.data()) v *= inv_s;
    return counts;
}

double empirical_mean_entry(const std::vector<BlockPartition>& partitions, std::int64_t i,
                            std::int64_t j) {
    if (partitions.empty()) throw std::invalid_argument("empirical_mean_entry: empty sample list");
    std::int64_t hits = 0;
    for (const auto& p : partitions)
        if (p.block_of(i) == p.block_of(j)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(partitions.size());
}

double residual_max_norm(const DenseMatrix& L, const DenseMatrix& M) {
    return max_abs_diff(L, M);
}

double spectral_norm_symmetric(const DenseMatrix& R, double tol, std::int64_t max_iters,
                               int restarts) {
    const std::int64_t n = R.rows();
    if (R.cols() != n) throw std::invalid_argument("spectral_norm_symmetric: matrix not square");
    if (restarts < 1) throw std::invalid_argument("spectral_norm_symmetric: restarts < 1");

    std::vector<double> v(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    double best = 0.0;
    for (int r = 0; r < restarts; ++r) {
        RandomStream rng(kPowerIterationSeed + static_cast<std::uint64_t>(r));
        double norm_sq = 0.0;
        for (auto& x : v) {
            x = rng.gaussian();
            norm_sq += x * x;
        }
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& x : v) x *= inv;

        double estimate = 0.0;
        double prev = -1.0;
        for (std::int64_t iter = 0; iter < max_iters; ++iter) {
            for (std::int64_t i = 0; i < n; ++i) {
                const double* row = R.row(i);
                double acc = 0.0;
                for (std::int64_t j = 0; j < n; ++j) acc += row[j] * v[static_cast<std::size_t>(j)];
                w[static_cast<std::size_t>(i)] = acc;
            }
            double wn = 0.0;
            for (double x : w) wn += x * x;
            estimate = std::sqrt(wn);
            if (estimate == 0.0) break;  // start vector annihilated; matrix acts as zero here
            const double invw = 1.0 / estimate;
            for (std::int64_t i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] * invw;
            if (std::abs(estimate - prev) < tol) break;
            prev = estimate;
        }
        best = std::max(best, estimate);
    }
    return best;
}

double residual_spectral_norm(const DenseMatrix& L, const DenseMatrix& M, double tol,
                              std::int64_t max_iters) {
    if (!L.same_shape(M)) throw std::invalid_argument("residual_spectral_norm: shape mismatch");
    const std::int64_t n = L.rows();
    if (L.cols() != n) throw std::invalid_argument("residual_spectral_norm: matrix not square");
    DenseMatrix R(n, n);
    for (std::size_t i = 0; i < R.data().size(); ++i) R.data()[i] = L.data()[i] - M.data()[i];
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = i + 1; j < n; ++j)
            if (std::abs(R(i, j) - R(j, i)) > 1e-12)
                throw std::runtime_error("residual_spectral_norm: residual not symmetric");
    return spectral_norm_symmetric(R, tol, max_iters);
}

MaskStats block_stats(const std::vector<BlockPartition>& partitions) {
    if (partitions.empty()) throw std::invalid_argument("block_stats: empty sample list");
    MaskStats stats;
    stats.s = static_cast<std::int64_t>(partitions.size());
    stats.per_sample_b_max.reserve(partitions.size());
    for (const auto& p : partitions) {
        const std::int64_t b = p.max_block_size();
        stats.per_sample_b_max.push_back(b);
        stats.b_max = std::max(stats.b_max, b);
    }
    return stats;
}

double block_size_bound(double sigma, std::int64_t s, double delta) {
    if (!(sigma > 0.0)) throw std::invalid_argument("block_size_bound: sigma must be positive");
    if (s < 1) throw std::invalid_argument("block_size_bound: s must be at least 1");
    // delta up to and including 1/e (the tail inequality needs ln(s/delta) >= 1).
    constexpr double kInvE = 0.36787944117144233;
    if (!(delta > 0.0) || delta > kInvE)
        throw std::invalid_argument("block_size_bound: delta outside (0, 1/e]");
    return 1.0 + sigma * (3.0 * std::log(static_cast<double>(s) / delta) + 2.0);
}

}  // namespace plsh
