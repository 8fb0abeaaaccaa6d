#pragma once

#include <cstdint>
#include <vector>

#include "plsh/matrix.hpp"
#include "plsh/rbf_lsh.hpp"

namespace plsh {

// Block-size bookkeeping over a sample set.
struct MaskStats {
    std::int64_t s = 0;
    std::int64_t b_max = 0;
    std::vector<std::int64_t> per_sample_b_max;
};

// Binary block-diagonal matrix of a partition: entry (i,j) is 1 iff i and j
// share a block.
DenseMatrix mask_matrix(const BlockPartition& partition);

// Entrywise average of the mask matrices, accumulated per block range. The
// per-entry counts are small integers, so the sum is exact in double and the
// result is independent of accumulation order.
DenseMatrix empirical_mean(const std::vector<BlockPartition>& partitions, std::int64_t n);

// On-demand single entry of the empirical mean (co-blocked count / s); usable
// above the dense size cap.
double empirical_mean_entry(const std::vector<BlockPartition>& partitions, std::int64_t i,
                            std::int64_t j);

// max_ij |L_ij - M_ij|
double residual_max_norm(const DenseMatrix& L, const DenseMatrix& M);

/**
 * Spectral norm of a symmetric matrix by power iteration.
 *
 * Iterates v <- Rv/||Rv|| from a fixed seeded Gaussian start and reads off
 * ||Rv||, which increases monotonically to the largest |eigenvalue|; reading
 * the norm instead of the signed Rayleigh quotient keeps the estimate stable
 * when the dominant eigenvalue is negative. Converges from below, so the
 * returned value never exceeds the true norm. Stops when successive
 * estimates differ by less than tol or after max_iters.
 */
double spectral_norm_symmetric(const DenseMatrix& R, double tol = 1e-9,
                               std::int64_t max_iters = 10000, int restarts = 3);

// Spectral norm of L - M. Both inputs must be symmetric; an asymmetry above
// 1e-12 in the residual is a contract violation.
double residual_spectral_norm(const DenseMatrix& L, const DenseMatrix& M, double tol = 1e-9,
                              std::int64_t max_iters = 10000);

MaskStats block_stats(const std::vector<BlockPartition>& partitions);

// High-probability bound on the largest block over s samples:
// 1 + sigma*(3*ln(s/delta) + 2), exceeded with probability below delta.
double block_size_bound(double sigma, std::int64_t s, double delta);

}  // namespace plsh
