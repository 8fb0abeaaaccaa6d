#pragma once

#include <cstdint>
#include <vector>

#include "plsh/attention.hpp"
#include "plsh/matrix.hpp"
#include "plsh/rbf_lsh.hpp"

namespace plsh {

// Abstract operation counts for the blockwise path. One unit is one scalar
// slot of a block's |I|^2 x (d'+2) score/value/denominator work; the bound
// n*(d'+2)*s*b_max follows from sum_j |I_j|^2 <= n * max_j |I_j| per sample.
struct WorkCount {
    std::int64_t block_flop_units = 0;
    std::int64_t blocks_processed = 0;
    std::int64_t bound_nd_s_bmax = 0;
};

// Unnormalized attention restricted to the blocks of one partition.
// numerators row i holds sum_{k in block(i), admissible} exp(logit - m_i) * V_k
// and denominators[i] the matching scalar sum, with m_i the per-row max logit
// over admissible in-block pairs (returned in row_max).
struct BlockPartialSums {
    DenseMatrix numerators;            // n x d'
    std::vector<double> denominators;  // n
    std::vector<double> row_max;       // n, stabilizers actually used
};

BlockPartialSums block_partial_sums(const AttentionInstance& instance,
                                    const BlockPartition& partition);

struct ApproxAttentionResult {
    DenseMatrix output;  // n x d'
    WorkCount work;
    std::int64_t degenerate_rows = 0;
};

/**
 * Blockwise biased-attention approximation.
 *
 * Runs plain (positionally unbiased) attention inside every block of every
 * sampled partition and aggregates unnormalized numerators and denominators
 * across samples before the single division per row. Aggregation must happen
 * on unnormalized sums — averaging per-sample attention outputs would be a
 * different (wrong) estimator — so one global per-row stabilizer is shared
 * across all samples: pass 1 finds the max admissible in-block logit per row,
 * pass 2 accumulates with it. Pairs appearing in several samples accumulate
 * once per appearance; the 1/s factor cancels in the ratio.
 *
 * The result equals the dense path on the empirical mask mean up to
 * floating-point roundoff, at sum-of-squared-block-sizes cost instead of n^2.
 */
ApproxAttentionResult approx_alibi_attention(const AttentionInstance& instance,
                                             const std::vector<BlockPartition>& partitions);

bool work_bound_check(const WorkCount& work);

}  // namespace plsh
