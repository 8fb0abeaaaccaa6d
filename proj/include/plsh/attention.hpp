#pragma once

#include <cstdint>

#include "plsh/matrix.hpp"

namespace plsh {

// One biased-attention problem: queries, keys, values, decay bandwidth and
// the causality flag. The causal mask is applied through an admissibility
// predicate (key index <= query index), never materialized.
struct AttentionInstance {
    DenseMatrix Q;  // n x d
    DenseMatrix K;  // n x d
    DenseMatrix V;  // n x d'
    double sigma = 1.0;
    bool causal = false;

    std::int64_t n() const { return Q.rows(); }
    std::int64_t d() const { return Q.cols(); }
    std::int64_t d_prime() const { return V.cols(); }
};

void validate_instance(const AttentionInstance& instance);

// Pre-exponential scores: entry (i,j) = dot(q_i, k_j) / sqrt(d).
DenseMatrix attention_logits(const DenseMatrix& Q, const DenseMatrix& K);

/**
 * Rows of exp(logits) ⊙ weight (⊙ causal mask) normalized to sum to 1.
 *
 * Stabilized per row: the max of logit + ln(weight) over admissible entries
 * is subtracted before exponentiation; zero-weight entries are excluded
 * rather than sent through ln(0). A row with no admissible positive-weight
 * entry raises an error naming the row.
 */
DenseMatrix row_normalize_weighted(const DenseMatrix& logits, const DenseMatrix& weight,
                                   bool causal);

struct NormalizedAttention {
    DenseMatrix weights;  // row-stochastic n x n
    DenseMatrix output;   // weights * V, n x d'
};

// Unbiased attention: weights from uniform (all-ones) weighting.
NormalizedAttention exact_attention(const AttentionInstance& instance);

// Exact biased attention: weights multiplied by exp(-|i-j|/sigma).
NormalizedAttention exact_alibi_attention(const AttentionInstance& instance);

// Dense reference path for an arbitrary nonnegative weighting matrix.
// Fully-masked rows fall back to copying the row's own value vector and are
// counted into *degenerate_rows when provided.
DenseMatrix dense_masked_attention(const AttentionInstance& instance, const DenseMatrix& weight,
                                   std::int64_t* degenerate_rows = nullptr);

namespace detail {

enum class DegenerateRowPolicy { kThrow, kSelfFallback };

DenseMatrix weighted_row_softmax(const DenseMatrix& logits, const DenseMatrix& weight, bool causal,
                                 DegenerateRowPolicy policy, std::int64_t* degenerate_count);

}  // namespace detail

}  // namespace plsh
