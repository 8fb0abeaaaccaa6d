#include "plsh/block_attention.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "plsh/mask_estimator.hpp"

namespace plsh {

namespace {

inline double block_logit(const AttentionInstance& instance, double inv_sqrt_d, std::int64_t i,
                          std::int64_t k) {
    const double* qi = instance.Q.row(i);
    const double* kk = instance.K.row(k);
    double dot = 0.0;
    for (std::int64_t t = 0; t < instance.d(); ++t) dot += qi[t] * kk[t];
    return dot * inv_sqrt_d;
}

}  // namespace

BlockPartialSums block_partial_sums(const AttentionInstance& instance,
                                    const BlockPartition& partition) {
    validate_instance(instance);
    const std::int64_t n = instance.n();
    if (partition.n != n) throw std::invalid_argument("block_partial_sums: partition n mismatch");
    const std::int64_t dp = instance.d_prime();
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(instance.d()));

    BlockPartialSums sums;
    sums.numerators = DenseMatrix(n, dp, 0.0);
    sums.denominators.assign(static_cast<std::size_t>(n), 0.0);
    sums.row_max.assign(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());

    for (std::size_t blk = 0; blk < partition.block_count(); ++blk) {
        const std::int64_t lo = partition.boundaries[blk];
        const std::int64_t hi = partition.boundaries[blk + 1];
        for (std::int64_t i = lo; i < hi; ++i) {
            const std::int64_t k_hi = instance.causal ? std::min(i + 1, hi) : hi;
            // The self pair (i,i) is always admissible, so the max is finite.
            double m = -std::numeric_limits<double>::infinity();
            for (std::int64_t k = lo; k < k_hi; ++k)
                m = std::max(m, block_logit(instance, inv_sqrt_d, i, k));
            sums.row_max[static_cast<std::size_t>(i)] = m;
            double* num = sums.numerators.row(i);
            double den = 0.0;
            for (std::int64_t k = lo; k < k_hi; ++k) {
                const double e = std::exp(block_logit(instance, inv_sqrt_d, i, k) - m);
                den += e;
                const double* vk = instance.V.row(k);
                for (std::int64_t t = 0; t < dp; ++t) num[t] += e * vk[t];
            }
            sums.denominators[static_cast<std::size_t>(i)] = den;
        }
    }
    return sums;
}

ApproxAttentionResult approx_alibi_attention(const AttentionInstance& instance,
                                             const std::vector<BlockPartition>& partitions) {
    validate_instance(instance);
    if (partitions.empty()) throw std::invalid_argument("approx_alibi_attention: no partitions");
    const std::int64_t n = instance.n();
    const std::int64_t dp = instance.d_prime();
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(instance.d()));
    for (const auto& p : partitions)
        if (p.n != n) throw std::invalid_argument("approx_alibi_attention: partition n mismatch");

    // Pass 1: global per-row stabilizer over all admissible in-block pairs.
    std::vector<double> row_max(static_cast<std::size_t>(n),
                                -std::numeric_limits<double>::infinity());
    for (const auto& p : partitions) {
        for (std::size_t blk = 0; blk < p.block_count(); ++blk) {
            const std::int64_t lo = p.boundaries[blk];
            const std::int64_t hi = p.boundaries[blk + 1];
            for (std::int64_t i = lo; i < hi; ++i) {
                const std::int64_t k_hi = instance.causal ? std::min(i + 1, hi) : hi;
                double m = row_max[static_cast<std::size_t>(i)];
                for (std::int64_t k = lo; k < k_hi; ++k)
                    m = std::max(m, block_logit(instance, inv_sqrt_d, i, k));
                row_max[static_cast<std::size_t>(i)] = m;
            }
        }
    }

    // Pass 2: accumulate numerators and denominators with the shared
    // stabilizer; samples and blocks are independent here.
    DenseMatrix num(n, dp, 0.0);
    std::vector<double> den(static_cast<std::size_t>(n), 0.0);
    WorkCount work;
    for (const auto& p : partitions) {
        for (std::size_t blk = 0; blk < p.block_count(); ++blk) {
            const std::int64_t lo = p.boundaries[blk];
            const std::int64_t hi = p.boundaries[blk + 1];
            const std::int64_t size = hi - lo;
            work.block_flop_units += size * size * (dp + 2);
            work.blocks_processed += 1;
            for (std::int64_t i = lo; i < hi; ++i) {
                const std::int64_t k_hi = instance.causal ? std::min(i + 1, hi) : hi;
                const double m = row_max[static_cast<std::size_t>(i)];
                double* num_row = num.row(i);
                double d_acc = 0.0;
                for (std::int64_t k = lo; k < k_hi; ++k) {
                    const double e = std::exp(block_logit(instance, inv_sqrt_d, i, k) - m);
                    d_acc += e;
                    const double* vk = instance.V.row(k);
                    for (std::int64_t t = 0; t < dp; ++t) num_row[t] += e * vk[t];
                }
                den[static_cast<std::size_t>(i)] += d_acc;
            }
        }
    }

    const std::int64_t s = static_cast<std::int64_t>(partitions.size());
    const std::int64_t b_max = block_stats(partitions).b_max;
    work.bound_nd_s_bmax = n * (dp + 2) * s * b_max;
    if (!work_bound_check(work))
        throw std::logic_error("approx_alibi_attention: work bound violated");

    ApproxAttentionResult result;
    result.work = work;
    result.output = DenseMatrix(n, dp, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        double* out = result.output.row(i);
        const double d_i = den[static_cast<std::size_t>(i)];
        if (d_i > 0.0) {
            const double inv = 1.0 / d_i;
            const double* num_row = num.row(i);
            for (std::int64_t t = 0; t < dp; ++t) out[t] = num_row[t] * inv;
        } else {
            // Unreachable through sampled partitions (the self pair always
            // contributes), kept so a bug cannot surface as NaN.
            const double* vi = instance.V.row(i);
            for (std::int64_t t = 0; t < dp; ++t) out[t] = vi[t];
            ++result.degenerate_rows;
        }
    }
    return result;
}

bool work_bound_check(const WorkCount& work) {
    return work.block_flop_units <= work.bound_nd_s_bmax;
}

}  // namespace plsh
