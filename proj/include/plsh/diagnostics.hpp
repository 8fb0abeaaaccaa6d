#pragma once

#include <cstdint>
#include <vector>

#include "plsh/attention.hpp"
#include "plsh/block_attention.hpp"
#include "plsh/matrix.hpp"
#include "plsh/rbf_lsh.hpp"

namespace plsh {

// Measured quantities of one approximation run plus the deterministic output
// error bound they imply. With D = min row denominator under the mask mean,
// the chain |T* - T~*|_max <= 2 * min{res_max, p_two_inf * res_spec} *
// |V|_max / D holds exactly for realized norms, independent of any sampling
// probabilities.
struct ErrorAudit {
    double beta_star = 1.0;   // min_i sum_j P_ij * bias_ij, the exact-bias floor
    double p_two_inf = 1.0;   // max row Euclidean norm of P
    double res_max = 0.0;     // |bias - mask mean|_max
    double res_spec = 0.0;    // |bias - mask mean| spectral
    double d_tilde_min = 0.0; // min_i sum_j P_ij * mask_mean_ij
    double output_err = 0.0;  // |T* - T~*|_max
    double bound_value = 0.0; // +inf when d_tilde_min <= 0
    bool bound_holds = false;
    bool degenerate = false;  // d_tilde_min <= 0; bound vacuous
    std::int64_t b_max = 0;
    std::int64_t fallback_rows = 0;
    WorkCount work;
};

// Minimum over rows of the P-weighted bias row sum.
double beta_star(const DenseMatrix& P, const DenseMatrix& bias);

// Maximum row Euclidean norm.
double p_two_inf_norm(const DenseMatrix& P);

// Audit core against an explicit mask mean and approximate output; used by
// audit_error_bound and directly testable with synthetic means.
ErrorAudit audit_against_mean(const AttentionInstance& instance, const DenseMatrix& mask_mean,
                              const DenseMatrix& approx_output, double spectral_tol = 1e-9,
                              std::int64_t spectral_max_iters = 10000);

// Full audit of one run: samples nothing itself, computes the exact and
// blockwise outputs for the given partitions and all bound ingredients.
ErrorAudit audit_error_bound(const AttentionInstance& instance,
                             const std::vector<BlockPartition>& partitions,
                             double spectral_tol = 1e-9,
                             std::int64_t spectral_max_iters = 10000);

}  // namespace plsh
