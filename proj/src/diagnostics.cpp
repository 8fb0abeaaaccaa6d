#include "plsh/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "plsh/alibi.hpp"
#include "plsh/mask_estimator.hpp"

namespace plsh {

double beta_star(const DenseMatrix& P, const DenseMatrix& bias) {
    if (!P.same_shape(bias)) throw std::invalid_argument("beta_star: shape mismatch");
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < P.rows(); ++i) {
        const double* prow = P.row(i);
        const double* brow = bias.row(i);
        double acc = 0.0;
        for (std::int64_t j = 0; j < P.cols(); ++j) acc += prow[j] * brow[j];
        best = std::min(best, acc);
    }
    return best;
}

double p_two_inf_norm(const DenseMatrix& P) {
    double best = 0.0;
    for (std::int64_t i = 0; i < P.rows(); ++i) {
        const double* prow = P.row(i);
        double acc = 0.0;
        for (std::int64_t j = 0; j < P.cols(); ++j) acc += prow[j] * prow[j];
        best = std::max(best, acc);
    }
    return std::sqrt(best);
}

ErrorAudit audit_against_mean(const AttentionInstance& instance, const DenseMatrix& mask_mean,
                              const DenseMatrix& approx_output, double spectral_tol,
                              std::int64_t spectral_max_iters) {
    validate_instance(instance);
    const std::int64_t n = instance.n();
    if (mask_mean.rows() != n || mask_mean.cols() != n)
        throw std::invalid_argument("audit_against_mean: mask mean shape mismatch");

    const NormalizedAttention unbiased = exact_attention(instance);
    const NormalizedAttention biased = exact_alibi_attention(instance);
    const DenseMatrix bias = alibi_matrix(n, instance.sigma);

    ErrorAudit audit;
    audit.beta_star = beta_star(unbiased.weights, bias);
    audit.p_two_inf = p_two_inf_norm(unbiased.weights);
    audit.res_max = residual_max_norm(bias, mask_mean);
    audit.res_spec = residual_spectral_norm(bias, mask_mean, spectral_tol, spectral_max_iters);
    audit.d_tilde_min = beta_star(unbiased.weights, mask_mean);
    audit.output_err = max_abs_diff(biased.output, approx_output);

    const double v_max = max_abs(instance.V);
    if (audit.d_tilde_min > 0.0) {
        const double delta = std::min(audit.res_max, audit.p_two_inf * audit.res_spec);
        audit.bound_value = 2.0 * delta * v_max / audit.d_tilde_min;
        // The spectral estimate converges from below with validated relative
        // error 1e-6; widen the check by that much so an under-estimate
        // cannot flag a false violation.
        audit.bound_holds = audit.output_err <= audit.bound_value * (1.0 + 1e-6) + 1e-9;
    } else {
        audit.degenerate = true;
        audit.bound_value = std::numeric_limits<double>::infinity();
        audit.bound_holds = true;
    }
    return audit;
}

ErrorAudit audit_error_bound(const AttentionInstance& instance,
                             const std::vector<BlockPartition>& partitions, double spectral_tol,
                             std::int64_t spectral_max_iters) {
    if (partitions.empty()) throw std::invalid_argument("audit_error_bound: no partitions");
    const DenseMatrix mean = empirical_mean(partitions, instance.n());
    const ApproxAttentionResult approx = approx_alibi_attention(instance, partitions);
    ErrorAudit audit =
        audit_against_mean(instance, mean, approx.output, spectral_tol, spectral_max_iters);
    audit.b_max = block_stats(partitions).b_max;
    audit.fallback_rows = approx.degenerate_rows;
    audit.work = approx.work;
    return audit;
}

}  // namespace plsh
