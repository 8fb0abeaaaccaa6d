#include "plsh/attention.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "plsh/alibi.hpp"

namespace plsh {

void validate_instance(const AttentionInstance& instance) {
    if (instance.Q.rows() < 1) throw std::invalid_argument("instance: empty query matrix");
    if (instance.Q.rows() != instance.K.rows() || instance.Q.cols() != instance.K.cols())
        throw std::invalid_argument("instance: Q and K shapes differ");
    if (instance.V.rows() != instance.Q.rows())
        throw std::invalid_argument("instance: V row count differs from Q");
    if (!(instance.sigma > 0.0)) throw std::invalid_argument("instance: sigma must be positive");
    if (!instance.Q.all_finite() || !instance.K.all_finite() || !instance.V.all_finite())
        throw std::invalid_argument("instance: non-finite entry");
}

DenseMatrix attention_logits(const DenseMatrix& Q, const DenseMatrix& K) {
    if (Q.cols() != K.cols() || Q.rows() != K.rows())
        throw std::invalid_argument("attention_logits: Q and K shapes differ");
    const std::int64_t n = Q.rows();
    const std::int64_t d = Q.cols();
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    DenseMatrix logits(n, n);
    for (std::int64_t i = 0; i < n; ++i) {
        const double* qi = Q.row(i);
        for (std::int64_t j = 0; j < n; ++j) {
            const double* kj = K.row(j);
            double dot = 0.0;
            for (std::int64_t t = 0; t < d; ++t) dot += qi[t] * kj[t];
            logits(i, j) = dot * inv_sqrt_d;
        }
    }
    return logits;
}

namespace detail {

DenseMatrix weighted_row_softmax(const DenseMatrix& logits, const DenseMatrix& weight, bool causal,
                                 DegenerateRowPolicy policy, std::int64_t* degenerate_count) {
    const std::int64_t n = logits.rows();
    if (logits.cols() != n) throw std::invalid_argument("weighted_row_softmax: logits not square");
    if (!weight.same_shape(logits))
        throw std::invalid_argument("weighted_row_softmax: weight shape mismatch");
    for (double w : weight.data())
        if (w < 0.0 || !std::isfinite(w))
            throw std::invalid_argument("weighted_row_softmax: weight entries must be nonnegative");

    DenseMatrix P(n, n, 0.0);
    std::vector<double> score(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t j_max = causal ? i : n - 1;
        double m = -std::numeric_limits<double>::infinity();
        for (std::int64_t j = 0; j <= j_max; ++j) {
            const double w = weight(i, j);
            if (w <= 0.0) continue;
            const double sc = logits(i, j) + std::log(w);
            score[static_cast<std::size_t>(j)] = sc;
            m = std::max(m, sc);
        }
        if (m == -std::numeric_limits<double>::infinity()) {
            if (policy == DegenerateRowPolicy::kThrow)
                throw std::runtime_error("fully masked row " + std::to_string(i));
            P(i, i) = 1.0;  // attend to self so the output stays finite
            if (degenerate_count) ++(*degenerate_count);
            continue;
        }
        double sum = 0.0;
        for (std::int64_t j = 0; j <= j_max; ++j) {
            if (weight(i, j) <= 0.0) continue;
            const double e = std::exp(score[static_cast<std::size_t>(j)] - m);
            P(i, j) = e;
            sum += e;
        }
        const double inv = 1.0 / sum;
        for (std::int64_t j = 0; j <= j_max; ++j) P(i, j) *= inv;
    }
    return P;
}

}  // namespace detail

DenseMatrix row_normalize_weighted(const DenseMatrix& logits, const DenseMatrix& weight,
                                   bool causal) {
    return detail::weighted_row_softmax(logits, weight, causal,
                                        detail::DegenerateRowPolicy::kThrow, nullptr);
}

NormalizedAttention exact_attention(const AttentionInstance& instance) {
    validate_instance(instance);
    const DenseMatrix logits = attention_logits(instance.Q, instance.K);
    const DenseMatrix uniform = DenseMatrix::ones(instance.n(), instance.n());
    NormalizedAttention result;
    result.weights = row_normalize_weighted(logits, uniform, instance.causal);
    result.output = multiply(result.weights, instance.V);
    return result;
}

NormalizedAttention exact_alibi_attention(const AttentionInstance& instance) {
    validate_instance(instance);
    const DenseMatrix logits = attention_logits(instance.Q, instance.K);
    const DenseMatrix bias = alibi_matrix(instance.n(), instance.sigma);
    NormalizedAttention result;
    // Bias entries are strictly positive and the diagonal is always
    // admissible, so no row can be fully masked here.
    result.weights = row_normalize_weighted(logits, bias, instance.causal);
    result.output = multiply(result.weights, instance.V);
    return result;
}

DenseMatrix dense_masked_attention(const AttentionInstance& instance, const DenseMatrix& weight,
                                   std::int64_t* degenerate_rows) {
    validate_instance(instance);
    const DenseMatrix logits = attention_logits(instance.Q, instance.K);
    std::int64_t degenerate = 0;
    const DenseMatrix P = detail::weighted_row_softmax(
        logits, weight, instance.causal, detail::DegenerateRowPolicy::kSelfFallback, &degenerate);
    if (degenerate_rows) *degenerate_rows = degenerate;
    return multiply(P, instance.V);
}

}  // namespace plsh
