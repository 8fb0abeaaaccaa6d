#include "plsh/alibi.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace plsh {

double alibi_entry(std::int64_t i, std::int64_t j, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("alibi_entry: sigma must be positive");
    return std::exp(-static_cast<double>(std::llabs(i - j)) / sigma);
}

DenseMatrix alibi_matrix(std::int64_t n, double sigma) {
    if (n < 1) throw std::invalid_argument("alibi_matrix: n must be at least 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("alibi_matrix: sigma must be positive");
    if (n > kDenseSizeCap) throw std::length_error("alibi_matrix: n exceeds dense cap");

    // One exp per distance; entries depend on |i-j| only.
    std::vector<double> decay(static_cast<std::size_t>(n));
    for (std::int64_t t = 0; t < n; ++t)
        decay[static_cast<std::size_t>(t)] = std::exp(-static_cast<double>(t) / sigma);

    DenseMatrix m(n, n);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j)
            m(i, j) = decay[static_cast<std::size_t>(std::llabs(i - j))];
    return m;
}

double alibi_spectral_bound(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("alibi_spectral_bound: sigma must be positive");
    // Row-sum route: 1 + 2*sum_{t>=1} e^{-t/sigma} = (e^{1/sigma}+1)/(e^{1/sigma}-1).
    const double em1 = std::expm1(1.0 / sigma);
    const double row_sum_form = (em1 + 2.0) / em1;
    // DTFT route: sup of the transform of e^{-|z|/sigma} is (1+phi)/(1-phi).
    const double phi = std::exp(-1.0 / sigma);
    const double dtft_form = (1.0 + phi) / (-std::expm1(-1.0 / sigma));
    if (std::abs(row_sum_form - dtft_form) > 1e-12 * row_sum_form)
        throw std::logic_error("alibi_spectral_bound: row-sum and DTFT forms disagree");
    return row_sum_form;
}

double psi_sigma(double sigma) { return 1.0 + sigma + alibi_spectral_bound(sigma); }

}  // namespace plsh
