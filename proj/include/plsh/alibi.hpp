#pragma once

#include <cstdint>

#include "plsh/matrix.hpp"

namespace plsh {

// exp(-|i-j|/sigma), the distance-decay bias between positions i and j.
double alibi_entry(std::int64_t i, std::int64_t j, double sigma);

// Symmetric Toeplitz matrix with unit diagonal and entry exp(-|i-j|/sigma).
DenseMatrix alibi_matrix(std::int64_t n, double sigma);

/**
 * Closed-form upper bound on the spectral norm of the bias matrix, valid for
 * every context length: (e^{1/sigma}+1)/(e^{1/sigma}-1).
 *
 * Two algebraically equal routes are evaluated: the row-sum geometric series
 * and the supremum (1+phi)/(1-phi) of the discrete-time Fourier transform of
 * phi^{|z|} with phi = e^{-1/sigma}. They are checked against each other to
 * 12 decimal digits on every call.
 */
double alibi_spectral_bound(double sigma);

// 1 + sigma + alibi_spectral_bound(sigma); the scale factor that drives the
// spectral concentration rate of the mask estimator.
double psi_sigma(double sigma);

}  // namespace plsh
