#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "plsh/alibi.hpp"
#include "plsh/mask_estimator.hpp"

using namespace plsh;

TEST_CASE("bias entries") {
    CHECK(alibi_entry(7, 7, 3.0) == 1.0);
    CHECK(alibi_entry(0, 8, 8.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(alibi_entry(3, 10, 5.0) == alibi_entry(10, 3, 5.0));
    CHECK_THROWS_AS(alibi_entry(0, 1, 0.0), std::invalid_argument);
}

TEST_CASE("bias matrix structure") {
    {
        const DenseMatrix m = alibi_matrix(1, 4.0);
        CHECK(m(0, 0) == 1.0);
    }
    {
        const DenseMatrix m = alibi_matrix(3, 1.0);
        CHECK(m(0, 0) == 1.0);
        CHECK(m(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
        CHECK(m(0, 2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
        CHECK(m(1, 1) == 1.0);
        CHECK(m(1, 0) == m(0, 1));
        CHECK(m(2, 0) == m(0, 2));
    }
    const DenseMatrix m = alibi_matrix(32, 8.0);
    for (std::int64_t i = 0; i < 32; ++i) {
        for (std::int64_t j = 0; j < 32; ++j) {
            CHECK(m(i, j) == alibi_entry(i, j, 8.0));
            CHECK(m(i, j) == m(j, i));
            if (i != j) {
                CHECK(m(i, j) > 0.0);
                CHECK(m(i, j) < 1.0);
            }
            // Toeplitz: entry depends only on i - j.
            if (i + 1 < 32 && j + 1 < 32) CHECK(m(i, j) == m(i + 1, j + 1));
        }
    }
}

TEST_CASE("spectral bound closed forms") {
    CHECK(alibi_spectral_bound(1.0) ==
          doctest::Approx((std::exp(1.0) + 1.0) / (std::exp(1.0) - 1.0)).epsilon(1e-13));
    CHECK(alibi_spectral_bound(1.0) == doctest::Approx(2.163953).epsilon(1e-6));
    CHECK(alibi_spectral_bound(8.0) == doctest::Approx(16.0207).epsilon(1e-4));
    // sigma -> 0+: the kernel collapses to the identity and the bound to 1
    // (already indistinguishable from 1 in double at sigma = 0.01).
    CHECK(alibi_spectral_bound(0.01) >= 1.0);
    CHECK(alibi_spectral_bound(0.01) <= 1.0 + 1e-12);
    CHECK(alibi_spectral_bound(0.1) > 1.0);
}

TEST_CASE("row sums never exceed the bound") {
    for (const double sigma : {0.5, 2.0, 8.0, 64.0}) {
        const std::int64_t n = 128;
        const DenseMatrix m = alibi_matrix(n, sigma);
        const double bound = alibi_spectral_bound(sigma);
        for (std::int64_t i = 0; i < n; ++i) {
            double row_sum = 0.0;
            for (std::int64_t j = 0; j < n; ++j) row_sum += m(i, j);
            CHECK(row_sum <= bound + 1e-12);
        }
    }
}

TEST_CASE("numeric spectral norm respects the certificate") {
    for (const double sigma : {2.0, 8.0, 32.0}) {
        for (const std::int64_t n : {16, 64, 128}) {
            const double norm = spectral_norm_symmetric(alibi_matrix(n, sigma));
            CHECK(norm <= alibi_spectral_bound(sigma) + 1e-6);
            CHECK(norm >= 1.0);  // unit diagonal alone forces this
        }
    }
}

TEST_CASE("psi closed form and range") {
    CHECK(psi_sigma(8.0) == doctest::Approx(25.0207).epsilon(1e-4));
    double prev = 0.0;
    for (double sigma = 2.0; sigma <= 256.0; sigma *= 2.0) {
        const double psi = psi_sigma(sigma);
        CHECK(psi > 2.0);
        CHECK(psi < 3.0 * sigma + 2.0);
        CHECK(psi > prev);  // monotone over the grid
        prev = psi;
    }
}

TEST_CASE("dense cap is enforced") {
    CHECK_THROWS_AS(alibi_matrix(kDenseSizeCap + 1, 8.0), std::length_error);
}
