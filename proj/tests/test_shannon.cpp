#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "core/errors.hpp"
#include "core/shannon.hpp"
#include "support/oracles.hpp"

using namespace deconv;
using oracle::kPi;

TEST_CASE("sinc basics") {
    CHECK(shannon::sinc(0.0) == 1.0);
    CHECK(std::abs(shannon::sinc(kPi)) < 1e-15);
    CHECK(shannon::sinc(0.5) == doctest::Approx(std::sin(0.5) / 0.5).epsilon(1e-15));
    // Series branch agrees with the direct ratio just above the switch point.
    const double u = 2e-4;
    CHECK(shannon::sinc(u / 2.0) == doctest::Approx(std::sin(u / 2.0) / (u / 2.0)).epsilon(1e-14));
    CHECK(shannon::sinc(-3.7) == shannon::sinc(3.7));
}

TEST_CASE("phi interpolation values") {
    // phi_{m,j}((j+k)/m) = sqrt(m) 1{k=0} over the sampling lattice.
    for (int m : {1, 2, 5}) {
        for (long long j : {-3LL, 0LL, 4LL}) {
            for (long long k = -3; k <= 3; ++k) {
                const double x = static_cast<double>(j + k) / m;
                const double want = (k == 0) ? std::sqrt(static_cast<double>(m)) : 0.0;
                CHECK(shannon::phi(m, j, x) == doctest::Approx(want).epsilon(1e-12).scale(1.0));
            }
        }
    }
    CHECK(shannon::phi(2, 3, 0.8) ==
          doctest::Approx(std::sqrt(2.0) * std::sin(kPi * (2 * 0.8 - 3)) / (kPi * (2 * 0.8 - 3)))
              .epsilon(1e-13));
}

TEST_CASE("phi_fourier support and values") {
    const int m = 3;
    const long long j = 2;
    CHECK(shannon::phi_fourier(m, j, kPi * m + 1e-9) == std::complex<double>(0.0, 0.0));
    CHECK(shannon::phi_fourier(m, j, -kPi * m - 1e-9) == std::complex<double>(0.0, 0.0));
    // Boundary belongs to the band.
    CHECK(std::abs(shannon::phi_fourier(m, j, kPi * m)) ==
          doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    const double x = 1.7;
    const auto v = shannon::phi_fourier(m, j, x);
    CHECK(std::abs(v - std::polar(1.0 / std::sqrt(3.0), j * x / m)) < 1e-15);
}

TEST_CASE("phi_fourier inverts back to phi") {
    // phi(t) = (1/2pi) integral phi*(x) e^{-ixt} dx, checked by blunt Simpson.
    for (int m : {1, 3}) {
        for (long long j : {0LL, 2LL, -5LL}) {
            for (double t : {0.0, 0.3, -1.2}) {
                const auto val = oracle::simpson(
                    [&](double x) {
                        return shannon::phi_fourier(m, j, x) * std::polar(1.0, -x * t);
                    },
                    -kPi * m, kPi * m, 40000);
                const double got = (val / (2.0 * kPi)).real();
                CHECK(got == doctest::Approx(shannon::phi(m, j, t)).epsilon(1e-9).scale(1.0));
                CHECK(std::abs((val / (2.0 * kPi)).imag()) < 1e-10);
            }
        }
    }
}

TEST_CASE("orthonormality through the Fourier side") {
    const int m = 2;
    for (long long j = -2; j <= 2; ++j) {
        for (long long jp = -2; jp <= 2; ++jp) {
            const auto val = oracle::simpson(
                [&](double x) {
                    return shannon::phi_fourier(m, j, x) * std::conj(shannon::phi_fourier(m, jp, x));
                },
                -kPi * m, kPi * m, 20000);
            const double want = (j == jp) ? 1.0 : 0.0;
            CHECK(std::abs(val / (2.0 * kPi) - want) < 1e-10);
        }
    }
}

TEST_CASE("sum of squared basis functions approaches m") {
    std::mt19937_64 rng(20240815);
    std::uniform_real_distribution<double> ux(-4.0, 4.0);
    for (int m : {1, 2, 4}) {
        for (int trial = 0; trial < 10; ++trial) {
            const double x = ux(rng);
            const auto s = shannon::sum_phi_squared(m, x, 4000);
            CHECK(s.tail_bound == doctest::Approx(2.0 * m / (kPi * kPi * 4000.0)).epsilon(1e-14));
            CHECK(std::abs(s.value - m) <= s.tail_bound);
            // Brute-force partial sum agrees.
            double brute = 0.0;
            for (long long j = -50; j <= 50; ++j) {
                const double p = shannon::phi(m, j, x);
                brute += p * p;
            }
            CHECK(shannon::sum_phi_squared(m, x, 50).value ==
                  doctest::Approx(brute).epsilon(1e-12));
        }
    }
}

TEST_CASE("project_l2 recovers the standard normal leading coefficient") {
    // a_{1,0} = (1/2pi) integral_{-pi}^{pi} e^{-x^2/2} dx = (2 Phi(pi) - 1)/sqrt(2 pi).
    auto cf = [](double x) { return std::complex<double>(std::exp(-x * x / 2.0), 0.0); };
    const auto table = shannon::project_l2(cf, 1, 3);
    const double want = (2.0 * oracle::normal_cdf(kPi) - 1.0) / std::sqrt(2.0 * kPi);
    CHECK(table.at(0).real() == doctest::Approx(want).epsilon(1e-9));
    CHECK(std::abs(table.at(0).imag()) < 1e-12);
    // Symmetric density: coefficients are real and even in j.
    for (long long j = 1; j <= 3; ++j) {
        CHECK(std::abs(table.at(j).imag()) < 1e-10);
        CHECK(table.at(j).real() == doctest::Approx(table.at(-j).real()).epsilon(1e-10));
    }
    // Cross-check a nonzero j against blunt Simpson of the same integrand.
    const auto direct = oracle::simpson(
        [&](double x) { return std::polar(1.0, -2.0 * x) * cf(x); }, -kPi, kPi, 40000);
    CHECK(table.at(2).real() == doctest::Approx((direct / (2.0 * kPi)).real()).epsilon(1e-9));
}

TEST_CASE("project_l2 matches time-domain inner products") {
    // Shifted gaussian keeps the coefficients complex-free but j-asymmetric.
    const double mu = 0.7;
    auto cf = [mu](double x) { return std::polar(std::exp(-x * x / 2.0), mu * x); };
    auto density = [mu](double t) {
        return std::exp(-(t - mu) * (t - mu) / 2.0) / std::sqrt(2.0 * kPi);
    };
    const int m = 2;
    const auto table = shannon::project_l2(cf, m, 4);
    for (long long j : {-3LL, 0LL, 1LL, 4LL}) {
        const double want = oracle::simpson(
            [&](double t) { return density(t) * shannon::phi(m, j, t); }, -30.0, 30.0, 300000);
        CHECK(table.at(j).real() == doctest::Approx(want).epsilon(2e-6).scale(1.0));
        CHECK(std::abs(table.at(j).imag()) < 1e-9);
    }
}

TEST_CASE("project_l2 wide-table fast path agrees with the adaptive path") {
    auto cf = [](double x) { return std::polar(std::exp(-x * x / 2.0), 0.4 * x); };
    const auto wide = shannon::project_l2(cf, 1, 96);  // tabulated Filon
    const auto narrow = shannon::project_l2(cf, 1, 64); // per-period adaptive
    for (long long j = -64; j <= 64; ++j)
        CHECK(std::abs(wide.at(j) - narrow.at(j)) < 1e-9 + 1e-8 * std::abs(narrow.at(j)));
}

TEST_CASE("project_l2 rejects bad arguments") {
    auto cf = [](double) { return std::complex<double>(1.0, 0.0); };
    CHECK_THROWS_AS(shannon::project_l2(cf, 0, 3), ConfigError);
    CHECK_THROWS_AS(shannon::project_l2(cf, 1, -1), ConfigError);
}
