#include "core/special.hpp"

#include <cmath>

namespace deconv::special {

std::complex<double> log_gamma(std::complex<double> z) {
    static const double g = 7.0;
    static const double coef[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    // Shift into the region where the Lanczos series converges well.
    if (z.real() < 0.5) {
        // log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
        const std::complex<double> pi(3.14159265358979323846, 0.0);
        return std::log(pi / std::sin(pi * z)) - log_gamma(1.0 - z);
    }
    z -= 1.0;
    std::complex<double> x = coef[0];
    for (int i = 1; i < 9; ++i) x += coef[i] / (z + static_cast<double>(i));
    const std::complex<double> t = z + g + 0.5;
    const double half_log_2pi = 0.91893853320467274178; // log(2*pi)/2
    return half_log_2pi + (z + 0.5) * std::log(t) - t + std::log(x);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

} // namespace deconv::special
