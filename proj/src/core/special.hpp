#pragma once
#include <complex>

namespace deconv::special {

// Principal-branch log Gamma for Re(z) > 0 (Lanczos, g = 7).  Accuracy is
// ~1e-13 relative on the strip Re(z) = 1/2 used by the log-chi-squared
// characteristic function.
std::complex<double> log_gamma(std::complex<double> z);

// Standard normal CDF.
double normal_cdf(double x);

} // namespace deconv::special
