#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "core/quadrature.hpp"

namespace deconv::target {

// Class membership: integral of |g*(x)|^2 (x^2+1)^s exp(2 b |x|^r) dx <= c1.
// r > 0 requires b > 0.
struct SmoothnessClass {
    double s = 0.0;
    double r = 0.0;
    double b = 0.0;
    double c1 = 1.0;
};

// Ground-truth simulation density with exact Fourier transform.
// cf uses the convention g*(x) = integral e^{ixt} g(t) dt, so cf(0) = 1 and
// cf is hermitian.  m2 is a strict upper bound on integral x^2 g^2(x) dx.
struct TargetDensity {
    std::string name;
    std::function<double(double)> density;
    std::function<std::complex<double>(double)> cf;
    SmoothnessClass smoothness;
    double m2 = 0.0;
    double l2_norm_sq = 0.0; // ||g||^2
    std::function<double(std::mt19937_64&)> sampler; // empty when not samplable
    // Closed-form tail (1/2pi) integral_{|x| > pi m} |g*|^2 where one exists;
    // empty means bias_tail falls back to ||g||^2 minus the band integral.
    std::function<double(int)> bias_tail_closed;
};

using Params = std::map<std::string, double>;

// Names: gaussian (mean, sigma), cauchy (scale), laplace (scale),
// mixture_gaussian (weight, mean1, sigma1, mean2, sigma2),
// uniform_smooth (half_width, smooth_sigma), uniform01.
// Unknown names and unknown parameter keys are configuration errors.
TargetDensity builtin_target(const std::string& name, const Params& params = {});

// (1/2pi) integral_{|x| > pi m} |g*(x)|^2 dx; nonincreasing in m; m = 0 gives
// ||g||^2 (empty projection).
double bias_tail(const TargetDensity& t, int m, const quad::QuadratureSpec& spec = {});

// Left side of the membership inequality, window quadrature plus a power-law
// tail extrapolation for slowly decaying integrands.  Construction sets c1
// 10% above this value (or above an exact closed form where one exists).
double membership_integral(const TargetDensity& t, const quad::QuadratureSpec& spec = {});

std::vector<double> sample(const TargetDensity& t, std::size_t n, std::uint64_t seed);

} // namespace deconv::target
