#pragma once
#include <complex>
#include <functional>
#include <vector>

#include "core/quadrature.hpp"

namespace deconv::shannon {

// sin(u)/u with a series branch below |u| = 1e-4 to avoid cancellation.
double sinc(double u);

// phi_{m,j}(x) = sqrt(m) * sin(pi(mx - j)) / (pi(mx - j))
double phi(int m, long long j, double x);

// Fourier transform under u*(x) = integral e^{itx} u(t) dt:
// phi*_{m,j}(x) = m^{-1/2} e^{i j x / m} on |x| <= pi m (boundary included), 0 outside.
std::complex<double> phi_fourier(int m, long long j, double x);

struct SumPhiSquared {
    double value;      // sum_{|j| <= j_max} phi_{m,j}(x)^2, converges to m
    double tail_bound; // 2m / (pi^2 j_max)
};
SumPhiSquared sum_phi_squared(int m, double x, long long j_max);

struct CoeffTable {
    int m = 1;
    long long k_n = 0;
    std::vector<std::complex<double>> coeff; // index j + k_n, |j| <= k_n

    std::complex<double> at(long long j) const { return coeff[static_cast<std::size_t>(j + k_n)]; }
    std::complex<double>& at(long long j) { return coeff[static_cast<std::size_t>(j + k_n)]; }
};

// a_{m,j} = <phi_{m,j}, g> = (1/2pi) integral_{-pi m}^{pi m} conj(phi*_{m,j}(x)) f_fourier(x) dx
// for |j| <= k_n, where f_fourier is the transform of the function being projected.
// Integration is done per oscillation period, so large |j| stays accurate.
CoeffTable project_l2(const std::function<std::complex<double>(double)>& f_fourier, int m,
                      long long k_n, const quad::QuadratureSpec& spec = {});

} // namespace deconv::shannon
