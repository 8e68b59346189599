#include "core/shannon.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace deconv::shannon {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double sinc(double u) {
    if (std::abs(u) < 1e-4) {
        const double u2 = u * u;
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
    }
    return std::sin(u) / u;
}

double phi(int m, long long j, double x) {
    if (m < 1) throw ConfigError("phi: resolution index m must be >= 1");
    const double u = kPi * (static_cast<double>(m) * x - static_cast<double>(j));
    return std::sqrt(static_cast<double>(m)) * sinc(u);
}

std::complex<double> phi_fourier(int m, long long j, double x) {
    if (m < 1) throw ConfigError("phi_fourier: resolution index m must be >= 1");
    if (std::abs(x) > kPi * m) return {0.0, 0.0};
    const double arg = static_cast<double>(j) * x / static_cast<double>(m);
    return std::polar(1.0 / std::sqrt(static_cast<double>(m)), arg);
}

SumPhiSquared sum_phi_squared(int m, double x, long long j_max) {
    if (m < 1) throw ConfigError("sum_phi_squared: resolution index m must be >= 1");
    if (j_max < 0) throw ConfigError("sum_phi_squared: j_max must be >= 0");
    double acc = 0.0;
    for (long long j = -j_max; j <= j_max; ++j) {
        const double v = phi(m, j, x);
        acc += v * v;
    }
    const double bound =
        j_max > 0 ? 2.0 * m / (kPi * kPi * static_cast<double>(j_max)) : static_cast<double>(m);
    return {acc, bound};
}

namespace {

// Single coefficient by period-wise adaptive integration.  Splitting per
// oscillation period keeps adaptive refinement from seeing a full cycle
// cancel to zero at the coarsest level.
std::complex<double> coeff_adaptive(const std::function<std::complex<double>(double)>& f_fourier,
                                    int m, long long j, double half,
                                    const quad::QuadratureSpec& spec) {
    auto integrand = [&f_fourier, j, m](double x) {
        const double arg = -static_cast<double>(j) * x / static_cast<double>(m);
        return std::polar(1.0, arg) * f_fourier(x);
    };
    const long long periods = std::max<long long>(1, std::llabs(j));
    std::complex<double> acc(0.0, 0.0);
    quad::QuadratureSpec piece = spec;
    piece.rel_tol = 0.1 * spec.rel_tol;
    piece.abs_tol = 0.1 * spec.abs_tol / static_cast<double>(periods);
    for (long long p = 0; p < periods; ++p) {
        const double a =
            -half + 2.0 * half * static_cast<double>(p) / static_cast<double>(periods);
        const double b =
            -half + 2.0 * half * static_cast<double>(p + 1) / static_cast<double>(periods);
        acc += quad::adaptive_simpson_complex(integrand, a, b, piece);
    }
    return acc;
}

} // namespace

CoeffTable project_l2(const std::function<std::complex<double>(double)>& f_fourier, int m,
                      long long k_n, const quad::QuadratureSpec& spec) {
    if (m < 1) throw ConfigError("project_l2: resolution index m must be >= 1");
    if (k_n < 0) throw ConfigError("project_l2: k_n must be >= 0");
    const double half = kPi * m;
    CoeffTable table;
    table.m = m;
    table.k_n = k_n;
    table.coeff.resize(static_cast<std::size_t>(2 * k_n + 1));
    const double norm = 1.0 / (2.0 * kPi * std::sqrt(static_cast<double>(m)));

    if (k_n <= 64) {
        for (long long j = -k_n; j <= k_n; ++j)
            table.at(j) = norm * coeff_adaptive(f_fourier, m, j, half, spec);
        return table;
    }

    // Wide tables: tabulate f once and reuse Filon quadrature per j (the
    // oscillation is integrated exactly, so cost is O(N k) instead of the
    // O(k^2) period-wise splitting).  Probe coefficients are checked against
    // the adaptive path before the grid is trusted.
    const long long probes[] = {0, (k_n + 1) / 4, -(k_n + 1) / 4, (k_n + 1) / 2,
                                -(k_n + 1) / 2,   k_n,            -k_n};
    for (std::size_t N = 2048;; N <<= 1) {
        if (N > spec.max_nodes)
            throw NumericError("project_l2: tabulated projection did not converge within the "
                               "node budget");
        std::vector<std::complex<double>> values(N + 1);
        for (std::size_t l = 0; l <= N; ++l)
            values[l] = f_fourier(-half + 2.0 * half * static_cast<double>(l) /
                                             static_cast<double>(N));
        bool ok = true;
        for (long long j : probes) {
            const auto ref = norm * coeff_adaptive(f_fourier, m, j, half, spec);
            const auto got =
                norm * quad::filon_tabulated(values, -half, half,
                                             -static_cast<double>(j) / static_cast<double>(m));
            if (std::abs(got - ref) > 1e-9 + 1e-8 * std::abs(ref)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        for (long long j = -k_n; j <= k_n; ++j)
            table.at(j) = norm * quad::filon_tabulated(
                                     values, -half, half,
                                     -static_cast<double>(j) / static_cast<double>(m));
        return table;
    }
}

} // namespace deconv::shannon
