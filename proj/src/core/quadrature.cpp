#include "core/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace deconv::quad {

namespace {

template <typename T>
T simpson(double a, double b, T fa, T fm, T fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename T>
T adsimp_rec(const std::function<T(double)>& f, double a, double b, T fa, T fm, T fb, T whole,
             double tol, int depth, int force) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const T flm = f(lm);
    const T frm = f(rm);
    const T left = simpson(a, m, fa, flm, fm);
    const T right = simpson(m, b, fm, frm, fb);
    const T delta = left + right - whole;
    if (force <= 0 && std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0)
        throw NumericError("adaptive quadrature: depth budget exhausted near x = " + std::to_string(m));
    return adsimp_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, force - 1) +
           adsimp_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, force - 1);
}

template <typename T>
T adsimp(const std::function<T(double)>& f, double a, double b, const QuadratureSpec& spec) {
    if (!(a < b)) return T{};
    const T fa = f(a);
    const double m = 0.5 * (a + b);
    const T fm = f(m);
    const T fb = f(b);
    const T whole = simpson(a, b, fa, fm, fb);
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(whole));
    return adsimp_rec(f, a, b, fa, fm, fb, whole, tol, spec.max_depth, spec.min_depth);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureSpec& spec) {
    return adsimp<double>(f, a, b, spec);
}

std::complex<double> adaptive_simpson_complex(const std::function<std::complex<double>(double)>& f,
                                              double a, double b, const QuadratureSpec& spec) {
    return adsimp<std::complex<double>>(f, a, b, spec);
}

double integrate_real_line(const std::function<double(double)>& f, const QuadratureSpec& spec) {
    const double edge = 1e-12;
    auto g = [&f](double u) {
        const double c = std::cos(u);
        const double x = std::tan(u);
        return f(x) / (c * c);
    };
    const double h = std::asin(1.0); // pi/2
    return adaptive_simpson(g, -h + edge, h - edge, spec);
}

FilonMoments filon_moments(double kappa) {
    const double k = kappa;
    if (std::abs(k) < 1.0) {
        // Series in kappa^2; direct formulas cancel catastrophically near 0.
        const double k2 = k * k;
        double m0 = 0.0, m1 = 0.0, m2 = 0.0;
        double pw = 1.0;       // kappa^{2j}
        double fact = 1.0;     // (2j+1)!
        for (int j = 0; j <= 8; ++j) {
            if (j > 0) {
                pw *= -k2;
                fact *= (2.0 * j) * (2.0 * j + 1.0);
            }
            m0 += pw / fact;
            if (j >= 1) {
                // terms of sum_{j>=1} (-1)^{j+1} 2j k^{2j-1} / (2j+1)!  and
                //          sum_{j>=1} (-1)^{j-1} 2j(2j-1) k^{2j-2} / (2j+1)!
                const double sgn = (j % 2 == 1) ? 1.0 : -1.0;
                double kp1 = 1.0, kp2 = 1.0;
                for (int t = 0; t < 2 * j - 1; ++t) kp1 *= k;
                for (int t = 0; t < 2 * j - 2; ++t) kp2 *= k;
                m1 += sgn * 2.0 * j * kp1 / fact;
                m2 += sgn * 2.0 * j * (2.0 * j - 1.0) * kp2 / fact;
            }
        }
        return {std::complex<double>(2.0 * m0, 0.0), std::complex<double>(0.0, 2.0 * m1),
                std::complex<double>(2.0 * m2, 0.0)};
    }
    const double s = std::sin(k), c = std::cos(k);
    const double m0 = 2.0 * s / k;
    const double m1 = 2.0 * (s - k * c) / (k * k);
    const double m2 = 2.0 * ((k * k - 2.0) * s + 2.0 * k * c) / (k * k * k);
    return {std::complex<double>(m0, 0.0), std::complex<double>(0.0, m1),
            std::complex<double>(m2, 0.0)};
}

std::complex<double> filon_tabulated(const std::vector<std::complex<double>>& values,
                                     double a, double b, double theta) {
    const std::size_t n_nodes = values.size();
    if (n_nodes < 3 || n_nodes % 2 == 0)
        throw NumericError("filon_tabulated: node count must be odd and >= 3");
    const std::size_t n_panels = (n_nodes - 1) / 2;
    const double h = (b - a) / static_cast<double>(n_nodes - 1);
    const FilonMoments mo = filon_moments(theta * h);

    std::complex<double> acc(0.0, 0.0);
    const std::complex<double> step = std::polar(1.0, theta * 2.0 * h);
    std::complex<double> phase = std::polar(1.0, theta * (a + h));
    for (std::size_t p = 0; p < n_panels; ++p) {
        if (p > 0 && p % 1024 == 0) phase = std::polar(1.0, theta * (a + (2.0 * p + 1.0) * h));
        const std::complex<double> fm = values[2 * p];
        const std::complex<double> f0 = values[2 * p + 1];
        const std::complex<double> fp = values[2 * p + 2];
        const std::complex<double> odd = 0.5 * (fp - fm);
        const std::complex<double> curv = 0.5 * (fp - 2.0 * f0 + fm);
        acc += phase * (f0 * mo.m0 + odd * mo.m1 + curv * mo.m2);
        phase *= step;
    }
    return h * acc;
}

double log_integral_peaked(const std::function<double(double)>& log_f, double a, double b,
                           const QuadratureSpec& spec) {
    if (!(a < b)) return -std::numeric_limits<double>::infinity();
    const int probes = 128;
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= probes; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / probes;
        peak = std::max(peak, log_f(x));
    }
    if (!std::isfinite(peak))
        throw NumericError("log_integral_peaked: integrand peak not finite");
    auto shifted = [&log_f, peak](double x) { return std::exp(log_f(x) - peak); };
    const double i_val = adaptive_simpson(shifted, a, b, spec);
    if (!(i_val > 0.0))
        throw NumericError("log_integral_peaked: shifted integral not positive");
    return peak + std::log(i_val);
}

} // namespace deconv::quad
