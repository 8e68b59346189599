#pragma once
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "core/logval.hpp"

namespace deconv::quad {

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_depth = 48;
    // Refinements forced before an interval may be accepted; breaks the
    // resonance where an oscillatory integrand looks converged at depth 0.
    int min_depth = 6;
    std::size_t max_nodes = std::size_t(1) << 22;
};

// Adaptive Simpson on [a, b].  Throws NumericError when the depth budget is
// exhausted before the tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureSpec& spec = {});
std::complex<double> adaptive_simpson_complex(const std::function<std::complex<double>(double)>& f,
                                              double a, double b, const QuadratureSpec& spec = {});

// Integral over the whole real line via x = tan(u); requires f(x)*(1+x^2) to
// stay bounded as |x| -> inf.
double integrate_real_line(const std::function<double(double)>& f, const QuadratureSpec& spec = {});

// Moments of the oscillatory factor on the reference panel:
//   m_k = integral_{-1}^{1} t^k exp(i kappa t) dt, k = 0, 1, 2.
struct FilonMoments {
    std::complex<double> m0, m1, m2;
};
FilonMoments filon_moments(double kappa);

// integral_a^b f(x) exp(i theta x) dx with f tabulated on a uniform grid of
// values.size() = N + 1 nodes (N even).  The oscillatory factor is integrated
// exactly against a panel-wise quadratic fit of f, so accuracy depends only on
// how well the grid resolves f, not on theta.
std::complex<double> filon_tabulated(const std::vector<std::complex<double>>& values,
                                     double a, double b, double theta);

// log of integral_a^b exp(log_f(x)) dx for integrands whose peak magnitude can
// dwarf double range; the peak is located by probing and factored out.
double log_integral_peaked(const std::function<double(double)>& log_f, double a, double b,
                           const QuadratureSpec& spec = {});

} // namespace deconv::quad
