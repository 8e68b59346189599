#include "core/targets.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/special.hpp"

namespace deconv::target {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;

double get_param(const Params& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

void check_keys(const Params& p, std::initializer_list<const char*> allowed,
                const std::string& name) {
    for (const auto& [key, value] : p) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&key](const char* a) { return key == a; }) == allowed.end())
            throw ConfigError("builtin_target(" + name + "): unknown parameter '" + key + "'");
    }
}

double require_positive(double v, const std::string& what) {
    if (!(v > 0.0)) throw ConfigError(what + " must be > 0");
    return v;
}

// Membership integrand (even in x), assembled in log space: |g*|^2 underflows
// long before the exponential weight overflows, and their direct product is
// 0 * inf.  Every builtin has b at most half the |g*|^2 decay rate, so a zero
// |g*| means a true value below e^{-700}; returning 0 is exact at tolerance.
double membership_value(const TargetDensity& t, double x) {
    const double a = std::abs(t.cf(x));
    if (a == 0.0) return 0.0;
    const auto& s = t.smoothness;
    double lv = 2.0 * std::log(a) + s.s * std::log1p(x * x);
    if (s.r > 0.0) lv += 2.0 * s.b * std::pow(std::abs(x), s.r);
    return std::exp(lv);
}

// integral x^2 g^2 over the real line by quadrature (fast-decaying builtins only).
double m2_quadrature(const std::function<double(double)>& density,
                     const quad::QuadratureSpec& spec) {
    return quad::integrate_real_line(
        [&density](double x) {
            const double g = density(x);
            return x * x * g * g;
        },
        spec);
}

double l2_quadrature(const std::function<double(double)>& density,
                     const quad::QuadratureSpec& spec) {
    return quad::integrate_real_line(
        [&density](double x) {
            const double g = density(x);
            return g * g;
        },
        spec);
}

} // namespace

double membership_integral(const TargetDensity& t, const quad::QuadratureSpec& spec) {
    const double X = 2048.0;
    quad::QuadratureSpec windowed = spec;
    windowed.abs_tol = std::max(windowed.abs_tol, 1e-10);
    const double window =
        2.0 * quad::adaptive_simpson([&t](double x) { return membership_value(t, x); }, 0.0, X,
                                     windowed);
    // Oscillation-robust envelope at X and 2X: max over a multiplicative probe band.
    auto envelope = [&t](double x0) {
        double e = 0.0;
        for (int j = 0; j < 16; ++j)
            e = std::max(e, membership_value(t, x0 * (1.0 + j / 16.0)));
        return e;
    };
    const double e1 = envelope(X / 2.0);
    const double e2 = envelope(X);
    if (e2 <= 1e-14 * std::max(window, 1.0)) return window;
    if (!(e1 > e2))
        throw NumericError("membership_integral: integrand tail is not decaying at |x| = " +
                           std::to_string(X));
    const double p = std::log(e1 / e2) / std::log(2.0);
    if (p <= 1.05)
        throw NumericError("membership_integral: tail decay exponent " + std::to_string(p) +
                           " too close to divergence");
    // integral_X^inf c x^{-p} dx with c matched at X (envelope overshoots the
    // mean of an oscillating integrand by at most its peak factor; acceptable
    // inside the 10% c1 headroom).
    const double tail = e2 * X / (p - 1.0);
    return window + 2.0 * tail;
}

TargetDensity builtin_target(const std::string& name, const Params& params) {
    TargetDensity t;
    t.name = name;
    const quad::QuadratureSpec spec;
    if (name == "gaussian") {
        check_keys(params, {"mean", "sigma"}, name);
        const double mean = get_param(params, "mean", 0.0);
        const double sigma = require_positive(get_param(params, "sigma", 1.0),
                                              "builtin_target(gaussian): sigma");
        t.density = [mean, sigma](double x) {
            const double u = (x - mean) / sigma;
            return std::exp(-u * u / 2.0) / (sigma * std::sqrt(2.0 * kPi));
        };
        t.cf = [mean, sigma](double x) {
            return std::polar(std::exp(-sigma * sigma * x * x / 2.0), mean * x);
        };
        t.smoothness = {0.0, 2.0, sigma * sigma / 4.0, 1.1 * std::sqrt(2.0 * kPi) / sigma};
        t.m2 = 1.1 * (sigma / (4.0 * kSqrtPi) + mean * mean / (2.0 * sigma * kSqrtPi));
        t.l2_norm_sq = 1.0 / (2.0 * sigma * kSqrtPi);
        t.sampler = [mean, sigma](std::mt19937_64& g) {
            std::normal_distribution<double> d(mean, sigma);
            return d(g);
        };
        t.bias_tail_closed = [sigma](int m) {
            return std::erfc(sigma * kPi * m) / (2.0 * sigma * kSqrtPi);
        };
    } else if (name == "cauchy") {
        check_keys(params, {"scale"}, name);
        const double b = require_positive(get_param(params, "scale", 1.0),
                                          "builtin_target(cauchy): scale");
        t.density = [b](double x) { return b / (kPi * (x * x + b * b)); };
        t.cf = [b](double x) { return std::complex<double>(std::exp(-b * std::abs(x)), 0.0); };
        t.smoothness = {0.0, 1.0, b / 2.0, 1.1 * 2.0 / b};
        t.m2 = 1.1 * b / (2.0 * kPi);
        t.l2_norm_sq = 1.0 / (2.0 * kPi * b);
        t.sampler = [b](std::mt19937_64& g) {
            std::cauchy_distribution<double> d(0.0, b);
            return d(g);
        };
        t.bias_tail_closed = [b](int m) { return std::exp(-2.0 * b * kPi * m) / (2.0 * kPi * b); };
    } else if (name == "laplace") {
        check_keys(params, {"scale"}, name);
        const double b = require_positive(get_param(params, "scale", 1.0),
                                          "builtin_target(laplace): scale");
        t.density = [b](double x) { return std::exp(-std::abs(x) / b) / (2.0 * b); };
        t.cf = [b](double x) { return std::complex<double>(1.0 / (1.0 + b * b * x * x), 0.0); };
        // g*(x) decays as x^{-2}; Sobolev index just below 3/2.
        t.smoothness = {1.4, 0.0, 0.0, 0.0};
        t.smoothness.c1 = 1.1 * membership_integral(t, spec);
        t.m2 = 1.1 * b / 8.0;
        t.l2_norm_sq = 1.0 / (4.0 * b);
        t.sampler = [b](std::mt19937_64& g) {
            std::exponential_distribution<double> d(1.0);
            return b * (d(g) - d(g));
        };
        t.bias_tail_closed = [b](int m) {
            const double u = b * kPi * m;
            return (kPi / 2.0 - std::atan(u) - u / (1.0 + u * u)) / (2.0 * kPi * b);
        };
    } else if (name == "mixture_gaussian") {
        check_keys(params, {"weight", "mean1", "sigma1", "mean2", "sigma2"}, name);
        const double w = get_param(params, "weight", 0.5);
        if (!(w > 0.0) || !(w < 1.0))
            throw ConfigError("builtin_target(mixture_gaussian): weight must be in (0, 1)");
        const double m1 = get_param(params, "mean1", -1.5);
        const double s1 = require_positive(get_param(params, "sigma1", 0.7),
                                           "builtin_target(mixture_gaussian): sigma1");
        const double m2p = get_param(params, "mean2", 1.5);
        const double s2 = require_positive(get_param(params, "sigma2", 0.7),
                                           "builtin_target(mixture_gaussian): sigma2");
        t.density = [w, m1, s1, m2p, s2](double x) {
            const double u1 = (x - m1) / s1;
            const double u2 = (x - m2p) / s2;
            return w * std::exp(-u1 * u1 / 2.0) / (s1 * std::sqrt(2.0 * kPi)) +
                   (1.0 - w) * std::exp(-u2 * u2 / 2.0) / (s2 * std::sqrt(2.0 * kPi));
        };
        t.cf = [w, m1, s1, m2p, s2](double x) {
            return w * std::polar(std::exp(-s1 * s1 * x * x / 2.0), m1 * x) +
                   (1.0 - w) * std::polar(std::exp(-s2 * s2 * x * x / 2.0), m2p * x);
        };
        const double smin = std::min(s1, s2);
        t.smoothness = {0.0, 2.0, smin * smin / 4.0, 0.0};
        t.smoothness.c1 = 1.1 * membership_integral(t, spec);
        t.m2 = 1.1 * m2_quadrature(t.density, spec);
        t.l2_norm_sq = l2_quadrature(t.density, spec);
        t.sampler = [w, m1, s1, m2p, s2](std::mt19937_64& g) {
            std::bernoulli_distribution pick(w);
            std::normal_distribution<double> d1(m1, s1), d2(m2p, s2);
            return pick(g) ? d1(g) : d2(g);
        };
    } else if (name == "uniform_smooth") {
        check_keys(params, {"half_width", "smooth_sigma"}, name);
        const double a = require_positive(get_param(params, "half_width", 1.0),
                                          "builtin_target(uniform_smooth): half_width");
        const double h = require_positive(get_param(params, "smooth_sigma", 0.5),
                                          "builtin_target(uniform_smooth): smooth_sigma");
        // Uniform[-a, a] convolved with N(0, h^2).
        t.density = [a, h](double x) {
            return (special::normal_cdf((x + a) / h) - special::normal_cdf((x - a) / h)) /
                   (2.0 * a);
        };
        t.cf = [a, h](double x) {
            const double u = a * x;
            const double s = std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
            return std::complex<double>(s * std::exp(-h * h * x * x / 2.0), 0.0);
        };
        t.smoothness = {0.0, 2.0, h * h / 4.0, 0.0};
        t.smoothness.c1 = 1.1 * membership_integral(t, spec);
        t.m2 = 1.1 * m2_quadrature(t.density, spec);
        t.l2_norm_sq = l2_quadrature(t.density, spec);
        t.sampler = [a, h](std::mt19937_64& g) {
            std::uniform_real_distribution<double> u(-a, a);
            std::normal_distribution<double> d(0.0, h);
            return u(g) + d(g);
        };
    } else if (name == "uniform01") {
        check_keys(params, {}, name);
        t.density = [](double x) { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; };
        t.cf = [](double x) {
            const double u = x / 2.0;
            const double s = std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
            return std::polar(s, u);
        };
        // s = 0 keeps the membership integral at the Parseval value 2 pi.
        t.smoothness = {0.0, 0.0, 0.0, 1.1 * 2.0 * kPi};
        t.m2 = 1.1 / 3.0;
        t.l2_norm_sq = 1.0;
        t.sampler = [](std::mt19937_64& g) {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            return u(g);
        };
    } else {
        throw ConfigError("builtin_target: unknown name '" + name +
                          "' (expected gaussian, cauchy, laplace, mixture_gaussian, "
                          "uniform_smooth, uniform01)");
    }
    if (t.smoothness.r > 0.0 && !(t.smoothness.b > 0.0))
        throw ConfigError("builtin_target: r > 0 requires b > 0");
    return t;
}

double bias_tail(const TargetDensity& t, int m, const quad::QuadratureSpec& spec) {
    if (m < 0) throw ConfigError("bias_tail: m must be >= 0");
    if (m == 0) return t.l2_norm_sq;
    if (t.bias_tail_closed) return t.bias_tail_closed(m);
    const double T = kPi * m;
    const double band = quad::adaptive_simpson(
        [&t](double x) {
            const double a = std::abs(t.cf(x));
            return a * a;
        },
        -T, T, spec);
    return std::max(0.0, t.l2_norm_sq - band / (2.0 * kPi));
}

std::vector<double> sample(const TargetDensity& t, std::size_t n, std::uint64_t seed) {
    if (!t.sampler) throw ConfigError("sample: target '" + t.name + "' has no sampler");
    std::mt19937_64 gen(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = t.sampler(gen);
    return out;
}

} // namespace deconv::target
