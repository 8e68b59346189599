#include "core/noise.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/special.hpp"

namespace deconv::noise {

namespace {

constexpr double kPi = 3.14159265358979323846;

double log_cosh(double y) {
    y = std::abs(y);
    return y - std::log(2.0) + std::log1p(std::exp(-2.0 * y));
}

void validate(const NoiseSmoothness& s, bool is_none) {
    if (s.gamma < 0.0 || s.mu < 0.0 || s.delta < 0.0)
        throw ConfigError("noise smoothness: gamma, mu, delta must be >= 0");
    if (s.delta > 0.0 && s.mu <= 0.0)
        throw ConfigError("noise smoothness: delta > 0 requires mu > 0");
    if (!(s.kappa0 > 0.0) || !(s.kappa0_prime > 0.0) || s.kappa0 > s.kappa0_prime)
        throw ConfigError("noise smoothness: need 0 < kappa0 <= kappa0_prime");
    if (!is_none && s.delta == 0.0 && !(s.gamma > 0.5))
        throw ConfigError("noise smoothness: delta = 0 requires gamma > 1/2 (square-integrable cf)");
}

double laplace_log_delta(double b, int m) {
    const double t = kPi * m;
    const double v = (t + (2.0 * b * b / 3.0) * t * t * t + (std::pow(b, 4) / 5.0) * std::pow(t, 5)) / kPi;
    return std::log(v);
}

// For ordinary-smooth noise the asymptotic Delta(m) ~ lambda1 Gamma(m) carries
// an extra 1/(2 gamma + 1) from the polynomial integral, so the tight envelope
// constant cannot also bracket Delta from below.  kappa0_prime is inflated to
// the smallest constant making the sandwich hold on the tested range m <= 50;
// as an upper envelope constant any inflation stays valid.
double laplace_kappa0_prime(double b) {
    const double tight = std::max(1.0, 1.0 / (b * b));
    double sup_ratio = 0.0;
    for (int m = 1; m <= 50; ++m) {
        const double t = kPi * m;
        const double log_gamma_m = 2.0 * std::log1p(t * t) + std::log(t);
        const double ratio = std::exp(log_gamma_m - laplace_log_delta(b, m) - std::log(2.0 * kPi));
        sup_ratio = std::max(sup_ratio, ratio);
    }
    return std::max(tight, std::sqrt(sup_ratio) * 1.01);
}

} // namespace

NoiseModel builtin_noise(const std::string& name, double scale) {
    NoiseModel model;
    model.name = name;
    model.scale = scale;
    if (name == "none") {
        model.kind = NoiseKind::None;
        model.is_none = true;
        model.scale = 1.0;
        model.smoothness = {0.0, 0.0, 0.0, 1.0, 1.0};
        model.cf = [](double) { return std::complex<double>(1.0, 0.0); };
        model.log_abs_cf = [](double) { return 0.0; };
        return model;
    }
    if (!(scale > 0.0)) throw ConfigError("builtin_noise: scale must be > 0 for '" + name + "'");

    if (name == "gaussian") {
        model.kind = NoiseKind::Gaussian;
        const double s2 = scale * scale;
        model.smoothness = {0.0, s2 / 2.0, 2.0, 1.0, 1.0};
        model.cf = [s2](double x) { return std::complex<double>(std::exp(-s2 * x * x / 2.0), 0.0); };
        model.log_abs_cf = [s2](double x) { return -s2 * x * x / 2.0; };
        model.density = [scale, s2](double x) {
            return std::exp(-x * x / (2.0 * s2)) / (scale * std::sqrt(2.0 * kPi));
        };
        model.density_l2_norm = 1.0 / std::sqrt(2.0 * scale * std::sqrt(kPi));
        model.sampler = [scale](std::mt19937_64& g) {
            std::normal_distribution<double> d(0.0, scale);
            return d(g);
        };
    } else if (name == "cauchy") {
        model.kind = NoiseKind::Cauchy;
        const double b = scale;
        model.smoothness = {0.0, b, 1.0, 1.0, 1.0};
        model.cf = [b](double x) { return std::complex<double>(std::exp(-b * std::abs(x)), 0.0); };
        model.log_abs_cf = [b](double x) { return -b * std::abs(x); };
        model.density = [b](double x) { return b / (kPi * (x * x + b * b)); };
        model.density_l2_norm = 1.0 / std::sqrt(2.0 * kPi * b);
        model.sampler = [b](std::mt19937_64& g) {
            std::cauchy_distribution<double> d(0.0, b);
            return d(g);
        };
    } else if (name == "laplace") {
        model.kind = NoiseKind::Laplace;
        const double b = scale;
        model.smoothness = {2.0, 0.0, 0.0, std::min(1.0, 1.0 / (b * b)), laplace_kappa0_prime(b)};
        model.cf = [b](double x) { return std::complex<double>(1.0 / (1.0 + b * b * x * x), 0.0); };
        model.log_abs_cf = [b](double x) { return -std::log1p(b * b * x * x); };
        model.density = [b](double x) { return std::exp(-std::abs(x) / b) / (2.0 * b); };
        model.density_l2_norm = 1.0 / (2.0 * std::sqrt(b));
        model.sampler = [b](std::mt19937_64& g) {
            std::exponential_distribution<double> d(1.0);
            return b * (d(g) - d(g));
        };
    } else if (name == "log_chi_squared") {
        model.kind = NoiseKind::LogChiSquared;
        model.scale = 1.0;
        // |cf(x)| = cosh(pi x)^{-1/2}: exactly e^{-pi|x|/2} <= |cf| <= sqrt(2) e^{-pi|x|/2}.
        model.smoothness = {0.0, kPi / 2.0, 1.0, 1.0, std::sqrt(2.0)};
        model.cf = [](double x) {
            const std::complex<double> z(0.5, x);
            const std::complex<double> lg = special::log_gamma(z);
            const std::complex<double> expo =
                std::complex<double>(0.0, x * std::log(2.0)) + lg -
                std::complex<double>(0.5 * std::log(kPi), 0.0);
            return std::exp(expo);
        };
        model.log_abs_cf = [](double x) { return -0.5 * log_cosh(kPi * x); };
        model.density = [](double u) {
            return std::exp(u / 2.0 - std::exp(u) / 2.0) / std::sqrt(2.0 * kPi);
        };
        model.density_l2_norm = 1.0 / std::sqrt(2.0 * kPi);
        model.sampler = [](std::mt19937_64& g) {
            std::normal_distribution<double> d(0.0, 1.0);
            double eta = d(g);
            while (eta == 0.0) eta = d(g);
            return std::log(eta * eta);
        };
    } else {
        throw ConfigError("builtin_noise: unknown name '" + name +
                          "' (expected gaussian, cauchy, laplace, log_chi_squared, none)");
    }
    validate(model.smoothness, model.is_none);
    return model;
}

LogValue delta_m(const NoiseModel& model, int m, const quad::QuadratureSpec& spec) {
    if (m < 1) throw ConfigError("delta_m: m must be >= 1");
    if (model.is_none) return LogValue::from_linear(static_cast<double>(m));
    return delta_m_quadrature(model, m, spec);
}

LogValue delta_m_quadrature(const NoiseModel& model, int m, const quad::QuadratureSpec& spec) {
    if (m < 1) throw ConfigError("delta_m_quadrature: m must be >= 1");
    const double t = kPi * m;
    auto log_f = [&model](double x) { return -2.0 * model.log_abs_cf(x); };
    const double log_half = quad::log_integral_peaked(log_f, 0.0, t, spec);
    return LogValue::from_log(log_half - std::log(kPi));
}

bool has_delta_closed_form(const NoiseModel& model) {
    return model.kind != NoiseKind::Gaussian;
}

LogValue delta_m_closed_form(const NoiseModel& model, int m) {
    if (m < 1) throw ConfigError("delta_m_closed_form: m must be >= 1");
    const double t = kPi * m;
    switch (model.kind) {
        case NoiseKind::None:
            return LogValue::from_linear(static_cast<double>(m));
        case NoiseKind::Laplace: {
            // (T + (2 b^2 / 3) T^3 + (b^4 / 5) T^5) / pi; never overflows for int m
            const double b = model.scale;
            const double v =
                (t + (2.0 * b * b / 3.0) * t * t * t + (std::pow(b, 4) / 5.0) * std::pow(t, 5)) /
                kPi;
            return LogValue::from_linear(v);
        }
        case NoiseKind::Cauchy: {
            // (e^{2bT} - 1) / (2 pi b)
            const double b = model.scale;
            return LogValue::from_log(2.0 * b * t + std::log1p(-std::exp(-2.0 * b * t)) -
                                      std::log(2.0 * kPi * b));
        }
        case NoiseKind::LogChiSquared:
            // sinh(pi^2 m) / pi^2
            return LogValue::from_log(kPi * t + std::log1p(-std::exp(-2.0 * kPi * t)) -
                                      std::log(2.0) - 2.0 * std::log(kPi));
        case NoiseKind::Gaussian:
            throw ConfigError("delta_m_closed_form: gaussian noise has no closed form");
    }
    throw ConfigError("delta_m_closed_form: unreachable");
}

LogValue gamma_m(const NoiseSmoothness& s, int m) {
    if (m < 1) throw ConfigError("gamma_m: m must be >= 1");
    const double t = kPi * m;
    const double lv = s.gamma * std::log1p(t * t) + (1.0 - s.delta) * std::log(t) +
                      2.0 * s.mu * std::pow(t, s.delta);
    return LogValue::from_log(lv);
}

double lambda1(const NoiseSmoothness& s, double kappa) {
    if (!(kappa > 0.0)) throw ConfigError("lambda1: kappa must be > 0");
    const double r = s.delta == 0.0 ? 1.0 : 2.0 * s.mu * s.delta;
    if (!(r > 0.0)) throw ConfigError("lambda1: R(mu, delta) must be > 0");
    return 1.0 / (kappa * kappa * kPi * r);
}

double lambda2(const NoiseModel& model, double kappa0) {
    const double l1 = lambda1(model.smoothness, kappa0);
    if (model.smoothness.delta > 1.0) return 2.0 * l1;
    if (std::isnan(model.density_l2_norm))
        throw ConfigError("lambda2: noise density L2 norm required when delta <= 1");
    return model.density_l2_norm / kappa0 * std::sqrt(2.0 * l1);
}

LogValue delta2_m(const NoiseModel& model,
                  const std::function<std::complex<double>(double)>& f_z_fourier, int m,
                  const quad::QuadratureSpec& spec) {
    if (m < 1) throw ConfigError("delta2_m: m must be >= 1");
    const double t = kPi * m;
    std::size_t n = std::max<std::size_t>(512, resolution_nodes(model, t));
    // round up to even
    if (n % 2 == 1) ++n;
    if ((n + 1) * (n + 1) > spec.max_nodes)
        throw NumericError("delta2_m: budget exceeded, requires " + std::to_string((n + 1) * (n + 1)) +
                           " nodes (max " + std::to_string(spec.max_nodes) + ")");
    const double h = 2.0 * t / static_cast<double>(n);

    std::vector<double> w(n + 1), log_inv(n + 1), x(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        x[i] = -t + h * static_cast<double>(i);
        w[i] = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        log_inv[i] = -2.0 * model.log_abs_cf(x[i]);
    }
    // First pass: peak of the log integrand over the tensor grid.
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> log_num((2 * n) + 1); // |f_Z^*(u)|^2 on the difference grid u = (i - j) h
    for (std::size_t k = 0; k < log_num.size(); ++k) {
        const double u = (static_cast<double>(k) - static_cast<double>(n)) * h;
        const double a = std::abs(f_z_fourier(u));
        log_num[k] = a > 0.0 ? 2.0 * std::log(a) : -std::numeric_limits<double>::infinity();
    }
    const auto diff_idx = [n](std::size_t i, std::size_t j) {
        return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) -
                                        static_cast<std::ptrdiff_t>(j) +
                                        static_cast<std::ptrdiff_t>(n));
    };
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= n; ++j) {
            const double l = log_num[diff_idx(i, j)] + log_inv[i] + log_inv[j];
            if (l > peak) peak = l;
        }
    if (!std::isfinite(peak)) return LogValue::from_linear(0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= n; ++j) {
            const double l = log_num[diff_idx(i, j)] + log_inv[i] + log_inv[j];
            if (std::isfinite(l)) acc += w[i] * w[j] * std::exp(l - peak);
        }
    const double log_val = peak + std::log(acc) + 2.0 * std::log(h / 3.0);
    return LogValue::from_log(log_val);
}

std::size_t resolution_nodes(const NoiseModel& model, double half_width) {
    const double t = half_width;
    if (!(t > 0.0)) return 64;
    double slope_max = 0.0;
    const int probes = 64;
    const double dh = t / 1024.0;
    for (int i = 1; i <= probes; ++i) {
        const double x = t * static_cast<double>(i) / probes;
        const double d = std::abs(model.log_abs_cf(std::min(x + dh, t)) - model.log_abs_cf(x - dh)) /
                         (2.0 * dh);
        slope_max = std::max(slope_max, 2.0 * d);
    }
    const double needed = 16.0 * t * slope_max;
    return 64 + static_cast<std::size_t>(std::ceil(needed));
}

std::vector<double> sample(const NoiseModel& model, std::size_t n, std::uint64_t seed) {
    std::vector<double> out(n, 0.0);
    if (model.is_none) return out;
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < n; ++i) out[i] = model.sampler(gen);
    return out;
}

} // namespace deconv::noise
