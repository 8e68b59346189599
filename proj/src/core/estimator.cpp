#include "core/estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace deconv::estimator {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_samples(const std::vector<double>& z) {
    if (z.empty()) throw ConfigError("sample vector is empty");
    for (double v : z)
        if (!std::isfinite(v)) throw ConfigError("samples must be finite");
}

double max_abs(const std::vector<double>& z) {
    double m = 0.0;
    for (double v : z) m = std::max(m, std::abs(v));
    return m;
}

// Psi(x_l) = (1/n) sum_i e^{i x_l Z_i} / f_eps*(x_l) on x_l = -T + l h,
// l = 0..N.  Per-sample phase recurrence with periodic refresh against drift.
std::vector<std::complex<double>> tabulate_psi(const std::vector<double>& z,
                                               const noise::NoiseModel& noise, double T,
                                               std::size_t N) {
    const double h = 2.0 * T / static_cast<double>(N);
    std::vector<std::complex<double>> acc(N + 1, {0.0, 0.0});
    for (double zi : z) {
        std::complex<double> p = std::polar(1.0, -T * zi);
        const std::complex<double> r = std::polar(1.0, h * zi);
        for (std::size_t l = 0; l <= N; ++l) {
            acc[l] += p;
            if ((l & 4095u) == 4095u)
                p = std::polar(1.0, (-T + h * static_cast<double>(l + 1)) * zi);
            else
                p *= r;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(z.size());
    for (std::size_t l = 0; l <= N; ++l) {
        const double x = -T + h * static_cast<double>(l);
        const std::complex<double> f = noise.cf(x);
        if (!(std::abs(f) > 1e-300))
            throw NumericError("fit_coefficients: noise cf vanishes at x = " + std::to_string(x));
        acc[l] = acc[l] * inv_n / f;
    }
    return acc;
}

std::vector<std::complex<double>> half_grid(const std::vector<std::complex<double>>& v) {
    std::vector<std::complex<double>> out((v.size() - 1) / 2 + 1);
    for (std::size_t l = 0; l < out.size(); ++l) out[l] = v[2 * l];
    return out;
}

} // namespace

std::complex<double> ProjectionEstimate::at(int j) const {
    return coeffs[static_cast<std::size_t>(j + k_n)];
}

double ProjectionEstimate::norm_sq() const {
    double s = 0.0;
    for (const auto& c : coeffs) s += std::norm(c);
    return s;
}

PenaltyVariant penalty_variant_from_name(const std::string& name) {
    if (name == "ordinary") return PenaltyVariant::Ordinary;
    if (name == "supersmooth") return PenaltyVariant::Supersmooth;
    if (name == "refined_beta") return PenaltyVariant::RefinedBeta;
    if (name == "refined_tau") return PenaltyVariant::RefinedTau;
    if (name == "no_noise") return PenaltyVariant::NoNoise;
    throw ConfigError("unknown penalty variant '" + name +
                      "' (expected ordinary, supersmooth, refined_beta, refined_tau, no_noise)");
}

std::string penalty_variant_name(PenaltyVariant v) {
    switch (v) {
        case PenaltyVariant::Ordinary: return "ordinary";
        case PenaltyVariant::Supersmooth: return "supersmooth";
        case PenaltyVariant::RefinedBeta: return "refined_beta";
        case PenaltyVariant::RefinedTau: return "refined_tau";
        case PenaltyVariant::NoNoise: return "no_noise";
    }
    throw ConfigError("penalty_variant_name: unreachable");
}

int k_n_for(KnPolicy policy, std::size_t n, int m, double max_abs_z, bool no_noise) {
    if (m < 1) throw ConfigError("k_n_for: m must be >= 1");
    if (policy == KnPolicy::Exact) {
        if (no_noise) {
            if (n > 46340) throw ConfigError("k_n_for: exact no-noise mode needs k_n = n^2, "
                                             "infeasible for n > 46340");
            return static_cast<int>(n * n);
        }
        if (n > static_cast<std::size_t>(std::numeric_limits<int>::max()))
            throw ConfigError("k_n_for: n too large for exact mode");
        return static_cast<int>(n);
    }
    const double k = std::ceil(static_cast<double>(m) * max_abs_z) + 64.0;
    if (k > static_cast<double>(std::numeric_limits<int>::max()))
        throw ConfigError("k_n_for: auto k_n overflows");
    return static_cast<int>(k);
}

std::complex<double> u_star_kernel(const noise::NoiseModel& noise, int m, int j, double z,
                                   const quad::QuadratureSpec& spec) {
    if (m < 1) throw ConfigError("u_star_kernel: m must be >= 1");
    if (noise.is_none) return {shannon::phi(m, j, z), 0.0};
    const double T = kPi * m;
    const double w = z - static_cast<double>(j) / m;
    const double omega = T * std::abs(w);
    // ~4 oscillation cycles per chunk keeps the forced refinement depth honest.
    const int chunks = std::max(1, static_cast<int>(std::ceil(m * std::abs(w) / 8.0)));
    quad::QuadratureSpec piece = spec;
    piece.abs_tol = spec.abs_tol / chunks;
    std::complex<double> total{0.0, 0.0};
    try {
        for (int c = 0; c < chunks; ++c) {
            const double a = -T + 2.0 * T * c / chunks;
            const double b = -T + 2.0 * T * (c + 1) / chunks;
            total += quad::adaptive_simpson_complex(
                [&noise, w](double x) { return std::polar(1.0, x * w) / noise.cf(x); }, a, b,
                piece);
        }
    } catch (const NumericError& e) {
        throw NumericError("u_star_kernel: quadrature failed at omega = " +
                           std::to_string(omega) + ": " + e.what());
    }
    return total / (2.0 * kPi * std::sqrt(static_cast<double>(m)));
}

ProjectionEstimate fit_coefficients(const std::vector<double>& z, const noise::NoiseModel& noise,
                                    int m, int k_n, const quad::QuadratureSpec& spec) {
    if (m < 1) throw ConfigError("fit_coefficients: m must be >= 1");
    if (k_n < 1) throw ConfigError("fit_coefficients: k_n must be >= 1");
    validate_samples(z);
    const double T = kPi * m;
    const double mz = max_abs(z);

    // The oscillatory factor is integrated exactly, so N only has to resolve
    // Psi itself: frequency content max|Z|, plus the 1/f_eps* profile.
    const double base = 128.0 * (m * mz + 8.0);
    std::size_t N = 512;
    while (static_cast<double>(N) < base) N <<= 1;
    N = std::max(N, std::bit_ceil(noise::resolution_nodes(noise, T)));
    if (N > spec.max_nodes)
        throw NumericError("fit_coefficients: required grid of " + std::to_string(N) +
                           " nodes exceeds the budget of " + std::to_string(spec.max_nodes));

    const double norm = 1.0 / (2.0 * kPi * std::sqrt(static_cast<double>(m)));
    std::vector<int> probes{0, k_n, -k_n, (k_n + 1) / 2, -(k_n + 1) / 2};
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

    for (int attempt = 0;; ++attempt) {
        const auto psi = tabulate_psi(z, noise, T, N);
        const auto psi_half = half_grid(psi);
        bool ok = true;
        for (int j : probes) {
            const double theta = -static_cast<double>(j) / m;
            const auto full = norm * quad::filon_tabulated(psi, -T, T, theta);
            const auto half = norm * quad::filon_tabulated(psi_half, -T, T, theta);
            const double diff = std::abs(full - half);
            if (diff > 6e-8 * std::max(1.0, std::abs(full))) {
                ok = false;
                break;
            }
        }
        if (ok) {
            ProjectionEstimate est;
            est.m = m;
            est.k_n = k_n;
            est.n_samples = z.size();
            est.coeffs.resize(2 * static_cast<std::size_t>(k_n) + 1);
            for (int j = -k_n; j <= k_n; ++j)
                est.coeffs[static_cast<std::size_t>(j + k_n)] =
                    norm * quad::filon_tabulated(psi, -T, T, -static_cast<double>(j) / m);
            return est;
        }
        if (attempt >= 1 || 2 * N > spec.max_nodes)
            throw NumericError("fit_coefficients: oscillatory quadrature did not converge at N = " +
                               std::to_string(N));
        N <<= 1;
    }
}

ProjectionEstimate fit_coefficients_direct(const std::vector<double>& z,
                                           const noise::NoiseModel& noise, int m, int k_n,
                                           const quad::QuadratureSpec& spec) {
    if (m < 1) throw ConfigError("fit_coefficients_direct: m must be >= 1");
    if (k_n < 1) throw ConfigError("fit_coefficients_direct: k_n must be >= 1");
    validate_samples(z);
    ProjectionEstimate est;
    est.m = m;
    est.k_n = k_n;
    est.n_samples = z.size();
    est.coeffs.resize(2 * static_cast<std::size_t>(k_n) + 1);
    const double inv_n = 1.0 / static_cast<double>(z.size());
    for (int j = -k_n; j <= k_n; ++j) {
        std::complex<double> acc{0.0, 0.0};
        if (noise.is_none) {
            double s = 0.0;
            for (double zi : z) s += shannon::phi(m, j, zi);
            acc = {s, 0.0};
        } else {
            for (double zi : z) acc += u_star_kernel(noise, m, j, zi, spec);
        }
        est.coeffs[static_cast<std::size_t>(j + k_n)] = acc * inv_n;
    }
    return est;
}

double contrast_value(const ProjectionEstimate& e) {
    return -e.norm_sq();
}

int m_grid_max(const noise::NoiseModel& noise, std::size_t n, bool* clamped) {
    if (n < 2) throw ConfigError("m_grid_max: n must be >= 2");
    bool clamp = false;
    int result;
    if (noise.is_none) {
        // Noise-free selection runs over {1..n}.
        result = n > static_cast<std::size_t>(std::numeric_limits<int>::max())
                     ? std::numeric_limits<int>::max()
                     : static_cast<int>(n);
    } else {
        const auto& s = noise.smoothness;
        double bound_over_pi = 0.0;
        if (s.delta == 0.0) {
            bound_over_pi = std::pow(static_cast<double>(n), 1.0 / (2.0 * s.gamma + 1.0)) / kPi;
        } else {
            const double L = std::log(static_cast<double>(n)) / (2.0 * s.mu);
            if (L <= 1.0) {
                clamp = true;
            } else {
                const double inner =
                    L + (2.0 * s.gamma + 1.0 - s.delta) / (2.0 * s.delta * s.mu) * std::log(L);
                if (inner <= 0.0)
                    clamp = true;
                else
                    bound_over_pi = std::pow(inner, 1.0 / s.delta) / kPi;
            }
        }
        result = clamp ? 1 : static_cast<int>(std::floor(bound_over_pi));
        if (result < 1) {
            result = 1;
            clamp = true;
        }
    }
    if (clamped) *clamped = clamp;
    return result;
}

double penalty(const PenaltyConfig& config, const noise::NoiseModel& noise, int m, std::size_t n,
               const quad::QuadratureSpec& spec) {
    if (!(config.a > 1.0)) throw ConfigError("penalty: a must be > 1");
    if (m < 1) throw ConfigError("penalty: m must be >= 1");
    if (n < 1) throw ConfigError("penalty: n must be >= 1");
    const auto& s = noise.smoothness;
    const double a = config.a;
    const double nn = static_cast<double>(n);

    auto delta = [&]() {
        return noise::has_delta_closed_form(noise) ? noise::delta_m_closed_form(noise, m)
                                                   : noise::delta_m(noise, m, spec);
    };
    // c * Delta(m) * extra / n with overflow routed through log space.
    auto with_delta = [&](double c, double extra) {
        const LogValue d = delta();
        const double lv = std::log(c) + d.log_value + std::log(extra) - std::log(nn);
        if (lv > 700.0) return std::numeric_limits<double>::infinity();
        if (d.representable()) return c * d.value() * extra / nn;
        return std::exp(lv);
    };

    switch (config.variant) {
        case PenaltyVariant::Ordinary:
            if (s.delta != 0.0)
                throw ConfigError("penalty: ordinary variant requires delta = 0 noise");
            return with_delta(25.0 * a, 1.0);
        case PenaltyVariant::Supersmooth: {
            if (s.delta < 1.0 / 3.0) return with_delta(24.0 * a, 1.0);
            const double xi = 48.0 * s.mu * std::pow(kPi, s.delta) * noise::lambda2(noise, s.kappa0) /
                              noise::lambda1(s, s.kappa0_prime);
            const double expo = std::min(std::max(1.5 * s.delta - 0.5, 0.0), s.delta);
            return with_delta(8.0 * a * (1.0 + xi), std::pow(static_cast<double>(m), expo));
        }
        case PenaltyVariant::RefinedBeta: {
            if (s.delta != 0.0)
                throw ConfigError("penalty: refined_beta variant requires delta = 0 noise");
            if (!config.sum_beta)
                throw ConfigError("penalty: refined_beta variant requires sum_beta");
            return with_delta(24.0 * a, 1.0) +
                   128.0 * a * (1.0 + 4.0 * *config.sum_beta) * m / nn;
        }
        case PenaltyVariant::RefinedTau: {
            if (s.delta != 0.0)
                throw ConfigError("penalty: refined_tau variant requires delta = 0 noise");
            if (!config.sum_tau)
                throw ConfigError("penalty: refined_tau variant requires sum_tau");
            return with_delta(24.0 * a, 1.0) +
                   64.0 * a * (1.0 + 38.0 * std::log(static_cast<double>(m))) *
                       (m + kPi * *config.sum_tau * static_cast<double>(m) * m) / nn;
        }
        case PenaltyVariant::NoNoise:
            if (!noise.is_none)
                throw ConfigError("penalty: no_noise variant requires noise 'none'");
            if (!config.sum_beta)
                throw ConfigError("penalty: no_noise variant requires sum_beta");
            return 128.0 * a * (1.0 + 4.0 * *config.sum_beta) * m / nn;
    }
    throw ConfigError("penalty: unreachable");
}

SelectionResult select_model(const std::vector<double>& z, const noise::NoiseModel& noise,
                             const PenaltyConfig& config, KnPolicy k_policy,
                             const quad::QuadratureSpec& spec) {
    if (z.size() < 2) throw ConfigError("select_model: need n >= 2");
    validate_samples(z);
    if (noise.is_none && config.variant != PenaltyVariant::NoNoise)
        throw ConfigError("select_model: noise 'none' requires the no_noise penalty variant");
    const double mz = max_abs(z);

    SelectionResult res;
    res.m_n = m_grid_max(noise, z.size(), &res.grid_clamped);
    res.contrast_values.reserve(static_cast<std::size_t>(res.m_n));
    res.penalty_values.reserve(static_cast<std::size_t>(res.m_n));
    double best = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= res.m_n; ++m) {
        const int k = k_n_for(k_policy, z.size(), m, mz, noise.is_none);
        ProjectionEstimate est = noise.is_none ? fit_coefficients_direct(z, noise, m, k, spec)
                                               : fit_coefficients(z, noise, m, k, spec);
        const double c = contrast_value(est);
        const double p = penalty(config, noise, m, z.size(), spec);
        res.contrast_values.push_back(c);
        res.penalty_values.push_back(p);
        if (c + p < best) { // strict: ties keep the smaller m
            best = c + p;
            res.m_hat = m;
            res.estimate = std::move(est);
        }
    }
    return res;
}

std::vector<double> evaluate(const ProjectionEstimate& e, const std::vector<double>& grid,
                             double* max_imag) {
    std::vector<double> out(grid.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::complex<double> acc{0.0, 0.0};
        for (int j = -e.k_n; j <= e.k_n; ++j) acc += e.at(j) * shannon::phi(e.m, j, grid[i]);
        out[i] = acc.real();
        worst = std::max(worst, std::abs(acc.imag()));
    }
    if (max_imag) *max_imag = worst;
    return out;
}

TruthTable truth_table(const target::TargetDensity& g, int m, int k_n,
                       const quad::QuadratureSpec& spec) {
    if (m < 1) throw ConfigError("truth_table: m must be >= 1");
    if (k_n < 0) throw ConfigError("truth_table: k_n must be >= 0");
    TruthTable t;
    t.m = m;
    const auto ct = shannon::project_l2(g.cf, m, k_n, spec);
    t.a = ct.coeff;
    t.tail = target::bias_tail(g, m, spec);
    t.band_norm_sq = std::max(0.0, g.l2_norm_sq - t.tail);
    return t;
}

MiseBreakdown mise_against_truth(const ProjectionEstimate& e, const TruthTable& truth) {
    if (truth.m != e.m) throw ConfigError("mise_against_truth: resolution mismatch");
    if (truth.k() < e.k_n) throw ConfigError("mise_against_truth: truth table too narrow");
    double err = 0.0;
    double captured = 0.0;
    for (int j = -e.k_n; j <= e.k_n; ++j) {
        err += std::norm(e.at(j) - truth.at(j));
        captured += std::norm(truth.at(j));
    }
    const double truncation = std::max(0.0, truth.band_norm_sq - captured);
    MiseBreakdown out;
    out.projection_error = err + truncation;
    out.tail_bias = truth.tail;
    out.total = out.projection_error + out.tail_bias;
    return out;
}

MiseBreakdown mise_against_truth(const ProjectionEstimate& e, const target::TargetDensity& g,
                                 const quad::QuadratureSpec& spec) {
    return mise_against_truth(e, truth_table(g, e.m, e.k_n, spec));
}

} // namespace deconv::estimator
