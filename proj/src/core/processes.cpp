#include "core/processes.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace deconv::process {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> doubling_chain(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> out(n);
    double x = unif(gen); // stationary U[0,1] start
    for (std::size_t i = 0; i < n; ++i) {
        x = (x + (coin(gen) ? 1.0 : 0.0)) / 2.0;
        out[i] = x;
    }
    return out;
}

} // namespace

DependentProcess bernoulli_ar() {
    DependentProcess p;
    p.name = "bernoulli_ar";
    p.generate = doubling_chain;
    p.stationary_density = target::builtin_target("uniform01");
    p.tau_bound = [](int k) {
        if (k < 1) throw ConfigError("tau_bound: k must be >= 1");
        return std::ldexp(1.0, -k);
    };
    return p;
}

DependentProcess expanding_map() {
    DependentProcess p;
    p.name = "expanding_map";
    p.generate = doubling_chain;
    p.stationary_density = target::builtin_target("uniform01");
    p.tau_bound = [](int k) {
        if (k < 1) throw ConfigError("tau_bound: k must be >= 1");
        return 2.0 * std::ldexp(1.0, -k);
    };
    return p;
}

DependentProcess contractive_chain(double kappa, double innovation_sigma, std::size_t burn_in) {
    if (!(kappa > 0.0) || !(kappa < 1.0))
        throw ConfigError("contractive_chain: kappa must be in (0, 1)");
    if (!(innovation_sigma > 0.0))
        throw ConfigError("contractive_chain: innovation_sigma must be > 0");
    DependentProcess p;
    p.name = "contractive_chain";
    p.burn_in = burn_in;
    const double sigma_x = innovation_sigma / std::sqrt(1.0 - kappa * kappa);
    p.stationary_density = target::builtin_target("gaussian", {{"mean", 0.0}, {"sigma", sigma_x}});
    const double e_abs_x0 = sigma_x * std::sqrt(2.0 / kPi);
    p.tau_bound = [e_abs_x0, kappa](int k) {
        if (k < 1) throw ConfigError("tau_bound: k must be >= 1");
        return 2.0 * e_abs_x0 * std::pow(kappa, k);
    };
    const auto floor_burn =
        static_cast<std::size_t>(std::ceil(std::log(1e-12) / std::log(kappa)));
    if (burn_in < floor_burn)
        p.warnings.push_back("contractive_chain: burn_in " + std::to_string(burn_in) +
                             " below recommended floor " + std::to_string(floor_burn));
    const double sigma = innovation_sigma;
    p.generate = [kappa, sigma, sigma_x, burn_in](std::size_t n, std::uint64_t seed) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> innov(0.0, sigma);
        std::normal_distribution<double> start(0.0, sigma_x);
        double x = start(gen); // stationary start; burn_in kept for the contract
        for (std::size_t i = 0; i < burn_in; ++i) x = kappa * x + innov(gen);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            x = kappa * x + innov(gen);
            out[i] = x;
        }
        return out;
    };
    return p;
}

DependentProcess linear_process(std::vector<double> coeffs, double innovation_sigma) {
    if (coeffs.empty()) throw ConfigError("linear_process: coefficient list is empty");
    if (!(innovation_sigma > 0.0))
        throw ConfigError("linear_process: innovation_sigma must be > 0");
    double sum_sq = 0.0;
    for (double a : coeffs) {
        if (!std::isfinite(a)) throw ConfigError("linear_process: coefficients must be finite");
        sum_sq += a * a;
    }
    if (!(sum_sq > 0.0)) throw ConfigError("linear_process: all coefficients are zero");

    DependentProcess p;
    p.name = "linear_process";
    const double sigma_x = innovation_sigma * std::sqrt(sum_sq);
    p.stationary_density = target::builtin_target("gaussian", {{"mean", 0.0}, {"sigma", sigma_x}});

    // Suffix sums for the two tau bounds; zero beyond the last coefficient.
    const std::size_t J = coeffs.size();
    std::vector<double> abs_suffix(J + 1, 0.0), sq_suffix(J + 1, 0.0);
    for (std::size_t j = J; j-- > 0;) {
        abs_suffix[j] = abs_suffix[j + 1] + std::abs(coeffs[j]);
        sq_suffix[j] = sq_suffix[j + 1] + coeffs[j] * coeffs[j];
    }
    const double e_abs_xi = innovation_sigma * std::sqrt(2.0 / kPi);
    const double var_xi = innovation_sigma * innovation_sigma;
    p.tau_bound = [abs_suffix, sq_suffix, e_abs_xi, var_xi, J](int k) {
        if (k < 1) throw ConfigError("tau_bound: k must be >= 1");
        const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(k), J);
        return std::min(2.0 * e_abs_xi * abs_suffix[idx],
                        std::sqrt(2.0 * var_xi * sq_suffix[idx]));
    };
    const double sigma = innovation_sigma;
    p.generate = [coeffs, sigma, J](std::size_t n, std::uint64_t seed) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> innov(0.0, sigma);
        std::vector<double> xi(n + J - 1);
        for (auto& v : xi) v = innov(gen);
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < J; ++j) acc += coeffs[j] * xi[i + J - 1 - j];
            out[i] = acc;
        }
        return out;
    };
    return p;
}

DependentProcess iid_process(const target::TargetDensity& t) {
    if (!t.sampler) throw ConfigError("iid_process: target '" + t.name + "' has no sampler");
    DependentProcess p;
    p.name = "iid_" + t.name;
    p.stationary_density = t;
    p.generate = [t](std::size_t n, std::uint64_t seed) { return target::sample(t, n, seed); };
    p.tau_bound = [](int k) {
        if (k < 1) throw ConfigError("tau_bound: k must be >= 1");
        return 0.0;
    };
    p.beta_bound = [](int k) {
        if (k < 1) throw ConfigError("beta_bound: k must be >= 1");
        return 0.0;
    };
    return p;
}

double RmBounds::min_bound() const {
    if (r_beta && r_tau) return std::min(*r_beta, *r_tau);
    if (r_beta) return *r_beta;
    if (r_tau) return *r_tau;
    throw ConfigError("RmBounds: process provides no dependence coefficient bound");
}

RmBounds r_m_bounds(const DependentProcess& p, int m, std::size_t n) {
    if (m < 1) throw ConfigError("r_m_bounds: m must be >= 1");
    if (n < 2) throw ConfigError("r_m_bounds: n must be >= 2");
    if (!p.beta_bound && !p.tau_bound)
        throw ConfigError("r_m_bounds: process '" + p.name +
                          "' provides no dependence coefficient bound");
    RmBounds out;
    if (p.beta_bound) {
        double s = 0.0;
        for (std::size_t k = 1; k + 1 <= n; ++k) s += p.beta_bound(static_cast<int>(k));
        out.r_beta = 4.0 * m * s;
    }
    if (p.tau_bound) {
        double s = 0.0;
        for (std::size_t k = 1; k + 1 <= n; ++k) s += p.tau_bound(static_cast<int>(k));
        out.r_tau = kPi * static_cast<double>(m) * static_cast<double>(m) * s;
    }
    return out;
}

} // namespace deconv::process
