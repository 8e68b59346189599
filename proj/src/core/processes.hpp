#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/targets.hpp"

namespace deconv::process {

// Strictly stationary generator with analytic dependence-coefficient bounds.
// tau_bound / beta_bound bound tau_{X,inf}(k) / beta_{X,inf}(k) for k >= 1
// (valid surrogates for the 1-versions); an empty function means no bound of
// that kind is available for the process.
struct DependentProcess {
    std::string name;
    std::function<std::vector<double>(std::size_t, std::uint64_t)> generate;
    target::TargetDensity stationary_density;
    std::function<double(int)> tau_bound;
    std::function<double(int)> beta_bound;
    std::size_t burn_in = 0;
    std::vector<std::string> warnings;
};

// X_k = (X_{k-1} + B_k)/2 with B_k Bernoulli(1/2), started from the stationary
// U[0,1] law.  tau_{X,inf}(k) <= 2^{-k}; not beta-mixing, so no beta bound.
DependentProcess bernoulli_ar();

// X_k = kappa X_{k-1} + xi_k with Gaussian innovations, started from the
// stationary N(0, sigma^2/(1-kappa^2)) law.  tau_{X,inf}(k) <= 2 E|X_0| kappa^k.
DependentProcess contractive_chain(double kappa, double innovation_sigma,
                                   std::size_t burn_in = 1000);

// Finite moving average X_i = sum_j a_j xi_{i-j} with Gaussian innovations
// (exact stationarity, Gaussian marginal).
// tau_{X,inf}(k) <= min(2 E|xi| sum_{j>=k}|a_j|, sqrt(2 Var(xi) sum_{j>=k} a_j^2)).
DependentProcess linear_process(std::vector<double> coeffs, double innovation_sigma);

// Dual Markov chain of the doubling map T(x) = 2x mod 1: same dynamics as
// bernoulli_ar; tau_{X,inf}(k) <= C rho^k with (C, rho) = (2, 1/2)
// (implementation-chosen constants for this map).
DependentProcess expanding_map();

// I.i.d. draws from a samplable target; zero dependence coefficients.
DependentProcess iid_process(const target::TargetDensity& t);

// Covariance-residual bounds R_{m,beta} = 4 m sum_{k=1}^{n-1} beta(k) and
// R_{m,tau} = pi m^2 sum_{k=1}^{n-1} tau(k); a bound is absent when the
// process lacks the matching coefficient function.
//
// Other dependence structures admit analogous bounds that are out of scope
// here and recorded for reference only: with strong mixing coefficients,
// R_m <= 16 m sum_{k=1}^{n-1} alpha_{X,1}(k); for associated sequences,
// |Cov(e^{ixX_1}, e^{ixX_k})| <= 4 x^2 Cov(X_1, X_k) gives
// R_m <= (8 pi^2/3) m^3 sum_{k=2}^{n} Cov(X_1, X_k).
struct RmBounds {
    std::optional<double> r_beta;
    std::optional<double> r_tau;
    // Smallest available bound; throws ConfigError when both are absent.
    double min_bound() const;
};

RmBounds r_m_bounds(const DependentProcess& p, int m, std::size_t n);

} // namespace deconv::process
