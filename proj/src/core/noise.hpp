#pragma once
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "core/logval.hpp"
#include "core/quadrature.hpp"

namespace deconv::noise {

// |f_eps^*(x)| is bracketed by kappa0 (x^2+1)^{-gamma/2} exp(-mu |x|^delta) below
// and the same shape scaled by kappa0_prime above.
struct NoiseSmoothness {
    double gamma = 0.0;
    double mu = 0.0;
    double delta = 0.0;
    double kappa0 = 1.0;
    double kappa0_prime = 1.0;
};

enum class NoiseKind { None, Gaussian, Cauchy, Laplace, LogChiSquared };

struct NoiseModel {
    std::string name;
    NoiseKind kind = NoiseKind::None;
    double scale = 1.0;
    bool is_none = false;
    NoiseSmoothness smoothness;
    std::function<std::complex<double>(double)> cf;  // f_eps^*(x), hermitian, |cf| <= 1
    std::function<double(double)> log_abs_cf;        // log|f_eps^*(x)|, overflow-safe
    std::function<double(double)> density;           // absent for the noise-free model
    double density_l2_norm = std::numeric_limits<double>::quiet_NaN();
    std::function<double(std::mt19937_64&)> sampler; // absent for the noise-free model
};

// name in {gaussian, cauchy, laplace, log_chi_squared, none}; scale > 0
// (ignored for none and log_chi_squared).
NoiseModel builtin_noise(const std::string& name, double scale = 1.0);

// Delta(m) = (1/2pi) integral_{-pi m}^{pi m} |f_eps^*(x)|^{-2} dx.  delta_m
// dispatches: exact m for noise none, otherwise peak-factored quadrature in
// log space.  delta_m_quadrature always integrates (oracle path).
LogValue delta_m(const NoiseModel& model, int m, const quad::QuadratureSpec& spec = {});
LogValue delta_m_quadrature(const NoiseModel& model, int m, const quad::QuadratureSpec& spec = {});

// Closed-form log Delta(m) where one exists (none, laplace, cauchy,
// log_chi_squared); throws ConfigError for gaussian.
bool has_delta_closed_form(const NoiseModel& model);
LogValue delta_m_closed_form(const NoiseModel& model, int m);

// Gamma(m) = (1 + (pi m)^2)^gamma (pi m)^{1 - delta} exp{2 mu (pi m)^delta}
LogValue gamma_m(const NoiseSmoothness& s, int m);

// lambda1 = 1 / (kappa^2 pi R), R = 1{delta = 0} + 2 mu delta 1{delta > 0}
double lambda1(const NoiseSmoothness& s, double kappa);

// lambda2 = ||f_eps|| kappa0^{-1} sqrt(2 lambda1(kappa0)) for delta <= 1,
//           2 lambda1(kappa0) for delta > 1.
double lambda2(const NoiseModel& model, double kappa0);

// Delta2(m) = double integral over [-pi m, pi m]^2 of
//   |f_Z^*(x - y)|^2 / (|f_eps^*(x)|^2 |f_eps^*(y)|^2) dx dy
// with f_Z^* supplied by the caller (observation characteristic function).
// Diagnostic only; refuses when the tensor grid would exceed spec.max_nodes.
LogValue delta2_m(const NoiseModel& model,
                  const std::function<std::complex<double>(double)>& f_z_fourier, int m,
                  const quad::QuadratureSpec& spec = {});

// Grid resolution heuristic shared with the estimator: nodes needed for a
// panel-quadratic fit of 1/f_eps^* over [-T, T] to track its log-slope.
std::size_t resolution_nodes(const NoiseModel& model, double half_width);

std::vector<double> sample(const NoiseModel& model, std::size_t n, std::uint64_t seed);

} // namespace deconv::noise
