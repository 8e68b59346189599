#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/noise.hpp"
#include "core/quadrature.hpp"
#include "core/shannon.hpp"
#include "core/targets.hpp"

namespace deconv::estimator {

// Coefficient table a-hat_{m,j}, j in [-k_n, k_n].  Coefficients are kept
// complex (u* is complex-valued pointwise); only density evaluation takes
// real parts.
struct ProjectionEstimate {
    int m = 1;
    int k_n = 1;
    std::vector<std::complex<double>> coeffs;
    std::size_t n_samples = 0;
    std::complex<double> at(int j) const;
    double norm_sq() const; // sum |a-hat|^2
};

enum class PenaltyVariant { Ordinary, Supersmooth, RefinedBeta, RefinedTau, NoNoise };

PenaltyVariant penalty_variant_from_name(const std::string& name);
std::string penalty_variant_name(PenaltyVariant v);

struct PenaltyConfig {
    double a = 1.5;
    PenaltyVariant variant = PenaltyVariant::Supersmooth;
    std::optional<double> sum_beta; // sum_{k=1}^{n} beta_{X,1}(k) surrogate
    std::optional<double> sum_tau;  // sum_{k=1}^{n} tau_{X,1}(k) surrogate
};

struct SelectionResult {
    int m_hat = 1;
    ProjectionEstimate estimate;
    std::vector<double> contrast_values; // index m-1 over the grid
    std::vector<double> penalty_values;
    int m_n = 1;
    bool grid_clamped = false; // resolution formula degenerated; grid forced to {1}
};

// Exact follows the theorems (k_n = n; noise-free k_n = n^2).  Auto is the
// fast mode, k_n = ceil(m max|Z|) + 64, and is not theorem-conforming.
enum class KnPolicy { Exact, Auto };

int k_n_for(KnPolicy policy, std::size_t n, int m, double max_abs_z, bool no_noise);

// u*_{phi_{m,j}}(z) = (1/(2 pi sqrt(m))) integral_{-pi m}^{pi m}
//   e^{ix(z - j/m)} / f_eps*(x) dx; exact phi_{m,j}(z) when the noise is none.
std::complex<double> u_star_kernel(const noise::NoiseModel& noise, int m, int j, double z,
                                   const quad::QuadratureSpec& spec = {});

// a-hat_{m,j} = (1/n) sum_i u*_{phi_{m,j}}(Z_i), computed by tabulating
// Psi(x) = (1/n) sum_i e^{ixZ_i} / f_eps*(x) on a uniform grid and applying
// oscillatory (Filon) quadrature per j; self-validated against the half-grid.
ProjectionEstimate fit_coefficients(const std::vector<double>& z, const noise::NoiseModel& noise,
                                    int m, int k_n, const quad::QuadratureSpec& spec = {});

// Same estimator through per-sample kernel quadrature; O(n k_n) integrals.
// Oracle-grade reference path (and the production path for noise none, where
// the kernel is exactly phi).
ProjectionEstimate fit_coefficients_direct(const std::vector<double>& z,
                                           const noise::NoiseModel& noise, int m, int k_n,
                                           const quad::QuadratureSpec& spec = {});

// gamma_n(g-hat_m) = -sum_{|j| <= k_n} |a-hat_{m,j}|^2.
double contrast_value(const ProjectionEstimate& e);

// Largest grid resolution m_n: pi m_n <= n^{1/(2 gamma + 1)} when delta = 0,
// the log-corrected bound when delta > 0 (clamped to 1 and flagged when the
// formula degenerates).  Noise none uses grid {1..n}.
int m_grid_max(const noise::NoiseModel& noise, std::size_t n, bool* clamped = nullptr);

double penalty(const PenaltyConfig& config, const noise::NoiseModel& noise, int m, std::size_t n,
               const quad::QuadratureSpec& spec = {});

SelectionResult select_model(const std::vector<double>& z, const noise::NoiseModel& noise,
                             const PenaltyConfig& config, KnPolicy k_policy,
                             const quad::QuadratureSpec& spec = {});

std::vector<double> evaluate(const ProjectionEstimate& e, const std::vector<double>& grid,
                             double* max_imag = nullptr);

// True projection data of a target at resolution m: coefficients over
// [-k_n, k_n], the in-band squared norm, and the tail bias.
struct TruthTable {
    int m = 1;
    std::vector<std::complex<double>> a; // j in [-k(), k()]
    double band_norm_sq = 0.0;           // (1/2pi) integral_band |g*|^2
    double tail = 0.0;                   // bias_tail(m)
    int k() const { return static_cast<int>(a.size() / 2); }
    std::complex<double> at(int j) const { return a[static_cast<std::size_t>(j + k())]; }
};

TruthTable truth_table(const target::TargetDensity& g, int m, int k_n,
                       const quad::QuadratureSpec& spec = {});

struct MiseBreakdown {
    double total = 0.0;
    double projection_error = 0.0; // in-band error including truncation
    double tail_bias = 0.0;
};

// ||g-hat - g||^2 via Parseval on the band [-pi m, pi m] plus the tail:
// sum_{|j|<=k_n} |a-hat_j - a_j|^2 + (band_norm - sum_{|j|<=k_n} |a_j|^2)
// + bias_tail(m).  truth.m must equal e.m and truth.k() >= e.k_n.
MiseBreakdown mise_against_truth(const ProjectionEstimate& e, const TruthTable& truth);
MiseBreakdown mise_against_truth(const ProjectionEstimate& e, const target::TargetDensity& g,
                                 const quad::QuadratureSpec& spec = {});

} // namespace deconv::estimator
