#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/estimator.hpp"
#include "core/noise.hpp"
#include "core/processes.hpp"
#include "core/quadrature.hpp"
#include "core/targets.hpp"

namespace deconv::harness {

// kappa_a = (a+1)/(a-1) and C_a = max(kappa_a^2, 2 kappa_a); reported as
// reference constants, never used in the estimator itself.
double kappa_a(double a);
double c_a(double a);

// Brute-force oracle: Monte Carlo mean MISE per m over the grid {1..m_n},
// argmin with smallest-m tie-break.
struct OracleResult {
    int m_breve = 1;
    int m_n = 1;
    std::vector<double> mise_mean; // index m-1
    std::vector<double> mise_se;
    std::size_t replications = 0;
    std::size_t failures = 0; // replications excluded for numeric failures
};

OracleResult oracle_m(const process::DependentProcess& process, const noise::NoiseModel& noise,
                      std::size_t n, std::size_t replications, std::uint64_t seed_x,
                      std::uint64_t seed_eps, estimator::KnPolicy k_policy,
                      const quad::QuadratureSpec& spec = {});

// Resolution/rate prescription per smoothness regime.  The doubly exponential
// regime (delta > 0 and r > 0) has only an implicit resolution equation and no
// explicit rate; rate_known is false there.
struct TheoreticalChoice {
    int m = 1;               // max(1, floor(pi_m_breve / pi))
    double pi_m_breve = 0.0; // the real-valued band edge prescription
    double rate = 0.0;       // rate expression evaluated at n (when known)
    bool rate_known = true;
};

TheoreticalChoice theoretical_m_breve(const target::SmoothnessClass& g,
                                      const noise::NoiseSmoothness& eps, std::size_t n);

// Non-asymptotic risk-bound components at resolution m:
//   bias            ||g - g_m||^2            (tail of the band integral)
//   variance_main   2 Delta(m) / n
//   residual        m^2 (M2 + 1) / k_n + 2 min(R_beta, R_tau) / n
// r_m_available is false when the process has no coefficient bound; the
// residual then carries the truncation term only.
struct RiskBound {
    double bias = 0.0;
    double variance_main = 0.0;
    double residual = 0.0;
    bool r_m_available = false;
    double total() const { return bias + variance_main + residual; }
};

RiskBound risk_bound_terms(const target::TargetDensity& g, const noise::NoiseModel& noise,
                           const process::DependentProcess& process, int m, std::size_t n,
                           int k_n, const quad::QuadratureSpec& spec = {});

// Least-squares slope of log(mean MISE) against the regime's regressor:
// log n when the noise is ordinary smooth or the target has r > 0, log log n
// for the supersmooth-noise / r = 0 regime.  The smallest n is dropped when
// its selection grid is degenerate (m_n = 1).  se is NaN with fewer than
// three points.
struct RateFit {
    double slope = 0.0;
    double se = 0.0;
    std::size_t points_used = 0;
    std::string regressor; // "log_n" or "log_log_n"
};

RateFit fit_rate(const std::vector<std::size_t>& n_values, const std::vector<double>& mean_mise,
                 const std::vector<int>& m_n_values, const noise::NoiseSmoothness& eps,
                 const target::SmoothnessClass& g);

struct ExperimentConfig {
    target::TargetDensity target; // truth; must match process.stationary_density
    noise::NoiseModel noise;
    process::DependentProcess process;
    std::vector<std::size_t> n_values; // strictly increasing
    std::size_t replications = 1;
    std::size_t oracle_replications = 0; // 0 disables the oracle sweep
    estimator::PenaltyConfig penalty;
    std::uint64_t seed = 0;
    quad::QuadratureSpec quad;
    estimator::KnPolicy k_policy = estimator::KnPolicy::Auto;
    std::vector<std::pair<std::string, std::string>> config_echo;
};

struct RepRecord {
    std::size_t n = 0;
    std::size_t rep = 0;
    int m_hat = 1;
    int k_n = 1;
    double mise = 0.0;
    estimator::MiseBreakdown breakdown;
    std::vector<double> contrast; // per m over the grid
    bool failed = false;
    std::string error;
};

struct PerNSummary {
    std::size_t n = 0;
    int m_n = 1;
    bool grid_clamped = false;
    std::vector<double> penalty_table; // per m, deterministic in (noise, n)
    std::size_t failures = 0;
    double mean_mise = 0.0;
    double median_mise = 0.0;
    double trimmed_mean_mise = 0.0; // 10% two-sided trim
    double se_mise = 0.0;
    std::optional<OracleResult> oracle;
    double oracle_mise = 0.0;       // mean MISE at m_breve (when oracle ran)
    double adaptive_oracle_ratio = 0.0;
    std::optional<TheoreticalChoice> theoretical;
};

struct ExperimentReport {
    std::vector<RepRecord> replications;
    std::vector<PerNSummary> per_n;
    std::optional<RateFit> rate_fit;
    bool valid = true; // false when > 5% of replications failed
    double kappa_a_value = 0.0;
    double c_a_value = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config_echo;
    double wall_seconds = 0.0; // excluded from serialized reports (determinism)
};

// Runs replications x n_values with per-cell derived seeds (independent of
// scheduling), then fresh oracle replications per n.  Per-replication numeric
// failures are recorded and excluded from the aggregates.
ExperimentReport run_experiment(const ExperimentConfig& config);

} // namespace deconv::harness
