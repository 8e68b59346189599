#include "core/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace deconv::harness {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::size_t thread_count(std::size_t work_items) {
    std::size_t n = 0;
    if (const char* env = std::getenv("DECONV_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1) n = static_cast<std::size_t>(v);
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return std::min({n, work_items, static_cast<std::size_t>(64)});
}

// Index-parallel loop; results must be written to disjoint slots so the
// outcome is independent of scheduling.  First non-numeric exception rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t threads = thread_count(count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Widening cache of truth tables keyed by m; shared_ptr so readers survive a
// concurrent widen.
class TruthCache {
public:
    TruthCache(const target::TargetDensity& g, quad::QuadratureSpec spec)
        : g_(g), spec_(spec) {}

    std::shared_ptr<const estimator::TruthTable> get(int m, int k_needed) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = table_.find(m);
        if (it != table_.end() && it->second->k() >= k_needed) return it->second;
        const int k_new = it == table_.end() ? k_needed : std::max(k_needed, 2 * it->second->k());
        auto fresh = std::make_shared<estimator::TruthTable>(
            estimator::truth_table(g_, m, k_new, spec_));
        table_[m] = fresh;
        return fresh;
    }

private:
    const target::TargetDensity& g_;
    quad::QuadratureSpec spec_;
    std::mutex mutex_;
    std::map<int, std::shared_ptr<const estimator::TruthTable>> table_;
};

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / (static_cast<double>(v.size()) * (static_cast<double>(v.size()) - 1.0)));
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double trimmed_mean_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t cut = v.size() / 10;
    double s = 0.0;
    for (std::size_t i = cut; i < v.size() - cut; ++i) s += v[i];
    return s / static_cast<double>(v.size() - 2 * cut);
}

double delta_linear(const noise::NoiseModel& noise, int m, const quad::QuadratureSpec& spec) {
    const LogValue d = noise::has_delta_closed_form(noise) ? noise::delta_m_closed_form(noise, m)
                                                           : noise::delta_m(noise, m, spec);
    return d.representable() ? d.value() : std::numeric_limits<double>::infinity();
}

} // namespace

double kappa_a(double a) {
    if (!(a > 1.0)) throw ConfigError("kappa_a: a must be > 1");
    return (a + 1.0) / (a - 1.0);
}

double c_a(double a) {
    const double k = kappa_a(a);
    return std::max(k * k, 2.0 * k);
}

OracleResult oracle_m(const process::DependentProcess& process, const noise::NoiseModel& noise,
                      std::size_t n, std::size_t replications, std::uint64_t seed_x,
                      std::uint64_t seed_eps, estimator::KnPolicy k_policy,
                      const quad::QuadratureSpec& spec) {
    if (n < 2) throw ConfigError("oracle_m: need n >= 2");
    if (replications < 1) throw ConfigError("oracle_m: need replications >= 1");
    OracleResult res;
    res.replications = replications;
    res.m_n = estimator::m_grid_max(noise, n);
    const std::size_t grid = static_cast<std::size_t>(res.m_n);

    TruthCache truths(process.stationary_density, spec);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> cells(replications * grid, nan);
    parallel_for(replications, [&](std::size_t r) {
        std::vector<double> z = process.generate(n, derive_seed(seed_x, r));
        const std::vector<double> eps = noise::sample(noise, n, derive_seed(seed_eps, r));
        for (std::size_t i = 0; i < n; ++i) z[i] += eps[i];
        double mz = 0.0;
        for (double v : z) mz = std::max(mz, std::abs(v));
        for (std::size_t mi = 0; mi < grid; ++mi) {
            const int m = static_cast<int>(mi) + 1;
            try {
                const int k = estimator::k_n_for(k_policy, n, m, mz, noise.is_none);
                const auto est = noise.is_none
                                     ? estimator::fit_coefficients_direct(z, noise, m, k, spec)
                                     : estimator::fit_coefficients(z, noise, m, k, spec);
                const auto truth = truths.get(m, k);
                cells[r * grid + mi] = estimator::mise_against_truth(est, *truth).total;
            } catch (const NumericError&) {
                // leave NaN; the replication is excluded for this m
            }
        }
    });

    res.mise_mean.assign(grid, nan);
    res.mise_se.assign(grid, nan);
    std::vector<bool> rep_failed(replications, false);
    for (std::size_t mi = 0; mi < grid; ++mi) {
        std::vector<double> col;
        col.reserve(replications);
        for (std::size_t r = 0; r < replications; ++r) {
            const double v = cells[r * grid + mi];
            if (std::isnan(v))
                rep_failed[r] = true;
            else
                col.push_back(v);
        }
        if (col.empty()) throw NumericError("oracle_m: every replication failed at m = " +
                                            std::to_string(mi + 1));
        const double mean = mean_of(col);
        res.mise_mean[mi] = mean;
        res.mise_se[mi] = se_of(col, mean);
    }
    for (bool f : rep_failed) res.failures += f ? 1 : 0;

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mi = 0; mi < grid; ++mi) {
        if (res.mise_mean[mi] < best) {
            best = res.mise_mean[mi];
            res.m_breve = static_cast<int>(mi) + 1;
        }
    }
    return res;
}

TheoreticalChoice theoretical_m_breve(const target::SmoothnessClass& g,
                                      const noise::NoiseSmoothness& eps, std::size_t n) {
    if (n < 3) throw ConfigError("theoretical_m_breve: need n >= 3");
    const double ln_n = std::log(static_cast<double>(n));
    TheoreticalChoice out;
    if (eps.delta == 0.0 && g.r == 0.0) {
        const double e = 2.0 * g.s + 2.0 * eps.gamma + 1.0;
        out.pi_m_breve = std::pow(static_cast<double>(n), 1.0 / e);
        out.rate = std::pow(static_cast<double>(n), -2.0 * g.s / e);
    } else if (eps.delta == 0.0) {
        out.pi_m_breve = std::pow(ln_n / (2.0 * g.b), 1.0 / g.r);
        out.rate = std::pow(ln_n, (2.0 * eps.gamma + 1.0) / g.r) / static_cast<double>(n);
    } else if (g.r == 0.0) {
        out.pi_m_breve = std::pow(ln_n / (2.0 * eps.mu + 1.0), 1.0 / eps.delta);
        out.rate = std::pow(ln_n, -2.0 * g.s / eps.delta);
    } else {
        // Implicit balance m^{2s+2gamma+1-r} exp{2 mu (pi m)^delta + 2 b pi^r m^r} = n;
        // smallest integer resolution on or past the root, no explicit rate.
        const double power = 2.0 * g.s + 2.0 * eps.gamma + 1.0 - g.r;
        int found = 0;
        for (int m = 1; m <= 1000000; ++m) {
            const double lhs = power * std::log(static_cast<double>(m)) +
                               2.0 * eps.mu * std::pow(kPi * m, eps.delta) +
                               2.0 * g.b * std::pow(kPi, g.r) * std::pow(m, g.r);
            if (lhs >= ln_n) {
                found = m;
                break;
            }
        }
        if (!found)
            throw NumericError("theoretical_m_breve: implicit resolution equation has no root "
                               "below 10^6");
        out.m = found;
        out.pi_m_breve = kPi * found;
        out.rate_known = false;
        return out;
    }
    out.m = std::max(1, static_cast<int>(std::floor(out.pi_m_breve / kPi)));
    return out;
}

RiskBound risk_bound_terms(const target::TargetDensity& g, const noise::NoiseModel& noise,
                           const process::DependentProcess& process, int m, std::size_t n,
                           int k_n, const quad::QuadratureSpec& spec) {
    if (m < 1) throw ConfigError("risk_bound_terms: m must be >= 1");
    if (n < 2) throw ConfigError("risk_bound_terms: need n >= 2");
    if (k_n < 1) throw ConfigError("risk_bound_terms: k_n must be >= 1");
    RiskBound out;
    out.bias = target::bias_tail(g, m, spec);
    out.variance_main = 2.0 * delta_linear(noise, m, spec) / static_cast<double>(n);
    out.residual = static_cast<double>(m) * m * (g.m2 + 1.0) / static_cast<double>(k_n);
    const auto rm = process::r_m_bounds(process, m, n);
    out.r_m_available = rm.r_beta.has_value() || rm.r_tau.has_value();
    if (out.r_m_available) out.residual += 2.0 * rm.min_bound() / static_cast<double>(n);
    return out;
}

RateFit fit_rate(const std::vector<std::size_t>& n_values, const std::vector<double>& mean_mise,
                 const std::vector<int>& m_n_values, const noise::NoiseSmoothness& eps,
                 const target::SmoothnessClass& g) {
    if (n_values.size() != mean_mise.size() || n_values.size() != m_n_values.size())
        throw ConfigError("fit_rate: input lengths differ");
    RateFit fit;
    fit.regressor = (eps.delta > 0.0 && g.r == 0.0) ? "log_log_n" : "log_n";
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (i == 0 && m_n_values[i] <= 1) continue; // degenerate grid, nothing selected
        if (!(mean_mise[i] > 0.0) || !std::isfinite(mean_mise[i]))
            throw ConfigError("fit_rate: mean MISE must be finite and positive");
        const double ln_n = std::log(static_cast<double>(n_values[i]));
        xs.push_back(fit.regressor == "log_n" ? ln_n : std::log(ln_n));
        ys.push_back(std::log(mean_mise[i]));
    }
    if (xs.size() < 2) throw ConfigError("fit_rate: need at least two usable n values");
    const std::size_t N = xs.size();
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(N);
    my /= static_cast<double>(N);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw ConfigError("fit_rate: regressor values coincide");
    fit.slope = sxy / sxx;
    fit.points_used = N;
    if (N > 2) {
        const double intercept = my - fit.slope * mx;
        double rss = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double r = ys[i] - (intercept + fit.slope * xs[i]);
            rss += r * r;
        }
        fit.se = std::sqrt(rss / (static_cast<double>(N) - 2.0) / sxx);
    } else {
        fit.se = std::numeric_limits<double>::quiet_NaN();
    }
    return fit;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    if (config.n_values.empty()) throw ConfigError("run_experiment: n_values is empty");
    for (std::size_t i = 0; i < config.n_values.size(); ++i) {
        if (config.n_values[i] < 2) throw ConfigError("run_experiment: every n must be >= 2");
        if (i > 0 && config.n_values[i] <= config.n_values[i - 1])
            throw ConfigError("run_experiment: n_values must be strictly increasing");
    }
    if (config.replications < 1) throw ConfigError("run_experiment: replications must be >= 1");
    const target::TargetDensity& truth = config.process.stationary_density;
    if (truth.name != config.target.name)
        throw ConfigError("run_experiment: target '" + config.target.name +
                          "' does not match the process stationary density '" + truth.name + "'");

    ExperimentReport report;
    report.seed = config.seed;
    report.config_echo = config.config_echo;
    report.kappa_a_value = kappa_a(config.penalty.a);
    report.c_a_value = c_a(config.penalty.a);

    const std::size_t R = config.replications;
    const std::size_t Ro = config.oracle_replications;
    const std::uint64_t sx = derive_seed(config.seed, 0);
    const std::uint64_t se = derive_seed(config.seed, 1);
    const std::uint64_t ox = derive_seed(config.seed, 2);
    const std::uint64_t oe = derive_seed(config.seed, 3);

    TruthCache truths(truth, config.quad);
    report.replications.resize(config.n_values.size() * R);
    std::size_t failures_total = 0;

    for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
        const std::size_t n = config.n_values[ni];
        PerNSummary summary;
        summary.n = n;
        summary.m_n = estimator::m_grid_max(config.noise, n, &summary.grid_clamped);
        summary.penalty_table.reserve(static_cast<std::size_t>(summary.m_n));
        for (int m = 1; m <= summary.m_n; ++m)
            summary.penalty_table.push_back(
                estimator::penalty(config.penalty, config.noise, m, n, config.quad));

        parallel_for(R, [&](std::size_t r) {
            RepRecord& rec = report.replications[ni * R + r];
            rec.n = n;
            rec.rep = r;
            const std::uint64_t cell = static_cast<std::uint64_t>(ni) * R + r;
            try {
                std::vector<double> z =
                    config.process.generate(n, derive_seed(sx, cell));
                const std::vector<double> eps =
                    noise::sample(config.noise, n, derive_seed(se, cell));
                for (std::size_t i = 0; i < n; ++i) z[i] += eps[i];
                const auto sel = estimator::select_model(z, config.noise, config.penalty,
                                                         config.k_policy, config.quad);
                rec.m_hat = sel.m_hat;
                rec.k_n = sel.estimate.k_n;
                rec.contrast = sel.contrast_values;
                const auto tt = truths.get(sel.m_hat, sel.estimate.k_n);
                rec.breakdown = estimator::mise_against_truth(sel.estimate, *tt);
                rec.mise = rec.breakdown.total;
            } catch (const NumericError& e) {
                rec.failed = true;
                rec.error = e.what();
            }
        });

        std::vector<double> mises;
        mises.reserve(R);
        for (std::size_t r = 0; r < R; ++r) {
            const RepRecord& rec = report.replications[ni * R + r];
            if (rec.failed)
                ++summary.failures;
            else
                mises.push_back(rec.mise);
        }
        failures_total += summary.failures;
        if (!mises.empty()) {
            summary.mean_mise = mean_of(mises);
            summary.se_mise = se_of(mises, summary.mean_mise);
            summary.median_mise = median_of(mises);
            summary.trimmed_mean_mise = trimmed_mean_of(mises);
        } else {
            summary.mean_mise = summary.se_mise = summary.median_mise =
                summary.trimmed_mean_mise = std::numeric_limits<double>::quiet_NaN();
        }

        if (Ro > 0) {
            summary.oracle = oracle_m(config.process, config.noise, n, Ro,
                                      derive_seed(ox, ni), derive_seed(oe, ni),
                                      config.k_policy, config.quad);
            summary.oracle_mise =
                summary.oracle->mise_mean[static_cast<std::size_t>(summary.oracle->m_breve) - 1];
            summary.adaptive_oracle_ratio = summary.oracle_mise > 0.0
                                                ? summary.mean_mise / summary.oracle_mise
                                                : std::numeric_limits<double>::quiet_NaN();
        }

        try {
            summary.theoretical =
                theoretical_m_breve(truth.smoothness, config.noise.smoothness, n);
        } catch (const NumericError&) {
            summary.theoretical.reset();
        }

        report.per_n.push_back(std::move(summary));
    }

    report.valid =
        failures_total * 20 <= config.n_values.size() * R; // at most 5% failed replications

    if (config.n_values.size() >= 2) {
        std::vector<double> means;
        std::vector<int> mns;
        for (const auto& s : report.per_n) {
            means.push_back(s.mean_mise);
            mns.push_back(s.m_n);
        }
        try {
            report.rate_fit = fit_rate(config.n_values, means, mns, config.noise.smoothness,
                                       truth.smoothness);
        } catch (const ConfigError&) {
            report.rate_fit.reset();
        }
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace deconv::harness
