#include "deconv/deconv.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/estimator.hpp"
#include "core/io.hpp"
#include "core/noise.hpp"
#include "core/processes.hpp"
#include "core/targets.hpp"
#include "core/version.hpp"

struct deconv_noise {
    deconv::noise::NoiseModel model;
};
struct deconv_target {
    deconv::target::TargetDensity density;
};
struct deconv_process {
    deconv::process::DependentProcess process;
};
struct deconv_estimate {
    deconv::estimator::SelectionResult selection;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
int guarded(F&& f) {
    try {
        g_last_error.clear();
        f();
        return DECONV_OK;
    } catch (const deconv::ConfigError& e) {
        g_last_error = e.what();
        return DECONV_ERR_CONFIG;
    } catch (const deconv::IoError& e) {
        g_last_error = e.what();
        return DECONV_ERR_IO;
    } catch (const deconv::NumericError& e) {
        g_last_error = e.what();
        return DECONV_ERR_NUMERIC;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return DECONV_ERR_NUMERIC;
    } catch (...) {
        g_last_error = "unknown failure";
        return DECONV_ERR_NUMERIC;
    }
}

void require(bool ok, const char* message) {
    if (!ok) throw deconv::ConfigError(message);
}

std::map<std::string, double> param_map(const char* const* keys, const double* values,
                                        size_t n_params) {
    require(n_params == 0 || (keys && values), "parameter arrays must not be NULL");
    std::map<std::string, double> out;
    for (size_t i = 0; i < n_params; ++i) {
        require(keys[i] != nullptr, "parameter key must not be NULL");
        if (!out.emplace(keys[i], values[i]).second)
            throw deconv::ConfigError(std::string("duplicate parameter '") + keys[i] + "'");
    }
    return out;
}

deconv::estimator::PenaltyConfig make_penalty(const char* variant, double a,
                                              const double* sum_beta, const double* sum_tau) {
    require(variant != nullptr, "penalty variant must not be NULL");
    deconv::estimator::PenaltyConfig pc;
    pc.a = a;
    pc.variant = deconv::estimator::penalty_variant_from_name(variant);
    if (sum_beta) pc.sum_beta = *sum_beta;
    if (sum_tau) pc.sum_tau = *sum_tau;
    return pc;
}

deconv::io::FlatConfig merged_config(const char* config_path, const char* overrides_text) {
    deconv::io::FlatConfig flat;
    if (config_path && *config_path) flat = deconv::io::parse_config_file(config_path);
    if (overrides_text && *overrides_text)
        flat = deconv::io::merge_config(
            flat, deconv::io::parse_config_text(overrides_text, "<overrides>"));
    return flat;
}

std::string opt_path(const char* p) {
    return p ? std::string(p) : std::string();
}

} // namespace

extern "C" {

const char* deconv_version(void) {
    return deconv::kLibraryVersion;
}

const char* deconv_last_error(void) {
    return g_last_error.c_str();
}

int deconv_noise_create(const char* name, double scale, deconv_noise** out) {
    return guarded([&] {
        require(name && out, "deconv_noise_create: NULL argument");
        *out = new deconv_noise{deconv::noise::builtin_noise(name, scale)};
    });
}

void deconv_noise_destroy(deconv_noise* noise) {
    delete noise;
}

int deconv_noise_delta(const deconv_noise* noise, int m, double* out) {
    return guarded([&] {
        require(noise && out, "deconv_noise_delta: NULL argument");
        const auto d = deconv::noise::delta_m(noise->model, m);
        *out = d.representable() ? d.value() : std::numeric_limits<double>::infinity();
    });
}

int deconv_noise_log_delta(const deconv_noise* noise, int m, double* out) {
    return guarded([&] {
        require(noise && out, "deconv_noise_log_delta: NULL argument");
        *out = deconv::noise::delta_m(noise->model, m).log_value;
    });
}

int deconv_noise_gamma(const deconv_noise* noise, int m, double* out) {
    return guarded([&] {
        require(noise && out, "deconv_noise_gamma: NULL argument");
        const auto g = deconv::noise::gamma_m(noise->model.smoothness, m);
        *out = g.representable() ? g.value() : std::numeric_limits<double>::infinity();
    });
}

int deconv_noise_lambda1(const deconv_noise* noise, double kappa, double* out) {
    return guarded([&] {
        require(noise && out, "deconv_noise_lambda1: NULL argument");
        *out = deconv::noise::lambda1(noise->model.smoothness, kappa);
    });
}

int deconv_noise_lambda2(const deconv_noise* noise, double kappa0, double* out) {
    return guarded([&] {
        require(noise && out, "deconv_noise_lambda2: NULL argument");
        *out = deconv::noise::lambda2(noise->model, kappa0);
    });
}

int deconv_target_create(const char* name, const char* const* keys, const double* values,
                         size_t n_params, deconv_target** out) {
    return guarded([&] {
        require(name && out, "deconv_target_create: NULL argument");
        *out = new deconv_target{
            deconv::target::builtin_target(name, param_map(keys, values, n_params))};
    });
}

void deconv_target_destroy(deconv_target* target) {
    delete target;
}

int deconv_target_bias_tail(const deconv_target* target, int m, double* out) {
    return guarded([&] {
        require(target && out, "deconv_target_bias_tail: NULL argument");
        *out = deconv::target::bias_tail(target->density, m);
    });
}

int deconv_target_sample(const deconv_target* target, size_t n, uint64_t seed, double* out) {
    return guarded([&] {
        require(target && (out || n == 0), "deconv_target_sample: NULL argument");
        const auto draw = deconv::target::sample(target->density, n, seed);
        std::memcpy(out, draw.data(), n * sizeof(double));
    });
}

int deconv_process_create_iid(const deconv_target* target, deconv_process** out) {
    return guarded([&] {
        require(target && out, "deconv_process_create_iid: NULL argument");
        *out = new deconv_process{deconv::process::iid_process(target->density)};
    });
}

int deconv_process_create(const char* name, const char* const* keys, const double* values,
                          size_t n_params, deconv_process** out) {
    return guarded([&] {
        require(name && out, "deconv_process_create: NULL argument");
        auto params = param_map(keys, values, n_params);
        auto take = [&params](const std::string& key) -> std::optional<double> {
            const auto it = params.find(key);
            if (it == params.end()) return std::nullopt;
            const double v = it->second;
            params.erase(it);
            return v;
        };
        const std::string pname = name;
        deconv::process::DependentProcess proc;
        if (pname == "bernoulli_ar") {
            proc = deconv::process::bernoulli_ar();
        } else if (pname == "expanding_map") {
            proc = deconv::process::expanding_map();
        } else if (pname == "contractive_chain") {
            const auto kappa = take("kappa");
            const auto sigma = take("innovation_sigma");
            require(kappa && sigma,
                    "contractive_chain needs parameters kappa and innovation_sigma");
            const double burn = take("burn_in").value_or(1000.0);
            require(burn >= 0.0 && burn == std::floor(burn),
                    "burn_in must be a nonnegative integer");
            proc = deconv::process::contractive_chain(*kappa, *sigma,
                                                      static_cast<std::size_t>(burn));
        } else if (pname == "linear_process") {
            const auto sigma = take("innovation_sigma");
            require(sigma.has_value(), "linear_process needs parameter innovation_sigma");
            std::vector<double> coeffs;
            for (std::size_t j = 0;; ++j) {
                const auto c = take("coeff" + std::to_string(j));
                if (!c) break;
                coeffs.push_back(*c);
            }
            require(!coeffs.empty(), "linear_process needs coeff0..coeffK");
            proc = deconv::process::linear_process(coeffs, *sigma);
        } else {
            throw deconv::ConfigError("unknown process '" + pname + "'");
        }
        if (!params.empty())
            throw deconv::ConfigError("unknown parameter '" + params.begin()->first +
                                      "' for process '" + pname + "'");
        *out = new deconv_process{std::move(proc)};
    });
}

void deconv_process_destroy(deconv_process* process) {
    delete process;
}

int deconv_process_generate(const deconv_process* process, size_t n, uint64_t seed,
                            double* out) {
    return guarded([&] {
        require(process && (out || n == 0), "deconv_process_generate: NULL argument");
        const auto path = process->process.generate(n, seed);
        std::memcpy(out, path.data(), n * sizeof(double));
    });
}

int deconv_estimate_run(const double* z, size_t n, const deconv_noise* noise,
                        const char* penalty_variant, double a, const double* sum_beta,
                        const double* sum_tau, int exact_kn, deconv_estimate** out) {
    return guarded([&] {
        require(z && noise && out, "deconv_estimate_run: NULL argument");
        const std::vector<double> data(z, z + n);
        const auto pc = make_penalty(penalty_variant, a, sum_beta, sum_tau);
        const auto policy = exact_kn ? deconv::estimator::KnPolicy::Exact
                                     : deconv::estimator::KnPolicy::Auto;
        *out = new deconv_estimate{
            deconv::estimator::select_model(data, noise->model, pc, policy)};
    });
}

void deconv_estimate_destroy(deconv_estimate* estimate) {
    delete estimate;
}

int deconv_estimate_m_hat(const deconv_estimate* estimate, int* out) {
    return guarded([&] {
        require(estimate && out, "deconv_estimate_m_hat: NULL argument");
        *out = estimate->selection.m_hat;
    });
}

int deconv_estimate_k_n(const deconv_estimate* estimate, int* out) {
    return guarded([&] {
        require(estimate && out, "deconv_estimate_k_n: NULL argument");
        *out = estimate->selection.estimate.k_n;
    });
}

int deconv_estimate_m_n(const deconv_estimate* estimate, int* out) {
    return guarded([&] {
        require(estimate && out, "deconv_estimate_m_n: NULL argument");
        *out = estimate->selection.m_n;
    });
}

int deconv_estimate_tables(const deconv_estimate* estimate, double* contrast, double* penalties,
                           size_t cap, size_t* written) {
    return guarded([&] {
        require(estimate && written, "deconv_estimate_tables: NULL argument");
        const auto& sel = estimate->selection;
        const size_t size = sel.contrast_values.size();
        *written = size;
        if (!contrast && !penalties) return;
        require(cap >= size, "deconv_estimate_tables: buffer too small");
        if (contrast)
            std::memcpy(contrast, sel.contrast_values.data(), size * sizeof(double));
        if (penalties)
            std::memcpy(penalties, sel.penalty_values.data(), size * sizeof(double));
    });
}

int deconv_estimate_coefficients(const deconv_estimate* estimate, double* re, double* im,
                                 size_t cap, size_t* written) {
    return guarded([&] {
        require(estimate && written, "deconv_estimate_coefficients: NULL argument");
        const auto& coeffs = estimate->selection.estimate.coeffs;
        *written = coeffs.size();
        if (!re && !im) return;
        require(cap >= coeffs.size(), "deconv_estimate_coefficients: buffer too small");
        for (size_t i = 0; i < coeffs.size(); ++i) {
            if (re) re[i] = coeffs[i].real();
            if (im) im[i] = coeffs[i].imag();
        }
    });
}

int deconv_estimate_evaluate(const deconv_estimate* estimate, const double* xs, size_t count,
                             double* out) {
    return guarded([&] {
        require(estimate && (count == 0 || (xs && out)),
                "deconv_estimate_evaluate: NULL argument");
        const std::vector<double> grid(xs, xs + count);
        const auto values = deconv::estimator::evaluate(estimate->selection.estimate, grid);
        std::memcpy(out, values.data(), count * sizeof(double));
    });
}

int deconv_penalty_value(const deconv_noise* noise, const char* penalty_variant, double a,
                         const double* sum_beta, const double* sum_tau, int m, uint64_t n,
                         double* out) {
    return guarded([&] {
        require(noise && out, "deconv_penalty_value: NULL argument");
        const auto pc = make_penalty(penalty_variant, a, sum_beta, sum_tau);
        *out = deconv::estimator::penalty(pc, noise->model, m, static_cast<std::size_t>(n));
    });
}

int deconv_cmd_estimate(const char* config_path, const char* overrides_text,
                        const char* out_density_csv, const char* out_report_json) {
    return guarded([&] {
        const std::string density = opt_path(out_density_csv);
        const std::string report = opt_path(out_report_json);
        require(!density.empty() || !report.empty(),
                "deconv_cmd_estimate: need at least one output path");
        deconv::io::cmd_estimate(merged_config(config_path, overrides_text),
                                 opt_path(config_path), density, report);
    });
}

int deconv_cmd_simulate(const char* config_path, const char* overrides_text, uint64_t seed,
                        const char* out_csv) {
    return guarded([&] {
        require(out_csv && *out_csv, "deconv_cmd_simulate: output path required");
        deconv::io::cmd_simulate(merged_config(config_path, overrides_text),
                                 opt_path(config_path), seed, out_csv);
    });
}

int deconv_cmd_experiment(const char* config_path, const char* overrides_text, uint64_t seed,
                          const char* out_report_json, const char* out_summary_csv) {
    return guarded([&] {
        require(out_report_json && *out_report_json,
                "deconv_cmd_experiment: report path required");
        deconv::io::cmd_experiment(merged_config(config_path, overrides_text),
                                   opt_path(config_path), seed, out_report_json,
                                   opt_path(out_summary_csv));
    });
}

int deconv_cmd_penalties(const char* config_path, const char* overrides_text,
                         const char* out_csv) {
    return guarded([&] {
        require(out_csv && *out_csv, "deconv_cmd_penalties: output path required");
        deconv::io::cmd_penalties(merged_config(config_path, overrides_text),
                                  opt_path(config_path), out_csv);
    });
}

} // extern "C"
