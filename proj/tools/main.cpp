#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deconv/deconv.h"

namespace {

// Flags are carried verbatim into the flat config text, so the library's
// validation and precision rules apply unchanged.
struct Overrides {
    std::vector<std::string> lines;

    void set(const std::string& key, const std::string& value) {
        if (!value.empty()) lines.push_back(key + " = " + value);
    }
    void raw(const std::vector<std::string>& kvs) {
        for (const auto& kv : kvs) lines.push_back(kv);
    }
    std::string text() const {
        std::string out;
        for (const auto& l : lines) {
            out += l;
            out += '\n';
        }
        return out;
    }
};

int finish(int rc) {
    if (rc != 0) std::fprintf(stderr, "error: %s\n", deconv_last_error());
    return rc;
}

const char* c_or_null(const std::string& s) {
    return s.empty() ? nullptr : s.c_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive density deconvolution: Shannon-basis projection estimators with "
                 "penalized-contrast model selection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", []() { return std::string(deconv_version()); });

    std::string config_path;
    std::vector<std::string> sets;

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate a density from noisy samples");
    std::string est_input, est_noise, est_noise_scale, est_penalty, est_a, est_sum_beta,
        est_sum_tau, est_kn, est_grid, est_out, est_report;
    est->add_option("--config", config_path, "Flat key = value config file");
    est->add_option("--input", est_input, "Samples file, one value per line");
    est->add_option("--noise", est_noise, "Noise model name");
    est->add_option("--noise-scale", est_noise_scale, "Noise scale parameter");
    est->add_option("--penalty", est_penalty,
                    "Penalty variant: ordinary|supersmooth|refined_beta|refined_tau|no_noise");
    est->add_option("--a", est_a, "Penalty constant a > 1");
    est->add_option("--sum-beta", est_sum_beta, "Beta-coefficient sum for refined penalties");
    est->add_option("--sum-tau", est_sum_tau, "Tau-coefficient sum for refined penalties");
    est->add_option("--kn", est_kn, "Coefficient range policy: auto|exact");
    est->add_option("--grid", est_grid, "Evaluation grid lo:hi:step (use --grid=-5:5:0.01)");
    est->add_option("--out", est_out, "Density CSV output path");
    est->add_option("--report", est_report, "Selection report JSON output path");
    est->add_option("--set", sets, "Extra config overrides, key=value")->take_all();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Emit a stationary process path");
    std::string sim_process, sim_target, sim_n, sim_out;
    std::uint64_t sim_seed = 0;
    sim->add_option("--config", config_path, "Flat key = value config file");
    sim->add_option("--process", sim_process, "Process name (default iid)");
    sim->add_option("--target", sim_target, "Target density name (for iid)");
    sim->add_option("--n", sim_n, "Path length");
    sim->add_option("--seed", sim_seed, "RNG seed")->required();
    sim->add_option("--out", sim_out, "Samples CSV output path")->required();
    sim->add_option("--set", sets, "Extra config overrides, key=value")->take_all();

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo experiment");
    std::string exp_out, exp_csv;
    std::uint64_t exp_seed = 0;
    exp->add_option("--config", config_path, "Flat key = value config file")->required();
    exp->add_option("--seed", exp_seed, "RNG seed")->required();
    exp->add_option("--out", exp_out, "Report JSON output path")->required();
    exp->add_option("--csv", exp_csv, "Optional per-n summary CSV");
    exp->add_option("--set", sets, "Extra config overrides, key=value")->take_all();

    // penalties
    auto* pen = app.add_subcommand("penalties", "Tabulate Delta(m), Gamma(m), pen(m)");
    std::string pen_noise, pen_noise_scale, pen_penalty, pen_a, pen_n, pen_m_max, pen_out;
    pen->add_option("--config", config_path, "Flat key = value config file");
    pen->add_option("--noise", pen_noise, "Noise model name");
    pen->add_option("--noise-scale", pen_noise_scale, "Noise scale parameter");
    pen->add_option("--penalty", pen_penalty, "Penalty variant");
    pen->add_option("--a", pen_a, "Penalty constant a > 1");
    pen->add_option("--n", pen_n, "Sample size the table is computed for");
    pen->add_option("--m-max", pen_m_max, "Largest resolution tabulated");
    pen->add_option("--out", pen_out, "Table CSV output path")->required();
    pen->add_option("--set", sets, "Extra config overrides, key=value")->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : DECONV_ERR_CONFIG;
    }

    Overrides ov;
    if (est->parsed()) {
        ov.set("input", est_input);
        ov.set("noise.name", est_noise);
        ov.set("noise.scale", est_noise_scale);
        ov.set("penalty.variant", est_penalty);
        ov.set("penalty.a", est_a);
        ov.set("penalty.sum_beta", est_sum_beta);
        ov.set("penalty.sum_tau", est_sum_tau);
        ov.set("kn", est_kn);
        ov.set("grid", est_grid);
        ov.raw(sets);
        return finish(deconv_cmd_estimate(c_or_null(config_path), ov.text().c_str(),
                                          c_or_null(est_out), c_or_null(est_report)));
    }
    if (sim->parsed()) {
        ov.set("process.name", sim_process);
        ov.set("target.name", sim_target);
        ov.set("n", sim_n);
        ov.raw(sets);
        return finish(deconv_cmd_simulate(c_or_null(config_path), ov.text().c_str(), sim_seed,
                                          sim_out.c_str()));
    }
    if (exp->parsed()) {
        ov.raw(sets);
        return finish(deconv_cmd_experiment(c_or_null(config_path), ov.text().c_str(), exp_seed,
                                            exp_out.c_str(), c_or_null(exp_csv)));
    }
    if (pen->parsed()) {
        ov.set("noise.name", pen_noise);
        ov.set("noise.scale", pen_noise_scale);
        ov.set("penalty.variant", pen_penalty);
        ov.set("penalty.a", pen_a);
        ov.set("n", pen_n);
        ov.set("m_max", pen_m_max);
        ov.raw(sets);
        return finish(deconv_cmd_penalties(c_or_null(config_path), ov.text().c_str(),
                                           pen_out.c_str()));
    }
    return DECONV_ERR_CONFIG;
}
