#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "core/harness.hpp"

namespace deconv::io {

// Flat key = value configuration: '#' comments, [section] prefixes keys with
// "section.", no quoting.  Duplicate keys within one source are errors;
// merge_config lets the override source replace base keys.
using FlatConfig = std::map<std::string, std::string>;

FlatConfig parse_config_text(const std::string& text, const std::string& origin = "<inline>");
FlatConfig parse_config_file(const std::string& path);
FlatConfig merge_config(FlatConfig base, const FlatConfig& overrides);

// Typed, consumption-tracked view over a FlatConfig.  finish() rejects any
// key never consumed, naming it.
class ConfigView {
public:
    explicit ConfigView(FlatConfig flat) : kv_(std::move(flat)) {
        echo_.assign(kv_.begin(), kv_.end());
    }

    std::optional<std::string> take(const std::string& key);
    std::string require(const std::string& key);
    double take_double(const std::string& key, double fallback);
    std::optional<double> take_double_opt(const std::string& key);
    std::uint64_t take_u64(const std::string& key, std::uint64_t fallback);
    int take_int(const std::string& key, int fallback);
    // Consumes every key with the given "section." prefix; returns suffix -> value.
    std::map<std::string, double> take_section_params(const std::string& prefix);
    void finish() const;

    // Sorted (key, value) list of the full original config, for report echo.
    std::vector<std::pair<std::string, std::string>> echo() const { return echo_; }

private:
    FlatConfig kv_;
    std::set<std::string> used_;
    std::vector<std::pair<std::string, std::string>> echo_;
};

double parse_double(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);
std::vector<double> parse_double_list(const std::string& key, const std::string& value);
std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& value);
// "lo:hi:step" with step > 0, hi > lo; inclusive endpoint when it lands on the grid.
std::vector<double> parse_grid(const std::string& key, const std::string& value);

// One real per line, optional single non-numeric header, blank lines skipped.
// Malformed or non-finite entries raise IoError citing the line number.
std::vector<double> read_samples(const std::string& path);

void write_samples_csv(const std::string& path, const std::vector<double>& values);
void write_density_csv(const std::string& path, const std::vector<double>& xs,
                       const std::vector<double>& ys);

// 64-bit FNV-1a over the file bytes, 16 lowercase hex digits.
std::string digest_hex(const std::string& path);

// Sidecar <out>.manifest.json: command, seed, version, timestamp, and a
// digest per input/output file.  The manifest is the only artifact carrying
// wall-clock data; reports themselves stay byte-deterministic.
void write_manifest(const std::string& primary_output, const std::string& command,
                    std::optional<std::uint64_t> seed,
                    const std::vector<std::string>& input_paths,
                    const std::vector<std::string>& output_paths);

// Config-driven builders (shared by the commands).
noise::NoiseModel build_noise(ConfigView& view);
target::TargetDensity build_target(ConfigView& view);
process::DependentProcess build_process(ConfigView& view, const target::TargetDensity& t);
estimator::PenaltyConfig build_penalty(ConfigView& view, const noise::NoiseModel& noise,
                                       const process::DependentProcess* process,
                                       std::size_t horizon_n);
estimator::KnPolicy parse_kn_policy(const std::string& value);
quad::QuadratureSpec build_quad(ConfigView& view);
harness::ExperimentConfig build_experiment_config(const FlatConfig& flat, std::uint64_t seed);

std::string experiment_report_json(const harness::ExperimentReport& report);
void write_experiment_summary_csv(const std::string& path,
                                  const harness::ExperimentReport& report);

// Command cores shared by the C API and (through it) the CLI.  config_path
// may be empty; it is recorded in the manifest when given.
void cmd_estimate(const FlatConfig& flat, const std::string& config_path,
                  const std::string& out_density_csv, const std::string& out_report_json);
void cmd_simulate(const FlatConfig& flat, const std::string& config_path, std::uint64_t seed,
                  const std::string& out_csv);
void cmd_experiment(const FlatConfig& flat, const std::string& config_path, std::uint64_t seed,
                    const std::string& out_report_json, const std::string& out_summary_csv);
void cmd_penalties(const FlatConfig& flat, const std::string& config_path,
                   const std::string& out_csv);

} // namespace deconv::io
