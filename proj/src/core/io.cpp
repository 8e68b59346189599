#include "core/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/version.hpp"

namespace deconv::io {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') return false;
    return true;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    return f;
}

void reject_seed_keys(const FlatConfig& flat) {
    for (const auto& [k, v] : flat)
        if (k == "seed" || (k.size() > 5 && k.compare(k.size() - 5, 5, ".seed") == 0))
            throw ConfigError("config key '" + k +
                              "' is not allowed; seeds come from the --seed flag only");
}

// Sum_{k=1}^{n} bound(k) with early exit once increments stop mattering.
double coefficient_sum(const std::function<double(int)>& bound, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double term = bound(static_cast<int>(std::min<std::size_t>(k, 1000000)));
        acc += term;
        if (term < 1e-16 * std::max(acc, 1.0)) break;
    }
    return acc;
}

json breakdown_json(const estimator::MiseBreakdown& b) {
    return json{{"total", b.total},
                {"projection_error", b.projection_error},
                {"tail_bias", b.tail_bias}};
}

std::string iso_timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

FlatConfig parse_config_text(const std::string& text, const std::string& origin) {
    FlatConfig out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!valid_key(section))
                throw ConfigError(origin + ":" + std::to_string(line_no) +
                                  ": invalid section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key))
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": invalid key '" + key +
                              "'");
        if (value.empty())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty value for '" +
                              key + "'");
        if (!section.empty()) key = section + "." + key;
        if (!out.emplace(key, value).second)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                              "'");
    }
    return out;
}

FlatConfig parse_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), path);
}

FlatConfig merge_config(FlatConfig base, const FlatConfig& overrides) {
    for (const auto& [k, v] : overrides) base[k] = v;
    return base;
}

std::optional<std::string> ConfigView::take(const std::string& key) {
    used_.insert(key);
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
}

std::string ConfigView::require(const std::string& key) {
    const auto v = take(key);
    if (!v) throw ConfigError("missing required config key '" + key + "'");
    return *v;
}

double ConfigView::take_double(const std::string& key, double fallback) {
    const auto v = take(key);
    return v ? parse_double(key, *v) : fallback;
}

std::optional<double> ConfigView::take_double_opt(const std::string& key) {
    const auto v = take(key);
    if (!v) return std::nullopt;
    return parse_double(key, *v);
}

std::uint64_t ConfigView::take_u64(const std::string& key, std::uint64_t fallback) {
    const auto v = take(key);
    return v ? parse_u64(key, *v) : fallback;
}

int ConfigView::take_int(const std::string& key, int fallback) {
    const auto v = take(key);
    if (!v) return fallback;
    const std::uint64_t u = parse_u64(key, *v);
    if (u > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
        throw ConfigError("config key '" + key + "': value out of range");
    return static_cast<int>(u);
}

std::map<std::string, double> ConfigView::take_section_params(const std::string& prefix) {
    std::map<std::string, double> out;
    for (const auto& [k, v] : kv_) {
        if (k.size() <= prefix.size() || k.compare(0, prefix.size(), prefix) != 0) continue;
        if (used_.count(k)) continue;
        used_.insert(k);
        out.emplace(k.substr(prefix.size()), parse_double(k, v));
    }
    return out;
}

void ConfigView::finish() const {
    for (const auto& [k, v] : kv_)
        if (!used_.count(k)) throw ConfigError("unknown config key '" + k + "'");
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (!end || *end != '\0' || value.empty())
        throw ConfigError("config key '" + key + "': '" + value + "' is not a number");
    if (!std::isfinite(v))
        throw ConfigError("config key '" + key + "': value must be finite");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    if (value.empty() || value[0] == '-')
        throw ConfigError("config key '" + key + "': '" + value +
                          "' is not a nonnegative integer");
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (!end || *end != '\0')
        throw ConfigError("config key '" + key + "': '" + value +
                          "' is not a nonnegative integer");
    return v;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& piece : split(value, ',')) out.push_back(parse_double(key, trim(piece)));
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& value) {
    std::vector<std::size_t> out;
    for (const auto& piece : split(value, ','))
        out.push_back(static_cast<std::size_t>(parse_u64(key, trim(piece))));
    return out;
}

std::vector<double> parse_grid(const std::string& key, const std::string& value) {
    const auto parts = split(value, ':');
    if (parts.size() != 3)
        throw ConfigError("config key '" + key + "': expected lo:hi:step");
    const double lo = parse_double(key, trim(parts[0]));
    const double hi = parse_double(key, trim(parts[1]));
    const double step = parse_double(key, trim(parts[2]));
    if (!(step > 0.0) || !(hi > lo))
        throw ConfigError("config key '" + key + "': need hi > lo and step > 0");
    const std::size_t count = static_cast<std::size_t>((hi - lo) / step + 1e-9) + 1;
    if (count > 10000000) throw ConfigError("config key '" + key + "': grid too large");
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
    return out;
}

std::vector<double> read_samples(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open samples file '" + path + "'");
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    bool seen_value = false;
    while (std::getline(f, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (!end || *end != '\0') {
            if (!seen_value && out.empty()) continue; // single leading header allowed
            throw IoError(path + ":" + std::to_string(line_no) + ": '" + line +
                          "' is not a number");
        }
        if (!std::isfinite(v))
            throw IoError(path + ":" + std::to_string(line_no) +
                          ": non-finite sample rejected");
        out.push_back(v);
        seen_value = true;
    }
    if (out.empty()) throw IoError(path + ": no samples found");
    return out;
}

void write_samples_csv(const std::string& path, const std::vector<double>& values) {
    auto f = open_for_write(path);
    f << "x\n";
    for (double v : values) f << fmt17(v) << "\n";
    if (!f) throw IoError("write failed for '" + path + "'");
}

void write_density_csv(const std::string& path, const std::vector<double>& xs,
                       const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw ConfigError("write_density_csv: column length mismatch");
    auto f = open_for_write(path);
    f << "x,ghat\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        f << fmt17(xs[i]) << "," << fmt17(ys[i]) << "\n";
    if (!f) throw IoError("write failed for '" + path + "'");
}

std::string digest_hex(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for digest");
    std::uint64_t h = 14695981039346656037ull;
    char buf[4096];
    for (;;) {
        f.read(buf, sizeof(buf));
        const std::streamsize got = f.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

void write_manifest(const std::string& primary_output, const std::string& command,
                    std::optional<std::uint64_t> seed,
                    const std::vector<std::string>& input_paths,
                    const std::vector<std::string>& output_paths) {
    json m;
    m["command"] = command;
    m["library_version"] = kLibraryVersion;
    m["timestamp"] = iso_timestamp_utc();
    if (seed)
        m["seed"] = *seed;
    else
        m["seed"] = nullptr;
    json inputs = json::object();
    for (const auto& p : input_paths)
        if (!p.empty()) inputs[p] = digest_hex(p);
    json outputs = json::object();
    for (const auto& p : output_paths)
        if (!p.empty()) outputs[p] = digest_hex(p);
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    auto f = open_for_write(primary_output + ".manifest.json");
    f << m.dump(2) << "\n";
    if (!f) throw IoError("write failed for '" + primary_output + ".manifest.json'");
}

noise::NoiseModel build_noise(ConfigView& view) {
    const std::string name = view.require("noise.name");
    const double scale = view.take_double("noise.scale", 1.0);
    return noise::builtin_noise(name, scale);
}

target::TargetDensity build_target(ConfigView& view) {
    const std::string name = view.require("target.name");
    const auto params = view.take_section_params("target.");
    return target::builtin_target(name, params);
}

namespace {

process::DependentProcess build_process_named(const std::string& name, ConfigView& view,
                                              const target::TargetDensity* t) {
    if (name == "iid") {
        if (!t) throw ConfigError("process 'iid' requires a [target] section");
        return process::iid_process(*t);
    }
    if (name == "bernoulli_ar") return process::bernoulli_ar();
    if (name == "expanding_map") return process::expanding_map();
    if (name == "contractive_chain") {
        const double kappa = parse_double("process.kappa", view.require("process.kappa"));
        const double sigma =
            parse_double("process.innovation_sigma", view.require("process.innovation_sigma"));
        const std::uint64_t burn = view.take_u64("process.burn_in", 1000);
        return process::contractive_chain(kappa, sigma, static_cast<std::size_t>(burn));
    }
    if (name == "linear_process") {
        const auto coeffs =
            parse_double_list("process.coeffs", view.require("process.coeffs"));
        const double sigma =
            parse_double("process.innovation_sigma", view.require("process.innovation_sigma"));
        return process::linear_process(coeffs, sigma);
    }
    throw ConfigError("unknown process '" + name +
                      "' (expected iid, bernoulli_ar, contractive_chain, linear_process, "
                      "expanding_map)");
}

} // namespace

process::DependentProcess build_process(ConfigView& view, const target::TargetDensity& t) {
    const std::string name = view.take("process.name").value_or("iid");
    return build_process_named(name, view, &t);
}

estimator::PenaltyConfig build_penalty(ConfigView& view, const noise::NoiseModel& noise,
                                       const process::DependentProcess* process,
                                       std::size_t horizon_n) {
    estimator::PenaltyConfig pc;
    pc.a = view.take_double("penalty.a", 1.5);
    const std::string fallback = noise.is_none ? "no_noise" : "supersmooth";
    pc.variant =
        estimator::penalty_variant_from_name(view.take("penalty.variant").value_or(fallback));
    pc.sum_beta = view.take_double_opt("penalty.sum_beta");
    pc.sum_tau = view.take_double_opt("penalty.sum_tau");
    const bool needs_beta = pc.variant == estimator::PenaltyVariant::RefinedBeta ||
                            pc.variant == estimator::PenaltyVariant::NoNoise;
    const bool needs_tau = pc.variant == estimator::PenaltyVariant::RefinedTau;
    // Unset coefficient sums fall back to the process's analytic bounds over
    // the horizon, or to 0 (independence) when no process is in play.
    if (needs_beta && !pc.sum_beta) {
        if (process && process->beta_bound)
            pc.sum_beta = coefficient_sum(process->beta_bound, horizon_n);
        else if (process && process->tau_bound)
            throw ConfigError("penalty variant needs sum_beta but the process provides only a "
                              "tau bound; set penalty.sum_beta explicitly");
        else
            pc.sum_beta = 0.0;
    }
    if (needs_tau && !pc.sum_tau) {
        if (process && process->tau_bound)
            pc.sum_tau = coefficient_sum(process->tau_bound, horizon_n);
        else if (process)
            throw ConfigError("penalty variant needs sum_tau but the process provides no tau "
                              "bound; set penalty.sum_tau explicitly");
        else
            pc.sum_tau = 0.0;
    }
    return pc;
}

estimator::KnPolicy parse_kn_policy(const std::string& value) {
    if (value == "auto") return estimator::KnPolicy::Auto;
    if (value == "exact") return estimator::KnPolicy::Exact;
    throw ConfigError("k_n policy must be 'auto' or 'exact', got '" + value + "'");
}

quad::QuadratureSpec build_quad(ConfigView& view) {
    quad::QuadratureSpec spec;
    spec.rel_tol = view.take_double("quad.rel_tol", spec.rel_tol);
    spec.abs_tol = view.take_double("quad.abs_tol", spec.abs_tol);
    spec.max_depth = view.take_int("quad.max_depth", spec.max_depth);
    const std::uint64_t nodes = view.take_u64("quad.max_nodes", spec.max_nodes);
    spec.max_nodes = static_cast<std::size_t>(nodes);
    if (!(spec.rel_tol > 0.0) || !(spec.abs_tol > 0.0))
        throw ConfigError("quad tolerances must be positive");
    return spec;
}

harness::ExperimentConfig build_experiment_config(const FlatConfig& flat, std::uint64_t seed) {
    reject_seed_keys(flat);
    ConfigView view(flat);
    harness::ExperimentConfig cfg;
    cfg.target = build_target(view);
    cfg.noise = build_noise(view);
    cfg.process = build_process(view, cfg.target);
    cfg.n_values = parse_size_list("experiment.n_values", view.require("experiment.n_values"));
    cfg.replications = view.take_u64("experiment.replications", 1);
    // Oracle runs with the same replication count unless overridden; 0 disables it.
    cfg.oracle_replications =
        view.take_u64("experiment.oracle_replications", cfg.replications);
    cfg.k_policy = parse_kn_policy(view.take("experiment.kn").value_or("auto"));
    const std::size_t horizon = cfg.n_values.empty() ? 0 : cfg.n_values.back();
    cfg.penalty = build_penalty(view, cfg.noise, &cfg.process, horizon);
    cfg.quad = build_quad(view);
    cfg.seed = seed;
    cfg.config_echo = view.echo();
    view.finish();
    return cfg;
}

std::string experiment_report_json(const harness::ExperimentReport& report) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["library_version"] = kLibraryVersion;
    j["command"] = "experiment";
    j["seed"] = report.seed;
    j["valid"] = report.valid;
    j["kappa_a"] = report.kappa_a_value;
    j["c_a"] = report.c_a_value;
    json echo = json::object();
    for (const auto& [k, v] : report.config_echo) echo[k] = v;
    j["config"] = echo;

    json per_n = json::array();
    for (const auto& s : report.per_n) {
        json e;
        e["n"] = s.n;
        e["m_n"] = s.m_n;
        e["grid_clamped"] = s.grid_clamped;
        e["penalty_table"] = s.penalty_table;
        e["failures"] = s.failures;
        e["mean_mise"] = s.mean_mise;
        e["median_mise"] = s.median_mise;
        e["trimmed_mean_mise"] = s.trimmed_mean_mise;
        e["se_mise"] = s.se_mise;
        if (s.oracle) {
            json o;
            o["m_breve"] = s.oracle->m_breve;
            o["m_n"] = s.oracle->m_n;
            o["mise_mean"] = s.oracle->mise_mean;
            o["mise_se"] = s.oracle->mise_se;
            o["replications"] = s.oracle->replications;
            o["failures"] = s.oracle->failures;
            e["oracle"] = o;
            e["oracle_mise"] = s.oracle_mise;
            e["adaptive_oracle_ratio"] = s.adaptive_oracle_ratio;
        } else {
            e["oracle"] = nullptr;
        }
        if (s.theoretical) {
            json t;
            t["m"] = s.theoretical->m;
            t["pi_m_breve"] = s.theoretical->pi_m_breve;
            t["rate_known"] = s.theoretical->rate_known;
            if (s.theoretical->rate_known) t["rate"] = s.theoretical->rate;
            e["theoretical"] = t;
        } else {
            e["theoretical"] = nullptr;
        }
        per_n.push_back(std::move(e));
    }
    j["per_n"] = per_n;

    if (report.rate_fit) {
        json r;
        r["slope"] = report.rate_fit->slope;
        r["se"] = report.rate_fit->se;
        r["points_used"] = report.rate_fit->points_used;
        r["regressor"] = report.rate_fit->regressor;
        j["rate_fit"] = r;
    } else {
        j["rate_fit"] = nullptr;
    }

    json reps = json::array();
    for (const auto& rec : report.replications) {
        json e;
        e["n"] = rec.n;
        e["rep"] = rec.rep;
        e["failed"] = rec.failed;
        if (rec.failed) {
            e["error"] = rec.error;
        } else {
            e["m_hat"] = rec.m_hat;
            e["k_n"] = rec.k_n;
            e["mise"] = rec.mise;
            e["breakdown"] = breakdown_json(rec.breakdown);
            e["contrast"] = rec.contrast;
        }
        reps.push_back(std::move(e));
    }
    j["replications"] = reps;
    return j.dump(2) + "\n";
}

void write_experiment_summary_csv(const std::string& path,
                                  const harness::ExperimentReport& report) {
    auto f = open_for_write(path);
    f << "n,m_n,failures,mean_mise,median_mise,trimmed_mean_mise,se_mise,"
         "oracle_m_breve,oracle_mise,adaptive_oracle_ratio,theoretical_m\n";
    for (const auto& s : report.per_n) {
        f << s.n << "," << s.m_n << "," << s.failures << "," << fmt17(s.mean_mise) << ","
          << fmt17(s.median_mise) << "," << fmt17(s.trimmed_mean_mise) << ","
          << fmt17(s.se_mise) << ",";
        if (s.oracle)
            f << s.oracle->m_breve << "," << fmt17(s.oracle_mise) << ","
              << fmt17(s.adaptive_oracle_ratio);
        else
            f << ",,";
        f << ",";
        if (s.theoretical) f << s.theoretical->m;
        f << "\n";
    }
    if (!f) throw IoError("write failed for '" + path + "'");
}

void cmd_estimate(const FlatConfig& flat, const std::string& config_path,
                  const std::string& out_density_csv, const std::string& out_report_json) {
    reject_seed_keys(flat);
    ConfigView view(flat);
    const std::string input = view.require("input");
    const std::vector<double> z = read_samples(input);
    const auto noise = build_noise(view);
    const auto k_policy = parse_kn_policy(view.take("kn").value_or("auto"));
    const auto spec = build_quad(view);
    const auto penalty = build_penalty(view, noise, nullptr, z.size());
    const auto grid_key = view.take("grid");
    view.finish();

    const auto sel = estimator::select_model(z, noise, penalty, k_policy, spec);

    std::vector<double> grid;
    if (grid_key) {
        grid = parse_grid("grid", *grid_key);
    } else {
        const auto [lo_it, hi_it] = std::minmax_element(z.begin(), z.end());
        const double lo = std::floor(*lo_it - 1.0);
        const double hi = std::ceil(*hi_it + 1.0);
        grid.resize(513);
        for (std::size_t i = 0; i < grid.size(); ++i)
            grid[i] = lo + (hi - lo) * static_cast<double>(i) / 512.0;
    }
    double max_imag = 0.0;
    const auto ghat = estimator::evaluate(sel.estimate, grid, &max_imag);
    if (!out_density_csv.empty()) write_density_csv(out_density_csv, grid, ghat);

    if (!out_report_json.empty()) {
        json j;
        j["schema_version"] = kReportSchemaVersion;
        j["library_version"] = kLibraryVersion;
        j["command"] = "estimate";
        j["n"] = z.size();
        j["m_hat"] = sel.m_hat;
        j["m_n"] = sel.m_n;
        j["grid_clamped"] = sel.grid_clamped;
        j["k_n"] = sel.estimate.k_n;
        j["contrast"] = sel.contrast_values;
        j["penalty_table"] = sel.penalty_values;
        j["norm_sq"] = sel.estimate.norm_sq();
        j["max_imag"] = max_imag;
        j["penalty"] = {{"a", penalty.a},
                        {"variant", estimator::penalty_variant_name(penalty.variant)}};
        if (penalty.sum_beta) j["penalty"]["sum_beta"] = *penalty.sum_beta;
        if (penalty.sum_tau) j["penalty"]["sum_tau"] = *penalty.sum_tau;
        json echo = json::object();
        for (const auto& [k, v] : view.echo()) echo[k] = v;
        j["config"] = echo;
        auto f = open_for_write(out_report_json);
        f << j.dump(2) << "\n";
        if (!f) throw IoError("write failed for '" + out_report_json + "'");
    }

    const std::string primary = out_report_json.empty() ? out_density_csv : out_report_json;
    if (!primary.empty())
        write_manifest(primary, "estimate", std::nullopt, {config_path, input},
                       {out_density_csv, out_report_json});
}

void cmd_simulate(const FlatConfig& flat, const std::string& config_path, std::uint64_t seed,
                  const std::string& out_csv) {
    reject_seed_keys(flat);
    ConfigView view(flat);
    const std::string pname = view.take("process.name").value_or("iid");
    process::DependentProcess proc;
    if (pname == "iid") {
        const auto t = build_target(view);
        proc = process::iid_process(t);
    } else {
        proc = build_process_named(pname, view, nullptr);
    }
    const std::uint64_t n = view.take_u64("n", 0);
    view.finish();
    if (n == 0) throw ConfigError("simulate: config key 'n' must be a positive sample count");
    const auto path = proc.generate(static_cast<std::size_t>(n), seed);
    write_samples_csv(out_csv, path);
    write_manifest(out_csv, "simulate", seed, {config_path}, {out_csv});
}

void cmd_experiment(const FlatConfig& flat, const std::string& config_path, std::uint64_t seed,
                    const std::string& out_report_json, const std::string& out_summary_csv) {
    const auto cfg = build_experiment_config(flat, seed);
    const auto report = harness::run_experiment(cfg);
    auto f = open_for_write(out_report_json);
    f << experiment_report_json(report);
    if (!f) throw IoError("write failed for '" + out_report_json + "'");
    f.close();
    if (!out_summary_csv.empty()) write_experiment_summary_csv(out_summary_csv, report);
    write_manifest(out_report_json, "experiment", seed, {config_path},
                   {out_report_json, out_summary_csv});
}

void cmd_penalties(const FlatConfig& flat, const std::string& config_path,
                   const std::string& out_csv) {
    reject_seed_keys(flat);
    ConfigView view(flat);
    const auto noise = build_noise(view);
    const std::uint64_t n = view.take_u64("n", 0);
    if (n < 2) throw ConfigError("penalties: config key 'n' must be >= 2");
    const auto penalty = build_penalty(view, noise, nullptr, static_cast<std::size_t>(n));
    const int m_default = estimator::m_grid_max(noise, static_cast<std::size_t>(n));
    const int m_max = view.take_int("m_max", m_default);
    const auto spec = build_quad(view);
    view.finish();
    if (m_max < 1) throw ConfigError("penalties: m_max must be >= 1");

    auto f = open_for_write(out_csv);
    f << "m,delta,gamma,pen\n";
    for (int m = 1; m <= m_max; ++m) {
        const LogValue d = noise::has_delta_closed_form(noise)
                               ? noise::delta_m_closed_form(noise, m)
                               : noise::delta_m(noise, m, spec);
        const LogValue g = noise::gamma_m(noise.smoothness, m);
        const double dv =
            d.representable() ? d.value() : std::numeric_limits<double>::infinity();
        const double gv =
            g.representable() ? g.value() : std::numeric_limits<double>::infinity();
        f << m << "," << fmt17(dv) << "," << fmt17(gv) << ","
          << fmt17(estimator::penalty(penalty, noise, m, static_cast<std::size_t>(n), spec))
          << "\n";
    }
    if (!f) throw IoError("write failed for '" + out_csv + "'");
    f.close();
    write_manifest(out_csv, "penalties", std::nullopt, {config_path}, {out_csv});
}

} // namespace deconv::io
