// Acceptance gate: ten numbered checks, each printing one PASS/FAIL line.
// Run with a criterion number (1..10) or "all".  Exit code is the number of
// failed checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core/estimator.hpp"
#include "core/harness.hpp"
#include "core/noise.hpp"
#include "core/processes.hpp"
#include "core/rng.hpp"
#include "core/shannon.hpp"
#include "core/targets.hpp"
#include "support/oracles.hpp"

using namespace deconv;
using oracle::kPi;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

// ---------------------------------------------------------------------------
// 1. Basis identities: orthonormality within 1e-8 (m <= 4, |j| <= 3) and
//    sum_j phi^2 -> m with the lemma's 2m/(pi^2 J) envelope at random points.
Outcome criterion1() {
    Outcome out;
    for (int m = 1; m <= 4; ++m) {
        for (long long j = -3; j <= 3; ++j) {
            for (long long jp = j; jp <= 3; ++jp) {
                const auto val = oracle::simpson(
                    [&](double x) {
                        return shannon::phi_fourier(m, j, x) *
                               std::conj(shannon::phi_fourier(m, jp, x));
                    },
                    -kPi * m, kPi * m, 20000);
                const double got = (val / (2.0 * kPi)).real();
                const double want = (j == jp) ? 1.0 : 0.0;
                std::ostringstream ss;
                ss << "inner product m=" << m << " j=" << j << " j'=" << jp << " got " << got;
                out.require(std::abs(got - want) <= 1e-8, ss.str());
                out.require(std::abs((val / (2.0 * kPi)).imag()) <= 1e-8, ss.str() + " (imag)");
            }
        }
    }
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ux(-6.0, 6.0);
    const long long J = 3000;
    for (int m = 1; m <= 4; ++m) {
        for (int t = 0; t < 20; ++t) {
            const double x = ux(rng);
            const auto s = shannon::sum_phi_squared(m, x, J);
            const double envelope = 2.0 * m / (kPi * kPi * static_cast<double>(J));
            std::ostringstream ss;
            ss << "sum phi^2 m=" << m << " x=" << x << " err " << std::abs(s.value - m)
               << " envelope " << envelope;
            out.require(std::abs(s.value - m) <= envelope, ss.str());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// 2. Delta(m): quadrature vs closed forms within 1e-8 relative for m <= 50,
//    and the lambda1/Gamma sandwich in log space from some m0 <= 20 to 50.
Outcome criterion2() {
    Outcome out;
    auto none = noise::builtin_noise("none");
    for (int m = 1; m <= 50; ++m)
        out.require(noise::delta_m(none, m).value() == static_cast<double>(m),
                    "noise-free Delta(" + std::to_string(m) + ") != m");

    auto laplace = noise::builtin_noise("laplace", 1.0);
    for (int m = 1; m <= 50; ++m) {
        const double got = noise::delta_m_quadrature(laplace, m).value();
        const double t = kPi * m;
        const double want = (t + 2.0 * t * t * t / 3.0 + std::pow(t, 5) / 5.0) / kPi;
        out.require(oracle::rel_diff(got, want) <= 1e-8,
                    "laplace Delta(" + std::to_string(m) + ") quadrature off by " +
                        std::to_string(oracle::rel_diff(got, want)));
    }

    for (const char* name : {"gaussian", "cauchy", "laplace", "log_chi_squared", "none"}) {
        auto model = noise::builtin_noise(name, 1.0);
        const auto& s = model.smoothness;
        const double lo_c = std::log(0.5 * noise::lambda1(s, s.kappa0_prime));
        const double hi_c = std::log(2.0 * noise::lambda1(s, s.kappa0));
        std::vector<double> ld(51), lg(51);
        for (int m = 1; m <= 50; ++m) {
            ld[static_cast<std::size_t>(m)] = noise::delta_m(model, m).log_value;
            lg[static_cast<std::size_t>(m)] = noise::gamma_m(s, m).log_value;
        }
        int m0 = 0;
        for (int m = 1; m <= 20 && m0 == 0; ++m) {
            bool all = true;
            for (int mm = m; mm <= 50 && all; ++mm) {
                const double l = ld[static_cast<std::size_t>(mm)];
                const double g = lg[static_cast<std::size_t>(mm)];
                all = l >= lo_c + g - 1e-9 && l <= hi_c + g + 1e-9;
            }
            if (all) m0 = m;
        }
        out.require(m0 != 0, std::string("sandwich fails for ") + name +
                                 " on every start m0 <= 20");
    }
    return out;
}

// ---------------------------------------------------------------------------
// 3. Kernel ceiling |u*_{phi_{m,j}}(z)| <= sqrt(Delta(m)) (1 + 1e-6) over 200
//    random (j, z) per noise and m in {1, 2, 4}.
Outcome criterion3() {
    Outcome out;
    std::mt19937_64 rng(303);
    std::uniform_int_distribution<int> ij(-12, 12);
    std::uniform_real_distribution<double> uz(-8.0, 8.0);
    for (const char* name : {"gaussian", "cauchy", "laplace", "log_chi_squared", "none"}) {
        auto model = noise::builtin_noise(name, 1.0);
        for (int m : {1, 2, 4}) {
            const double ceiling = std::sqrt(noise::delta_m(model, m).value()) * (1.0 + 1e-6);
            for (int t = 0; t < 200; ++t) {
                const int j = ij(rng);
                const double z = uz(rng);
                const double v = std::abs(estimator::u_star_kernel(model, m, j, z));
                if (v > ceiling) {
                    std::ostringstream ss;
                    ss << name << " m=" << m << " j=" << j << " z=" << z << ": |u*| = " << v
                       << " > " << ceiling;
                    out.require(false, ss.str());
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// 4. Noise-free reduction: fitted coefficients equal (1/n) sum_i phi(X_i)
//    within 1e-7 for n = 100, m <= 4, |j| <= 200.
Outcome criterion4() {
    Outcome out;
    auto none = noise::builtin_noise("none");
    auto x = target::sample(target::builtin_target("mixture_gaussian"), 100, 404);
    for (int m = 1; m <= 4; ++m) {
        const auto est = estimator::fit_coefficients(x, none, m, 200);
        for (int j = -200; j <= 200; ++j) {
            double avg = 0.0;
            for (double xi : x) avg += shannon::phi(m, j, xi);
            avg /= static_cast<double>(x.size());
            const auto got = est.at(j);
            if (std::abs(got.real() - avg) > 1e-7 || std::abs(got.imag()) > 1e-7) {
                std::ostringstream ss;
                ss << "m=" << m << " j=" << j << " got (" << got.real() << "," << got.imag()
                   << ") want " << avg;
                out.require(false, ss.str());
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// 5. Unbiasedness: gaussian target + laplace noise, n = 500, m = 2; the Monte
//    Carlo mean of a-hat_{2,j} over 2000 replications is within 3 standard
//    errors of <g, phi_{2,j}> for j in {-2..2}.
Outcome criterion5() {
    Outcome out;
    auto g = target::builtin_target("gaussian");
    auto eps = noise::builtin_noise("laplace", 1.0);
    const std::size_t n = 500, reps = 2000;
    const int m = 2, k = 2;

    const auto truth = estimator::truth_table(g, m, k);

    std::vector<std::vector<double>> re(2 * k + 1), im(2 * k + 1);
    for (auto& v : re) v.reserve(reps);
    for (auto& v : im) v.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        auto x = target::sample(g, n, derive_seed(505, 2 * r));
        auto e = noise::sample(eps, n, derive_seed(505, 2 * r + 1));
        for (std::size_t i = 0; i < n; ++i) x[i] += e[i];
        const auto est = estimator::fit_coefficients(x, eps, m, k);
        for (int j = -k; j <= k; ++j) {
            re[static_cast<std::size_t>(j + k)].push_back(est.at(j).real());
            im[static_cast<std::size_t>(j + k)].push_back(est.at(j).imag());
        }
    }
    // A degenerate component (the laplace kernel is real, so every imaginary
    // part is roundoff) gets an absolute floor instead of a z-test.
    auto close = [](const std::vector<double>& v, double want) {
        const double dev = std::abs(oracle::mean(v) - want);
        return dev <= std::max(3.0 * oracle::stderr_of_mean(v), 1e-10);
    };
    for (int j = -k; j <= k; ++j) {
        const auto& rj = re[static_cast<std::size_t>(j + k)];
        const auto& ij = im[static_cast<std::size_t>(j + k)];
        std::ostringstream ss;
        ss << "j=" << j << " mean (" << oracle::mean(rj) << ", " << oracle::mean(ij)
           << ") truth (" << truth.at(j).real() << ", " << truth.at(j).imag() << ")";
        out.require(close(rj, truth.at(j).real()), ss.str() + " [real]");
        out.require(close(ij, truth.at(j).imag()), ss.str() + " [imag]");
    }
    return out;
}

harness::ExperimentConfig criterion6_config(bool dependent) {
    harness::ExperimentConfig cfg;
    cfg.target = target::builtin_target(dependent ? "uniform01" : "gaussian");
    cfg.noise = noise::builtin_noise("laplace", 1.0);
    cfg.process = dependent ? process::bernoulli_ar() : process::iid_process(cfg.target);
    cfg.n_values = {1000, 4000};
    cfg.replications = 200;
    cfg.oracle_replications = 200;
    cfg.penalty.a = 2.0;
    cfg.penalty.variant = estimator::PenaltyVariant::Ordinary;
    cfg.seed = 606;
    return cfg;
}

// ---------------------------------------------------------------------------
// 6. Adaptive vs oracle for i.i.d. inputs: mean adaptive MISE <= 4x the
//    brute-force oracle MISE at n in {1000, 4000}.
Outcome criterion6() {
    Outcome out;
    const auto rep = harness::run_experiment(criterion6_config(false));
    for (const auto& pn : rep.per_n) {
        out.require(pn.failures == 0, "replication failures at n=" + std::to_string(pn.n));
        std::ostringstream ss;
        ss << "n=" << pn.n << " adaptive " << pn.mean_mise << " oracle " << pn.oracle_mise
           << " ratio " << pn.adaptive_oracle_ratio;
        out.require(pn.oracle_mise > 0.0 && pn.mean_mise <= 4.0 * pn.oracle_mise, ss.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// 7. Dependence robustness: bernoulli_ar inputs against the i.i.d. run with
//    the same marginal and the identical penalty; per-n means within factor 2
//    (2 SE slack) and penalty tables exactly equal.
Outcome criterion7() {
    Outcome out;
    auto iid_cfg = criterion6_config(true);
    iid_cfg.process = process::iid_process(iid_cfg.target);
    auto dep_cfg = criterion6_config(true);
    iid_cfg.oracle_replications = 0;
    dep_cfg.oracle_replications = 0;
    const auto iid = harness::run_experiment(iid_cfg);
    const auto dep = harness::run_experiment(dep_cfg);
    for (std::size_t i = 0; i < iid.per_n.size(); ++i) {
        const auto& a = iid.per_n[i];
        const auto& b = dep.per_n[i];
        out.require(a.failures == 0 && b.failures == 0,
                    "failures at n=" + std::to_string(a.n));
        const double slack_ab = 2.0 * (b.se_mise + 2.0 * a.se_mise);
        const double slack_ba = 2.0 * (a.se_mise + 2.0 * b.se_mise);
        std::ostringstream ss;
        ss << "n=" << a.n << " iid " << a.mean_mise << " (se " << a.se_mise << ") dependent "
           << b.mean_mise << " (se " << b.se_mise << ")";
        out.require(b.mean_mise <= 2.0 * a.mean_mise + slack_ab, ss.str() + ": dependent high");
        out.require(a.mean_mise <= 2.0 * b.mean_mise + slack_ba, ss.str() + ": dependent low");
        out.require(a.penalty_table == b.penalty_table,
                    "penalty tables differ at n=" + std::to_string(a.n));
    }
    return out;
}

// ---------------------------------------------------------------------------
// 8. Rate behavior.  (a) gaussian target + laplace noise: fitted slope of
//    log mean MISE against log n within [-1.15, -0.6].  (b) laplace target +
//    gaussian noise: mean MISE decreasing in n and m-hat <= m_n everywhere.
Outcome criterion8() {
    Outcome out;
    const std::vector<std::size_t> ns{500, 1000, 2000, 4000, 8000};

    harness::ExperimentConfig a;
    a.target = target::builtin_target("gaussian");
    a.noise = noise::builtin_noise("laplace", 1.0);
    a.process = process::iid_process(a.target);
    a.n_values = ns;
    a.replications = 100;
    a.oracle_replications = 0;
    a.penalty.a = 2.0;
    a.penalty.variant = estimator::PenaltyVariant::Ordinary;
    a.seed = 808;
    const auto ra = harness::run_experiment(a);
    out.require(ra.rate_fit.has_value(), "rate fit missing");
    if (ra.rate_fit) {
        std::ostringstream ss;
        ss << "slope " << ra.rate_fit->slope << " over " << ra.rate_fit->points_used
           << " points (" << ra.rate_fit->regressor << ")";
        out.require(ra.rate_fit->regressor == "log_n", ss.str());
        out.require(ra.rate_fit->slope >= -1.15 && ra.rate_fit->slope <= -0.6, ss.str());
    }

    harness::ExperimentConfig b;
    b.target = target::builtin_target("laplace");
    b.noise = noise::builtin_noise("gaussian", 0.25);
    b.process = process::iid_process(b.target);
    b.n_values = ns;
    b.replications = 100;
    b.oracle_replications = 0;
    b.penalty.a = 1.5;
    b.penalty.variant = estimator::PenaltyVariant::Supersmooth;
    b.seed = 809;
    const auto rb = harness::run_experiment(b);
    for (std::size_t i = 0; i < rb.per_n.size(); ++i) {
        const auto& pn = rb.per_n[i];
        out.require(pn.failures == 0, "failures at n=" + std::to_string(pn.n));
        if (i > 0) {
            std::ostringstream ss;
            ss << "mean MISE not decreasing: " << rb.per_n[i - 1].mean_mise << " -> "
               << pn.mean_mise << " at n=" << pn.n;
            out.require(pn.mean_mise < rb.per_n[i - 1].mean_mise, ss.str());
        }
    }
    for (const auto& rec : rb.replications) {
        int m_n = 0;
        for (const auto& pn : rb.per_n)
            if (pn.n == rec.n) m_n = pn.m_n;
        out.require(rec.m_hat <= m_n, "m_hat " + std::to_string(rec.m_hat) + " beyond grid " +
                                          std::to_string(m_n) + " at n=" + std::to_string(rec.n));
    }
    return out;
}

// ---------------------------------------------------------------------------
// 9. Risk-bound sanity: empirical MISE at the oracle resolution sits below
//    the non-asymptotic bound (+3 SE) for i.i.d. and bernoulli_ar inputs.
Outcome criterion9() {
    Outcome out;
    auto g = target::builtin_target("uniform01");
    auto eps = noise::builtin_noise("laplace", 1.0);
    const std::size_t n = 2000, reps = 150;
    const int k_n = static_cast<int>(n);

    const process::DependentProcess procs[] = {process::iid_process(g), process::bernoulli_ar()};
    for (const auto& p : procs) {
        const auto orc =
            harness::oracle_m(p, eps, n, reps, 909, 910, estimator::KnPolicy::Exact);
        out.require(orc.failures == 0, p.name + ": oracle failures");
        const auto idx = static_cast<std::size_t>(orc.m_breve - 1);
        const auto bound = harness::risk_bound_terms(g, eps, p, orc.m_breve, n, k_n);
        const double lhs = orc.mise_mean[idx];
        const double rhs = bound.total() + 3.0 * orc.mise_se[idx];
        std::ostringstream ss;
        ss << p.name << ": MISE(m=" << orc.m_breve << ") = " << lhs << " vs bound "
           << bound.total() << " + 3se = " << rhs;
        out.require(lhs <= rhs, ss.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// 10. Determinism: the experiment command run twice with one seed yields
//     byte-identical report and summary files.
Outcome criterion10() {
    Outcome out;
#ifndef DECONV_CLI_PATH
    out.require(false, "CLI path not compiled in");
#else
    const std::string dir = "acceptance10_tmp";
    if (std::system(("rm -rf " + dir).c_str()) != 0) {
        out.require(false, "cannot clear work dir");
        return out;
    }
    if (std::system(("mkdir -p " + dir).c_str()) != 0) {
        out.require(false, "cannot create work dir");
        return out;
    }
    const std::string cfg = dir + "/exp.cfg";
    {
        std::ofstream f(cfg);
        f << "[target]\nname = gaussian\n[noise]\nname = laplace\nscale = 1\n"
          << "[process]\nname = iid\n[penalty]\nvariant = ordinary\na = 2\n"
          << "[experiment]\nn_values = 100, 200\nreplications = 3\noracle_replications = 2\n";
    }
    auto run = [&](const std::string& tag) {
        const std::string json = dir + "/" + tag + ".json";
        const std::string csv = dir + "/" + tag + ".csv";
        const std::string cmd = std::string(DECONV_CLI_PATH) + " experiment --config " + cfg +
                                " --seed 31415 --out " + json + " --csv " + csv +
                                " >/dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    out.require(run("a"), "first run failed");
    out.require(run("b"), "second run failed");
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const auto ja = slurp(dir + "/a.json"), jb = slurp(dir + "/b.json");
    const auto ca = slurp(dir + "/a.csv"), cb = slurp(dir + "/b.csv");
    out.require(!ja.empty() && ja == jb, "report JSON differs between runs");
    out.require(!ca.empty() && ca == cb, "summary CSV differs between runs");
    out.require(std::system(("rm -rf " + dir).c_str()) == 0, "cleanup failed");
#endif
    return out;
}

const char* kDescriptions[10] = {
    "basis identities (orthonormality, sum of squares)",
    "Delta(m) closed forms and log-space sandwich",
    "kernel ceiling |u*| <= sqrt(Delta(m))",
    "noise-free reduction to plain empirical coefficients",
    "coefficient unbiasedness under laplace noise",
    "adaptive MISE within 4x of the oracle (iid)",
    "dependence robustness (bernoulli_ar vs iid, shared penalty)",
    "rate behavior across n (slope window; monotone supersmooth MISE)",
    "empirical MISE below the non-asymptotic risk bound",
    "byte-identical reports for identical seed",
};

} // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    if (argc < 2 || std::strcmp(argv[1], "all") == 0) {
        for (int i = 1; i <= 10; ++i) which.push_back(i);
    } else {
        for (int i = 1; i < argc; ++i) {
            const int c = std::atoi(argv[i]);
            if (c < 1 || c > 10) {
                std::fprintf(stderr, "usage: %s [all | criterion numbers 1..10]\n", argv[0]);
                return 64;
            }
            which.push_back(c);
        }
    }

    Outcome (*checks[10])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                               criterion6, criterion7, criterion8, criterion9, criterion10};
    int failures = 0;
    for (int c : which) {
        Outcome out;
        try {
            out = checks[c - 1]();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        if (out.pass) {
            std::printf("PASS criterion %d: %s\n", c, kDescriptions[c - 1]);
        } else {
            std::printf("FAIL criterion %d: %s [%s]\n", c, kDescriptions[c - 1],
                        out.detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures;
}
