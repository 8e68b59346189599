#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/harness.hpp"
#include "support/oracles.hpp"

using namespace deconv;
using oracle::kPi;

TEST_CASE("reference constants kappa_a and C_a") {
    CHECK(harness::kappa_a(2.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(harness::c_a(2.0) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(harness::kappa_a(1.5) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(harness::c_a(1.5) == doctest::Approx(25.0).epsilon(1e-15));
    // Large a: kappa -> 1, C = 2 kappa branch wins.
    CHECK(harness::c_a(100.0) == doctest::Approx(2.0 * 101.0 / 99.0).epsilon(1e-13));
    CHECK_THROWS_AS(harness::kappa_a(1.0), ConfigError);
}

TEST_CASE("theoretical resolution per smoothness regime") {
    const std::size_t n = 100000;
    const double ln_n = std::log(static_cast<double>(n));

    // Ordinary noise, Sobolev target: pi m = n^{1/(2s + 2gamma + 1)}.
    target::SmoothnessClass sobolev{1.4, 0.0, 0.0, 1.0};
    noise::NoiseSmoothness lap{2.0, 0.0, 0.0, 1.0, 1.0};
    auto c1 = harness::theoretical_m_breve(sobolev, lap, n);
    CHECK(c1.pi_m_breve == doctest::Approx(std::pow(1e5, 1.0 / 7.8)).epsilon(1e-12));
    CHECK(c1.rate == doctest::Approx(std::pow(1e5, -2.8 / 7.8)).epsilon(1e-12));
    CHECK(c1.m == std::max(1, static_cast<int>(std::floor(c1.pi_m_breve / kPi))));
    CHECK(c1.rate_known);

    // Ordinary noise, analytic target: pi m = (ln n / 2b)^{1/r}.
    target::SmoothnessClass analytic{0.0, 2.0, 0.25, 1.0};
    auto c2 = harness::theoretical_m_breve(analytic, lap, n);
    CHECK(c2.pi_m_breve == doctest::Approx(std::sqrt(ln_n / 0.5)).epsilon(1e-12));
    CHECK(c2.rate == doctest::Approx(std::pow(ln_n, 2.5) / n).epsilon(1e-12));

    // Supersmooth noise, Sobolev target: pi m = (ln n / (2 mu + 1))^{1/delta}.
    noise::NoiseSmoothness gauss{0.0, 0.5, 2.0, 1.0, 1.0};
    auto c3 = harness::theoretical_m_breve(sobolev, gauss, n);
    CHECK(c3.pi_m_breve == doctest::Approx(std::sqrt(ln_n / 2.0)).epsilon(1e-12));
    CHECK(c3.rate == doctest::Approx(std::pow(ln_n, -1.4)).epsilon(1e-12));

    // Both supersmooth: implicit equation, no explicit rate; the returned m is
    // the smallest integer on or past the balance root.
    auto c4 = harness::theoretical_m_breve(analytic, gauss, n);
    CHECK_FALSE(c4.rate_known);
    const double power = 2.0 * analytic.s + 2.0 * gauss.gamma + 1.0 - analytic.r;
    auto lhs = [&](int m) {
        return power * std::log(static_cast<double>(m)) +
               2.0 * gauss.mu * std::pow(kPi * m, gauss.delta) +
               2.0 * analytic.b * std::pow(kPi, analytic.r) * std::pow(m, analytic.r);
    };
    CHECK(lhs(c4.m) >= ln_n);
    if (c4.m > 1) CHECK(lhs(c4.m - 1) < ln_n);
    CHECK(c4.pi_m_breve == doctest::Approx(kPi * c4.m).epsilon(1e-15));

    CHECK_THROWS_AS(harness::theoretical_m_breve(sobolev, lap, 2), ConfigError);
}

TEST_CASE("risk bound terms recompute from components") {
    auto g = target::builtin_target("uniform01");
    auto eps = noise::builtin_noise("laplace", 1.0);
    auto p = process::bernoulli_ar();
    const int m = 1, k_n = 2000;
    const std::size_t n = 2000;
    const auto rb = harness::risk_bound_terms(g, eps, p, m, n, k_n);
    CHECK(rb.bias == doctest::Approx(target::bias_tail(g, m)).epsilon(1e-10));
    CHECK(rb.variance_main ==
          doctest::Approx(2.0 * noise::delta_m(eps, m).value() / n).epsilon(1e-10));
    const auto rm = process::r_m_bounds(p, m, n);
    CHECK(rb.r_m_available);
    CHECK(rb.residual == doctest::Approx(static_cast<double>(m) * m * (g.m2 + 1.0) / k_n +
                                         2.0 * rm.min_bound() / n)
                             .epsilon(1e-10));
    CHECK(rb.total() == doctest::Approx(rb.bias + rb.variance_main + rb.residual).epsilon(1e-12));
}

TEST_CASE("fit_rate recovers synthetic slopes") {
    const std::vector<std::size_t> ns{500, 1000, 2000, 4000, 8000};

    // Ordinary-smooth noise: regressor log n; first point dropped when its
    // grid is degenerate.
    noise::NoiseSmoothness lap{2.0, 0.0, 0.0, 1.0, 1.0};
    target::SmoothnessClass sobolev{1.4, 0.0, 0.0, 1.0};
    std::vector<double> mise;
    for (auto n : ns) mise.push_back(3.0 * std::pow(static_cast<double>(n), -0.8));
    const auto fit = harness::fit_rate(ns, mise, {1, 2, 2, 3, 3}, lap, sobolev);
    CHECK(fit.regressor == "log_n");
    CHECK(fit.points_used == 4);
    CHECK(fit.slope == doctest::Approx(-0.8).epsilon(1e-10));
    CHECK(fit.se < 1e-10); // exact power law leaves no residual

    // All grids nondegenerate: every point participates.
    const auto fit_all = harness::fit_rate(ns, mise, {2, 2, 3, 3, 4}, lap, sobolev);
    CHECK(fit_all.points_used == 5);
    CHECK(fit_all.slope == doctest::Approx(-0.8).epsilon(1e-10));

    // Supersmooth noise with r = 0 target: regressor log log n.
    noise::NoiseSmoothness gauss{0.0, 0.5, 2.0, 1.0, 1.0};
    std::vector<double> mise_log;
    for (auto n : ns) mise_log.push_back(std::pow(std::log(static_cast<double>(n)), -2.8));
    const auto fit_log = harness::fit_rate(ns, mise_log, {2, 2, 3, 3, 4}, gauss, sobolev);
    CHECK(fit_log.regressor == "log_log_n");
    CHECK(fit_log.slope == doctest::Approx(-2.8).epsilon(1e-9));

    // Two points: slope defined, standard error is not.
    const auto fit2 = harness::fit_rate({1000, 4000}, {1e-2, 2.5e-3}, {2, 2}, lap, sobolev);
    CHECK(fit2.points_used == 2);
    CHECK(fit2.slope == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(std::isnan(fit2.se));

    CHECK_THROWS_AS(harness::fit_rate({1000}, {1e-2}, {2}, lap, sobolev), ConfigError);
    CHECK_THROWS_AS(harness::fit_rate(ns, {1e-2, -1.0, 1e-3, 1e-3, 1e-4}, {2, 2, 2, 2, 2}, lap,
                                      sobolev),
                    ConfigError);
}

TEST_CASE("oracle sweep is deterministic and sane") {
    auto p = process::iid_process(target::builtin_target("uniform01"));
    auto eps = noise::builtin_noise("laplace", 1.0);
    const auto a = harness::oracle_m(p, eps, 100, 8, 11, 22, estimator::KnPolicy::Auto);
    const auto b = harness::oracle_m(p, eps, 100, 8, 11, 22, estimator::KnPolicy::Auto);
    CHECK(a.m_n == 1);
    CHECK(a.m_breve == 1);
    CHECK(a.replications == 8);
    CHECK(a.failures == 0);
    REQUIRE(a.mise_mean.size() == 1);
    CHECK(a.mise_mean[0] > 0.0);
    CHECK(a.mise_se[0] > 0.0);
    CHECK(a.mise_mean[0] == b.mise_mean[0]);
    CHECK(a.mise_se[0] == b.mise_se[0]);
    // Different noise seed moves the estimate.
    const auto c = harness::oracle_m(p, eps, 100, 8, 11, 23, estimator::KnPolicy::Auto);
    CHECK(a.mise_mean[0] != c.mise_mean[0]);
}

TEST_CASE("run_experiment end to end on a small grid") {
    harness::ExperimentConfig cfg;
    cfg.target = target::builtin_target("gaussian");
    cfg.noise = noise::builtin_noise("laplace", 1.0);
    cfg.process = process::iid_process(cfg.target);
    cfg.n_values = {50, 100};
    cfg.replications = 3;
    cfg.oracle_replications = 2;
    cfg.penalty.a = 2.0;
    cfg.penalty.variant = estimator::PenaltyVariant::Ordinary;
    cfg.seed = 99;

    const auto rep = harness::run_experiment(cfg);
    CHECK(rep.per_n.size() == 2);
    CHECK(rep.replications.size() == 6);
    CHECK(rep.valid);
    CHECK(rep.kappa_a_value == doctest::Approx(3.0));
    CHECK(rep.c_a_value == doctest::Approx(9.0));
    for (const auto& pn : rep.per_n) {
        CHECK(pn.m_n == 1);
        CHECK(pn.penalty_table.size() == 1);
        CHECK(pn.failures == 0);
        CHECK(pn.mean_mise > 0.0);
        REQUIRE(pn.oracle.has_value());
        CHECK(pn.oracle->replications == 2);
        CHECK(pn.oracle_mise > 0.0);
        CHECK(pn.adaptive_oracle_ratio ==
              doctest::Approx(pn.mean_mise / pn.oracle_mise).epsilon(1e-12));
        REQUIRE(pn.theoretical.has_value());
        CHECK(pn.theoretical->m >= 1);
    }
    for (const auto& r : rep.replications) {
        CHECK_FALSE(r.failed);
        CHECK(r.m_hat == 1);
        CHECK(r.mise > 0.0);
        CHECK(r.contrast.size() == 1);
    }
    // Rate fit: first n dropped for the degenerate grid, one point left.
    CHECK_FALSE(rep.rate_fit.has_value());

    // Determinism across calls.
    const auto rep2 = harness::run_experiment(cfg);
    REQUIRE(rep2.replications.size() == rep.replications.size());
    for (std::size_t i = 0; i < rep.replications.size(); ++i) {
        CHECK(rep.replications[i].mise == rep2.replications[i].mise);
        CHECK(rep.replications[i].m_hat == rep2.replications[i].m_hat);
    }
    CHECK(rep.per_n[0].mean_mise == rep2.per_n[0].mean_mise);

    // Oracle replication count zero disables the sweep.
    cfg.oracle_replications = 0;
    const auto rep3 = harness::run_experiment(cfg);
    CHECK_FALSE(rep3.per_n[0].oracle.has_value());

    // Marginal mismatch between target and process is refused.
    harness::ExperimentConfig bad = cfg;
    bad.process = process::bernoulli_ar();
    CHECK_THROWS_AS(harness::run_experiment(bad), ConfigError);
    harness::ExperimentConfig bad2 = cfg;
    bad2.n_values = {100, 100};
    CHECK_THROWS_AS(harness::run_experiment(bad2), ConfigError);
}
