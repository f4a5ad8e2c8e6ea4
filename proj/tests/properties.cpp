// Statistical invariants with fixed seeds. Heavier than the unit suites;
// runnable standalone (this binary) and from the acceptance suite.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "betacop/empirical.hpp"
#include "betacop/harness.hpp"
#include "betacop/inference.hpp"
#include "betacop/rank_stats.hpp"
#include "betacop/resampling.hpp"
#include "betacop/special.hpp"
#include "support/oracles.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>
#include <vector>

using namespace betacop;

namespace {

const std::vector<CopulaModel> kPaperModels = {
    {Family::Clayton, -2.0 / 3.0, 2}, {Family::Clayton, -1.0 / 3.0, 2},
    {Family::Clayton, 2.0 / 3.0, 2},  {Family::Clayton, 1.0, 2},
    {Family::Clayton, 2.0, 2},        {Family::Clayton, 6.0, 2},
    {Family::GumbelHougaard, 2.0, 2}, {Family::Frank, 5.75, 2},
    {Family::Gauss, 1.0 / std::sqrt(2.0), 2}, {Family::Gauss, -1.0 / std::sqrt(2.0), 2},
    {Family::Gauss, 0.9238795325112867, 2},  // tau = 0.75
};

}  // namespace

TEST_CASE("copulas: groundedness and uniform margins on a 21-point grid") {
    for (const auto& m : kPaperModels) {
        for (int k = 0; k <= 20; ++k) {
            const double v = k / 20.0;
            CHECK(std::abs(copula_cdf(m, std::vector<double>{0.0, v})) <= 1e-12);
            CHECK(std::abs(copula_cdf(m, std::vector<double>{v, 0.0})) <= 1e-12);
            CHECK(std::abs(copula_cdf(m, std::vector<double>{v, 1.0}) - v) <= 1e-12);
            CHECK(std::abs(copula_cdf(m, std::vector<double>{1.0, v}) - v) <= 1e-12);
        }
    }
}

TEST_CASE("copulas: 2-increasing rectangle inequality") {
    Rng rng(2001);
    for (const auto& m : kPaperModels) {
        for (int k = 0; k < 100; ++k) {
            double a1 = rng.uniform(), b1 = rng.uniform();
            double a2 = rng.uniform(), b2 = rng.uniform();
            if (a1 > b1) std::swap(a1, b1);
            if (a2 > b2) std::swap(a2, b2);
            const double mass = copula_cdf(m, std::vector<double>{b1, b2}) -
                                copula_cdf(m, std::vector<double>{a1, b2}) -
                                copula_cdf(m, std::vector<double>{b1, a2}) +
                                copula_cdf(m, std::vector<double>{a1, a2});
            CHECK(mass >= -1e-12);
        }
    }
}

TEST_CASE("copulas: densities integrate to one") {
    for (const auto& m : kPaperModels) {
        if (m.family == Family::Gauss && m.theta < 0) continue;  // same kernel by symmetry
        CHECK(std::abs(oracle::density_mass(m) - 1.0) < 1e-6);
    }
}

TEST_CASE("copulas: tau round trips over the attainable ranges") {
    const auto roundtrip = [](Family f, double tau) {
        CHECK(tau_of_theta(f, theta_of_tau(f, tau)) == doctest::Approx(tau).epsilon(1e-8));
    };
    for (double t : {-0.8, -0.5, -0.2, 0.1, 0.3, 0.5, 0.75, 0.9}) roundtrip(Family::Clayton, t);
    for (double t : {0.0, 0.2, 0.5, 0.75, 0.9}) roundtrip(Family::GumbelHougaard, t);
    for (double t : {-0.9, -0.4, 0.2, 0.6, 0.9}) roundtrip(Family::Gauss, t);
    for (double t : {-0.85, -0.4, 0.15, 0.45, 0.8}) roundtrip(Family::Frank, t);
}

TEST_CASE("copulas: khoudraji sampler matches K_delta on a 10x10 grid") {
    const KhoudrajiModel kh{CopulaModel{Family::Gauss, theta_of_tau(Family::Gauss, 0.75), 2}, 0.5};
    const std::size_t n = 100000;
    Rng rng(2014);
    const Sample s = copula_sample(kh, n, rng);
    double sup = 0.0;
    for (int a = 1; a <= 10; ++a)
        for (int b = 1; b <= 10; ++b) {
            const double u = a / 10.0, v = b / 10.0;
            std::size_t cnt = 0;
            for (std::size_t i = 0; i < n; ++i) cnt += (s(i, 0) <= u && s(i, 1) <= v);
            const double pt[2] = {u, v};
            sup = std::max(sup, std::abs(static_cast<double>(cnt) / static_cast<double>(n) -
                                         copula_cdf(kh, pt)));
        }
    CHECK(sup < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("reference values: GGR interval scale for Clayton theta = 1 at n = 100") {
    // the sandwich interval lives on the reported ~1.2 length scale and
    // covers at the nominal rate; the reference implementation's intervals
    // are somewhat wider than the estimator's true sampling spread
    // (sqrt(n) sd(theta_hat) ~ 2.5 here, measured independently)
    double total = 0.0, covered = 0.0;
    int good = 0;
    const int M = 300;
    const double z = norm_quantile(0.975);
    for (int m = 0; m < M; ++m) {
        Rng rng(Rng::derive(2015, {static_cast<std::uint64_t>(m)}));
        const Sample s = copula_sample(CopulaModel{Family::Clayton, 1.0, 2}, 100, rng);
        const RankMatrix r = compute_ranks(s);
        const PleResult f = pseudo_likelihood_estimate(r, Family::Clayton);
        if (f.boundary) continue;
        const auto v = ggr_asymptotic_variance(r, Family::Clayton, f.theta_hat);
        if (!v) continue;
        const double half = z * std::sqrt(*v / 100.0);
        total += 2.0 * half;
        covered += (f.theta_hat - half <= 1.0 && 1.0 <= f.theta_hat + half);
        ++good;
    }
    CHECK(good >= 295);
    const double len = total / good;
    CHECK(len > 0.9);
    CHECK(len < 1.45);
    const double cov = covered / good;
    CHECK(cov > 0.92);
    CHECK(cov < 0.98);
}

TEST_CASE("reference values: BootSym size collapses under strong dependence") {
    // S_n with the symmetrized straightforward bootstrap, tau = 0.75, n = 50:
    // the reported rejection rate is 0.000
    int rejects = 0;
    const int M = 200;
    const double theta = theta_of_tau(Family::Gauss, 0.75);
    for (int m = 0; m < M; ++m) {
        Rng rng(Rng::derive(2016, {static_cast<std::uint64_t>(m)}));
        const Sample s = copula_sample(CopulaModel{Family::Gauss, theta, 2}, 50, rng);
        const TestResult t =
            symmetry_test(compute_ranks(s), SymmetryStatistic::Sn, SymmetryScheme::BootSym, 150,
                          Rng::derive(2017, {static_cast<std::uint64_t>(m)}));
        rejects += (t.p_value <= 0.05);
    }
    CHECK(static_cast<double>(rejects) / M <= 0.01);
}

TEST_CASE("empirical: sup |C~_n - C_n| <= d/n over 100 random samples") {
    Rng rng(2002);
    int checked = 0;
    for (int rep = 0; rep < 50; ++rep) {  // d = 2
        const std::size_t n = 1 + rng.index(50);
        Sample s(n, 2);
        for (auto& x : s.data) x = rng.normal();
        const RankMatrix r = compute_ranks(s);
        double sup = 0.0;
        for (int a = 0; a <= 40; ++a)
            for (int b = 0; b <= 40; ++b) {
                const std::vector<double> u{a / 40.0, b / 40.0};
                sup = std::max(sup, std::abs(rank_empirical_copula(r, u) -
                                             deheuvels_empirical_copula(s, u)));
            }
        CHECK(sup <= 2.0 / static_cast<double>(n) + 1e-12);
        ++checked;
    }
    for (int rep = 0; rep < 50; ++rep) {  // d = 3
        const std::size_t n = 2 + rng.index(20);
        Sample s(n, 3);
        for (auto& x : s.data) x = rng.normal();
        const RankMatrix r = compute_ranks(s);
        double sup = 0.0;
        for (int a = 0; a <= 40; ++a)
            for (int b = 0; b <= 40; ++b)
                for (int c = 0; c <= 40; ++c) {
                    const std::vector<double> u{a / 40.0, b / 40.0, c / 40.0};
                    sup = std::max(sup, std::abs(rank_empirical_copula(r, u) -
                                                 deheuvels_empirical_copula(s, u)));
                }
        CHECK(sup <= 3.0 / static_cast<double>(n) + 1e-12);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("empirical: the beta copula is a genuine copula") {
    Rng rng(2003);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 3 + rng.index(30);
        const RankMatrix r = oracle::random_rank_matrix(n, 2, rng);
        for (int k = 0; k <= 20; ++k) {
            const double v = k / 20.0;
            CHECK(std::abs(empirical_beta_copula(r, std::vector<double>{0.0, v})) <= 1e-12);
            CHECK(std::abs(empirical_beta_copula(r, std::vector<double>{v, 1.0}) - v) <= 1e-12);
        }
        for (int k = 0; k < 40; ++k) {
            double a1 = rng.uniform(), b1 = rng.uniform(), a2 = rng.uniform(), b2 = rng.uniform();
            if (a1 > b1) std::swap(a1, b1);
            if (a2 > b2) std::swap(a2, b2);
            const double mass = empirical_beta_copula(r, std::vector<double>{b1, b2}) -
                                empirical_beta_copula(r, std::vector<double>{a1, b2}) -
                                empirical_beta_copula(r, std::vector<double>{b1, a2}) +
                                empirical_beta_copula(r, std::vector<double>{a1, a2});
            CHECK(mass >= -1e-12);
        }
    }
}

TEST_CASE("resampling: multinomial weights sum to n with unit mean") {
    Rng rng(2004);
    double total = 0.0;
    const int reps = 400;
    for (int rep = 0; rep < reps; ++rep) {
        const MultinomialWeights w = draw_multinomial_weights(64, rng);
        CHECK(std::accumulate(w.w.begin(), w.w.end(), 0) == 64);
        total += std::accumulate(w.w.begin(), w.w.end(), 0.0) / 64.0;
    }
    CHECK(total / reps == doctest::Approx(1.0));
}

TEST_CASE("resampling: identity weights and unit multipliers give the zero process") {
    Rng rng(2005);
    const RankMatrix r = oracle::random_rank_matrix(40, 2, rng);
    const MultinomialWeights id{std::vector<std::int32_t>(40, 1)};
    MultiplierWeights ones;
    ones.xi.assign(40, 1.0);
    const std::vector<std::vector<double>> grid{{0.2, 0.7}, {0.5, 0.5}, {0.9, 0.3}};
    for (const auto& u : grid) {
        CHECK(straightforward_bootstrap_copula(r, id, u) ==
              doctest::Approx(rank_empirical_copula(r, u)).epsilon(1e-15));
        CHECK(beta_bootstrap_standard(r, id, u) ==
              doctest::Approx(empirical_beta_copula(r, u)).epsilon(1e-15));
    }
    for (double v : multiplier_pdm_replicate(r, ones, grid))
        CHECK(v == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("resampling: mean grid distance between alpha^beta and alpha~ decreases in n") {
    // shared multinomial weights; 200 resamples per sample size
    std::vector<double> means;
    for (const std::size_t n : {50u, 200u, 800u}) {
        Rng rng(Rng::derive(2006, {n}));
        const Sample s = copula_sample(CopulaModel{Family::Clayton, 1.0, 2}, n, rng);
        const RankMatrix r = compute_ranks(s);
        std::vector<double> axis(41);
        for (int k = 0; k <= 40; ++k) axis[k] = k / 40.0;
        const BetaKernelTable table(n, axis);
        // data-side values on the grid
        std::vector<double> ctilde(41 * 41), cbeta(41 * 41);
        for (int a = 0; a <= 40; ++a)
            for (int b = 0; b <= 40; ++b) {
                const std::vector<double> u{axis[a], axis[b]};
                ctilde[a * 41 + b] = rank_empirical_copula(r, u);
                cbeta[a * 41 + b] = empirical_beta_copula(r, u);
            }
        const double sqrtn = std::sqrt(static_cast<double>(n));
        double mean = 0.0;
        const int reps = 200;
        for (int rep = 0; rep < reps; ++rep) {
            const MultinomialWeights w = draw_multinomial_weights(n, rng);
            const RankMatrix rstar = bootstrap_ranks(r, w);
            double sup = 0.0;
            for (int a = 0; a <= 40; ++a)
                for (int b = 0; b <= 40; ++b) {
                    double cs = 0.0, cbs = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        if (w.w[i] == 0) continue;
                        const double wt = static_cast<double>(w.w[i]);
                        cbs += wt * table.at(rstar(i, 0), a) * table.at(rstar(i, 1), b);
                        if (rank_leq(rstar(i, 0), axis[a], n) && rank_leq(rstar(i, 1), axis[b], n))
                            cs += wt;
                    }
                    cs /= static_cast<double>(n);
                    cbs /= static_cast<double>(n);
                    const double alpha_beta = sqrtn * (cbs - cbeta[a * 41 + b]);
                    const double alpha_tilde = sqrtn * (cs - ctilde[a * 41 + b]);
                    sup = std::max(sup, std::abs(alpha_beta - alpha_tilde));
                }
            mean += sup;
        }
        means.push_back(mean / reps);
    }
    CHECK(means[0] > means[1]);
    CHECK(means[1] > means[2]);
}

TEST_CASE("rank statistics: invariance under increasing marginal transforms") {
    Rng rng(2007);
    Sample s(60, 2);
    for (auto& x : s.data) x = rng.normal();
    Sample t = s;
    for (std::size_t i = 0; i < t.n; ++i) {
        t(i, 0) = std::exp(t(i, 0));
        t(i, 1) = std::atan(t(i, 1));
    }
    const RankMatrix rs = compute_ranks(s), rt = compute_ranks(t);
    CHECK(kendall_tau(rs).tau_hat == kendall_tau(rt).tau_hat);
    CHECK(kendall_tau(rs).sigma_hat == kendall_tau(rt).sigma_hat);
    CHECK(spearman_rho(rs) == spearman_rho(rt));
    CHECK(kendall_tau(rs).sigma_hat > 0.0);
}

TEST_CASE("rank statistics: symmetry statistics nonnegative on random matrices") {
    Rng rng(2008);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 4 + rng.index(12);
        const RankMatrix r = oracle::random_rank_matrix(n, 2, rng);
        const IntegralTables t(n);
        CHECK(symmetry_stat_Rn(r) >= -1e-12);
        CHECK(symmetry_stat_Sn(r) >= -1e-12);
        CHECK(symmetry_stat_Rn_beta(r, t) >= -1e-12);
        CHECK(symmetry_stat_Sn_beta(r, t) >= -1e-12);
    }
}

TEST_CASE("pseudo-likelihood recovers theta within 4 SE in at least 95% of trials") {
    const std::vector<std::pair<Family, double>> cases = {
        {Family::Clayton, 1.0},
        {Family::GumbelHougaard, 2.0},
        {Family::Frank, 5.75},
        {Family::Gauss, 1.0 / std::sqrt(2.0)},
    };
    for (const auto& [family, theta] : cases) {
        int hits = 0, trials = 0;
        for (int k = 0; k < 100; ++k) {
            Rng rng(Rng::derive(2009, {static_cast<std::uint64_t>(k),
                                       static_cast<std::uint64_t>(family)}));
            const Sample s = copula_sample(CopulaModel{family, theta, 2}, 5000, rng);
            const RankMatrix r = compute_ranks(s);
            const PleResult f = pseudo_likelihood_estimate(r, family);
            if (f.boundary) continue;
            const auto v = ggr_asymptotic_variance(r, family, f.theta_hat);
            if (!v) continue;
            const double se = std::sqrt(*v / 5000.0);
            ++trials;
            if (std::abs(f.theta_hat - theta) <= 4.0 * se) ++hits;
        }
        CHECK(trials >= 98);
        CHECK(static_cast<double>(hits) >= 0.95 * static_cast<double>(trials));
    }
}

TEST_CASE("cross-scheme consistency of the limit-process variance at (1/3, 1/3)") {
    const std::size_t n = 200, B = 2000;
    Rng rng(2010);
    const Sample s = copula_sample(CopulaModel{Family::Clayton, 1.0, 2}, n, rng);
    const RankMatrix r = compute_ranks(s);
    const std::vector<std::vector<double>> point{{1.0 / 3.0, 1.0 / 3.0}};
    const double vp = covariance_estimate(r, CovScheme::MultiplierPDM, point, B, 31).at(0, 0);
    const double vb = covariance_estimate(r, CovScheme::BetaStandard, point, B, 32).at(0, 0);
    const double vs = covariance_estimate(r, CovScheme::BetaSmoothed, point, B, 33).at(0, 0);
    // the beta-based schemes share their center and agree tightly; the
    // multiplier estimate carries an opposite-signed finite-sample bias at
    // this grid point (median gap ~19% over repeated samples), so only a
    // coarse consistency bound is meaningful for it
    CHECK(std::abs(vs - vb) / vb < 0.15);
    CHECK(std::abs(vp - vb) / vb < 0.45);
}

TEST_CASE("size control: BetaSym rejection rate under H0 stays near the nominal level") {
    // data from a symmetric copula; spot the p-value distribution via the
    // rejection rate at alpha = 0.05
    const std::size_t n = 200, B = 200;
    const int M = 1000;
    std::atomic<int> rejects{0};
    ExperimentConfig cfg;  // reuse the harness thread pool via a plain loop
    (void)cfg;
    std::vector<int> flags(M, 0);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int m = next.fetch_add(1);
            if (m >= M) return;
            Rng rng(Rng::derive(2011, {static_cast<std::uint64_t>(m)}));
            const Sample s = copula_sample(CopulaModel{Family::Clayton, 1.0, 2}, n, rng);
            const RankMatrix r = compute_ranks(s);
            const TestResult t =
                symmetry_test(r, SymmetryStatistic::Sn, SymmetryScheme::BetaSym, B,
                              Rng::derive(2012, {static_cast<std::uint64_t>(m)}));
            flags[m] = t.p_value <= 0.05 ? 1 : 0;
        }
    };
    std::thread t1(worker), t2(worker);
    t1.join();
    t2.join();
    for (int f : flags) rejects += f;
    const double rate = static_cast<double>(rejects.load()) / static_cast<double>(M);
    CHECK(rate <= 0.07);
}

TEST_CASE("reference values: asymptotic tau interval at independence") {
    // coverage ~ 0.952 at n = 40 and mean length ~ 0.271 at n = 100
    int covered = 0;
    double length100 = 0.0;
    const int M = 1000;
    for (int m = 0; m < M; ++m) {
        Rng rng(Rng::derive(2013, {static_cast<std::uint64_t>(m)}));
        const Sample s40 = copula_sample(CopulaModel{Family::Independence, 0.0, 2}, 40, rng);
        const ConfidenceInterval ci = ci_asymptotic_tau(compute_ranks(s40));
        covered += (ci.lower <= 0.0 && 0.0 <= ci.upper);
        const Sample s100 = copula_sample(CopulaModel{Family::Independence, 0.0, 2}, 100, rng);
        const ConfidenceInterval ci100 = ci_asymptotic_tau(compute_ranks(s100));
        length100 += ci100.upper - ci100.lower;
    }
    CHECK(std::abs(covered / static_cast<double>(M) - 0.952) < 0.025);
    CHECK(std::abs(length100 / M - 0.271) < 0.008);
}

TEST_CASE("harness: reproducibility spot check at higher replication") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::SpearmanCI;
    cfg.family = Family::Clayton;
    cfg.rho = 0.5;
    cfg.n_values = {30};
    cfg.runs = 12;
    cfg.boot = 50;
    cfg.schemes = {"boot", "beta"};
    cfg.seed = 99;
    cfg.progress = false;
    cfg.threads = 1;
    const ExperimentReport a = run_experiment(cfg);
    cfg.threads = 8;
    const ExperimentReport b = run_experiment(cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].value == b.rows[i].value);
        CHECK(a.rows[i].mc_se == b.rows[i].mc_se);
        CHECK(a.rows[i].failures == b.rows[i].failures);
    }
}
