#include "betacop/inference.hpp"

#include "betacop/empirical.hpp"
#include "betacop/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betacop {

ConfidenceInterval ci_asymptotic_tau(const RankMatrix& ranks, double level) {
    if (ranks.n < 3) throw std::invalid_argument("ci_asymptotic_tau: n < 3");
    const KendallResult k = kendall_tau(ranks);
    const double z = norm_quantile(0.5 + level / 2.0);
    ConfidenceInterval ci;
    ci.method = CiMethod::Asymp;
    ci.level = level;
    ci.lower = k.tau_hat - z * k.sigma_hat;
    ci.upper = k.tau_hat + z * k.sigma_hat;
    ci.flagged = !(k.sigma_hat > 0.0);
    return ci;
}

ConfidenceInterval ci_bootstrap_percentile(const Replicates& replicates, double point_estimate,
                                           double level, bool basic) {
    if (replicates.values.size() < 20)
        throw std::invalid_argument("ci_bootstrap_percentile: fewer than 20 replicates");
    std::vector<double> sorted = replicates.values;
    std::sort(sorted.begin(), sorted.end());
    const double a = (1.0 - level) / 2.0;
    const double qlo = quantile_type7_sorted(sorted, a);
    const double qhi = quantile_type7_sorted(sorted, 1.0 - a);
    ConfidenceInterval ci;
    ci.level = level;
    switch (replicates.scheme) {
        case Scheme::BetaSmoothed:
        case Scheme::BetaSmoothedSymmetrized: ci.method = CiMethod::Beta; break;
        case Scheme::Parametric: ci.method = CiMethod::Param; break;
        default: ci.method = CiMethod::Boot; break;
    }
    if (basic) {
        ci.lower = 2.0 * point_estimate - qhi;
        ci.upper = 2.0 * point_estimate - qlo;
    } else {
        ci.lower = qlo;
        ci.upper = qhi;
    }
    ci.flagged = !(ci.upper > ci.lower);
    return ci;
}

namespace {

double eval_symmetry_stat(const RankMatrix& ranks, SymmetryStatistic stat,
                          const IntegralTables* tables) {
    switch (stat) {
        case SymmetryStatistic::Sn: return symmetry_stat_Sn(ranks);
        case SymmetryStatistic::Rn: return symmetry_stat_Rn(ranks);
        case SymmetryStatistic::SnBeta: return symmetry_stat_Sn_beta(ranks, *tables);
        case SymmetryStatistic::RnBeta: return symmetry_stat_Rn_beta(ranks, *tables);
    }
    return 0.0;
}

// multinomial resample with a fair coordinate swap per retained row,
// re-ranked by the max-rank rule
RankMatrix bootsym_resample(const RankMatrix& ranks, Rng& rng) {
    const std::size_t n = ranks.n;
    const MultinomialWeights w = draw_multinomial_weights(n, rng);
    Sample resampled(n, 2);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w.w[i] == 0) continue;
        const bool swap = rng.uniform() < 0.5;
        const double a = static_cast<double>(ranks(i, swap ? 1 : 0));
        const double b = static_cast<double>(ranks(i, swap ? 0 : 1));
        for (std::int32_t c = 0; c < w.w[i]; ++c) {
            resampled(pos, 0) = a;
            resampled(pos, 1) = b;
            ++pos;
        }
    }
    return rerank(resampled);
}

}  // namespace

TestResult symmetry_test(const RankMatrix& ranks, SymmetryStatistic statistic,
                         SymmetryScheme scheme, std::size_t B, std::uint64_t seed,
                         const IntegralTables* tables) {
    if (ranks.d != 2) throw std::invalid_argument("symmetry_test: d = 2 required");
    if (B < 1) throw std::invalid_argument("symmetry_test: B < 1");
    const bool needs_tables =
        statistic == SymmetryStatistic::SnBeta || statistic == SymmetryStatistic::RnBeta;
    std::optional<IntegralTables> own;
    if (needs_tables && tables == nullptr) {
        own.emplace(ranks.n, statistic == SymmetryStatistic::SnBeta);
        tables = &*own;
    }

    TestResult res;
    res.scheme = scheme;
    res.B = B;
    res.statistic = eval_symmetry_stat(ranks, statistic, tables);

    std::size_t exceed = 0;
    for (std::size_t b = 0; b < B; ++b) {
        Rng rng(Rng::derive(seed, {b}));
        RankMatrix rep;
        if (scheme == SymmetryScheme::BetaSym)
            rep = rerank(beta_copula_sample(ranks, ranks.n, rng, true));
        else
            rep = bootsym_resample(ranks, rng);
        if (eval_symmetry_stat(rep, statistic, tables) >= res.statistic) ++exceed;
    }
    res.p_value = (1.0 + static_cast<double>(exceed)) / (static_cast<double>(B) + 1.0);
    return res;
}

CovarianceEstimate covariance_estimate(const RankMatrix& ranks, CovScheme scheme,
                                       const std::vector<std::vector<double>>& grid, std::size_t B,
                                       std::uint64_t seed) {
    if (grid.empty()) throw std::invalid_argument("covariance_estimate: empty grid");
    if (B < 2) throw std::invalid_argument("covariance_estimate: B < 2");
    const std::size_t n = ranks.n, d = ranks.d, k = grid.size();
    const double sqrtn = std::sqrt(static_cast<double>(n));

    // replicate process values, one row per replicate
    std::vector<double> reps(B * k);

    if (scheme == CovScheme::MultiplierPDM) {
        const PdmReplicator pdm(ranks, grid);
        for (std::size_t b = 0; b < B; ++b) {
            Rng rng(Rng::derive(seed, {b}));
            const MultiplierWeights xi = draw_two_point_multipliers(n, rng);
            const std::vector<double> v = pdm.replicate(xi);
            std::copy(v.begin(), v.end(), reps.begin() + b * k);
        }
    } else {
        // distinct u-coordinates across the grid, one beta-kernel table
        std::vector<double> axis;
        for (const auto& u : grid)
            for (double x : u) axis.push_back(x);
        std::sort(axis.begin(), axis.end());
        axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
        const BetaKernelTable table(n, axis);
        std::vector<std::vector<std::size_t>> cols(k, std::vector<std::size_t>(d));
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t j = 0; j < d; ++j)
                cols[p][j] = static_cast<std::size_t>(
                    std::lower_bound(axis.begin(), axis.end(), grid[p][j]) - axis.begin());

        // center: empirical beta copula of the data at the grid
        std::vector<double> center(k);
        for (std::size_t p = 0; p < k; ++p) center[p] = empirical_beta_copula(ranks, grid[p]);

        for (std::size_t b = 0; b < B; ++b) {
            Rng rng(Rng::derive(seed, {b}));
            if (scheme == CovScheme::BetaStandard) {
                const MultinomialWeights w = draw_multinomial_weights(n, rng);
                for (std::size_t p = 0; p < k; ++p)
                    reps[b * k + p] =
                        sqrtn * (beta_bootstrap_standard(ranks, w, table, cols[p]) - center[p]);
            } else {
                const RankMatrix rr = rerank(beta_copula_sample(ranks, n, rng, false));
                for (std::size_t p = 0; p < k; ++p) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        double prod = 1.0;
                        for (std::size_t j = 0; j < d; ++j) prod *= table.at(rr(i, j), cols[p][j]);
                        acc += prod;
                    }
                    reps[b * k + p] = sqrtn * (acc / static_cast<double>(n) - center[p]);
                }
            }
        }
    }

    CovarianceEstimate est;
    est.grid = grid;
    est.cov.assign(k * k, 0.0);
    std::vector<double> mean(k, 0.0);
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t p = 0; p < k; ++p) mean[p] += reps[b * k + p];
    for (double& m : mean) m /= static_cast<double>(B);
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = p; q < k; ++q)
                est.cov[p * k + q] +=
                    (reps[b * k + p] - mean[p]) * (reps[b * k + q] - mean[q]);
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t q = p; q < k; ++q) {
            est.cov[p * k + q] /= static_cast<double>(B - 1);
            est.cov[q * k + p] = est.cov[p * k + q];
        }
    return est;
}

ConfidenceInterval ci_parametric(Family family, const RankMatrix& ranks, std::size_t B,
                                 std::uint64_t seed, double level) {
    if (ranks.d != 2) throw std::invalid_argument("ci_parametric: d = 2 required");
    const PleResult fit = pseudo_likelihood_estimate(ranks, family);
    const auto estimator = [family](const Sample& s) -> std::optional<double> {
        const PleResult r = pseudo_likelihood_estimate(compute_ranks(s), family);
        if (r.boundary) return std::nullopt;
        return r.theta_hat;
    };
    const Replicates rep = parametric_bootstrap(family, fit.theta_hat, ranks.n, estimator, B, seed);
    ConfidenceInterval ci;
    if (rep.values.size() < 20) {
        ci.method = CiMethod::Param;
        ci.level = level;
        ci.lower = ci.upper = fit.theta_hat;
        ci.flagged = true;
        return ci;
    }
    ci = ci_bootstrap_percentile(rep, fit.theta_hat, level);
    ci.method = CiMethod::Param;
    if (rep.failures * 10 > static_cast<int>(B)) ci.flagged = true;  // >10% failed
    return ci;
}

double limit_covariance(const CopulaModel& m, std::span<const double> u,
                        std::span<const double> v) {
    if (u.size() != 2 || v.size() != 2)
        throw std::invalid_argument("limit_covariance: bivariate points expected");
    // k(a, b) = C(a ^ b) - C(a) C(b), the C-pinned Brownian sheet covariance
    const auto meet = [&](std::span<const double> a, std::span<const double> b) {
        std::vector<double> r(2);
        r[0] = std::min(a[0], b[0]);
        r[1] = std::min(a[1], b[1]);
        return r;
    };
    const auto K = [&](std::span<const double> a, std::span<const double> b) {
        return copula_cdf(m, meet(a, b)) - copula_cdf(m, a) * copula_cdf(m, b);
    };
    // marginal points (u_j at coordinate j, 1 elsewhere)
    const auto marg = [](std::span<const double> a, std::size_t j) {
        std::vector<double> r{1.0, 1.0};
        r[j] = a[j];
        return r;
    };
    std::vector<double> du(2), dv(2);
    for (std::size_t j = 0; j < 2; ++j) {
        du[j] = (u[j] > 0.0 && u[j] < 1.0) ? copula_partial(m, u, j) : (u[j] >= 1.0 ? 1.0 : 0.0);
        dv[j] = (v[j] > 0.0 && v[j] < 1.0) ? copula_partial(m, v, j) : (v[j] >= 1.0 ? 1.0 : 0.0);
    }
    double cov = K(u, v);
    for (std::size_t j = 0; j < 2; ++j) {
        const auto mv = marg(v, j);
        const auto mu = marg(u, j);
        cov -= dv[j] * K(u, mv);
        cov -= du[j] * K(mu, v);
        for (std::size_t l = 0; l < 2; ++l) cov += du[j] * dv[l] * K(marg(u, j), marg(v, l));
    }
    return cov;
}

}  // namespace betacop
