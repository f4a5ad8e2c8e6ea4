#include "betacop/rank_stats.hpp"

#include "betacop/empirical.hpp"
#include "betacop/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace betacop {

namespace {

void require_bivariate(const RankMatrix& ranks, const char* op) {
    if (ranks.d != 2) throw std::invalid_argument(std::string(op) + ": d = 2 required");
}

}  // namespace

KendallResult kendall_tau(const RankMatrix& ranks) {
    require_bivariate(ranks, "kendall_tau");
    const std::size_t n = ranks.n;
    if (n < 2) throw std::invalid_argument("kendall_tau: n < 2");
    // C_i = sum_{k != i} Q_{k,i}; K = sum_{i<k} Q_{k,i}
    std::vector<long long> ci(n, 0);
    long long K = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            const long long d1 = ranks(k, 0) - ranks(i, 0);
            const long long d2 = ranks(k, 1) - ranks(i, 1);
            const long long prod = d1 * d2;
            const int q = (prod > 0) - (prod < 0);
            K += q;
            ci[i] += q;
            ci[k] += q;
        }
    }
    const double nn = static_cast<double>(n);
    KendallResult res;
    res.concordance = K;
    res.tau_hat = 2.0 * static_cast<double>(K) / (nn * (nn - 1.0));
    const double cbar = 2.0 * static_cast<double>(K) / nn;
    double ss = 0.0;
    for (long long c : ci) {
        const double dev = static_cast<double>(c) - cbar;
        ss += dev * dev;
    }
    const double var = 2.0 / (nn * (nn - 1.0)) *
                       (2.0 * (nn - 2.0) / (nn * (nn - 1.0) * (nn - 1.0)) * ss + 1.0 -
                        res.tau_hat * res.tau_hat);
    res.sigma_hat = std::sqrt(std::max(var, 0.0));
    return res;
}

double spearman_rho(const RankMatrix& ranks) {
    require_bivariate(ranks, "spearman_rho");
    const std::size_t n = ranks.n;
    if (n < 2) throw std::invalid_argument("spearman_rho: n < 2");
    const double mid = (static_cast<double>(n) + 1.0) / 2.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += (ranks(i, 0) - mid) * (ranks(i, 1) - mid);
    const double nn = static_cast<double>(n);
    return 12.0 / (nn * (nn * nn - 1.0)) * acc;
}

double spearman_rho_beta_copula(const RankMatrix& ranks) {
    require_bivariate(ranks, "spearman_rho_beta_copula");
    const std::size_t n = ranks.n;
    const double np1 = static_cast<double>(n) + 1.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += (1.0 - ranks(i, 0) / np1) * (1.0 - ranks(i, 1) / np1);
    return 12.0 / static_cast<double>(n) * acc - 3.0;
}

Sample pseudo_observations(const RankMatrix& ranks) {
    Sample u(ranks.n, ranks.d);
    const double np1 = static_cast<double>(ranks.n) + 1.0;
    for (std::size_t i = 0; i < ranks.n; ++i)
        for (std::size_t j = 0; j < ranks.d; ++j) u(i, j) = ranks(i, j) / np1;
    return u;
}

namespace {

double pseudo_loglik(const Sample& pobs, Family family, double theta) {
    const CopulaModel m{family, theta, 2};
    double acc = 0.0;
    for (std::size_t i = 0; i < pobs.n; ++i) {
        const double ll = copula_log_density(m, pobs.row(i));
        if (!std::isfinite(ll)) return -std::numeric_limits<double>::infinity();
        acc += ll;
    }
    return acc;
}

// family parameter box the optimizer may not leave
void family_box(Family f, double& lo, double& hi) {
    switch (f) {
        case Family::Clayton: lo = -0.95; hi = 40.0; break;
        case Family::GumbelHougaard: lo = 1.0; hi = 20.0; break;
        case Family::Frank: lo = -45.0; hi = 45.0; break;
        case Family::Gauss: lo = -0.999; hi = 0.999; break;
        case Family::Independence: lo = hi = 0.0; break;
    }
}

}  // namespace

PleResult pseudo_likelihood_estimate(const RankMatrix& ranks, Family family) {
    require_bivariate(ranks, "pseudo_likelihood_estimate");
    if (family == Family::Independence)
        throw std::invalid_argument("pseudo_likelihood_estimate: no parameter to fit");
    const Sample pobs = pseudo_observations(ranks);

    double box_lo = 0.0, box_hi = 0.0;
    family_box(family, box_lo, box_hi);

    // bracket from theta_of_tau around the sample tau, then clamp to the box
    const double tau = kendall_tau(ranks).tau_hat;
    double lo = box_lo, hi = box_hi;
    const auto theta_at = [&](double t) -> double {
        try {
            return theta_of_tau(family, t);
        } catch (const std::domain_error&) {
            return t > 0 ? box_hi : box_lo;
        }
    };
    lo = std::max(box_lo, theta_at(std::max(tau - 0.4, -0.95)));
    hi = std::min(box_hi, theta_at(std::min(tau + 0.4, 0.95)));
    if (!(lo < hi)) {
        lo = box_lo;
        hi = box_hi;
    }

    // coarse scan to bracket the maximum, then golden-section refinement
    constexpr int kScan = 33;
    double best = lo;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < kScan; ++k) {
        const double t = lo + (hi - lo) * k / (kScan - 1.0);
        const double v = pseudo_loglik(pobs, family, t);
        if (v > best_val) {
            best_val = v;
            best = t;
        }
    }
    const double step = (hi - lo) / (kScan - 1.0);
    double a = std::max(lo, best - step), b = std::min(hi, best + step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = pseudo_loglik(pobs, family, x1), f2 = pseudo_loglik(pobs, family, x2);
    while (b - a > 1e-8) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = pseudo_loglik(pobs, family, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = pseudo_loglik(pobs, family, x1);
        }
    }
    PleResult res;
    res.theta_hat = 0.5 * (a + b);
    res.boundary = (res.theta_hat - box_lo < 1e-6) || (box_hi - res.theta_hat < 1e-6);
    return res;
}

namespace {

double score_at(Family f, double theta, double u, double v) {
    const CopulaModel m{f, theta, 2};
    const double pt[2] = {u, v};
    return copula_score(m, pt);
}

}  // namespace

std::optional<double> ggr_asymptotic_variance(const RankMatrix& ranks, Family family,
                                              double theta_hat, double h) {
    require_bivariate(ranks, "ggr_asymptotic_variance");
    const std::size_t n = ranks.n;
    const Sample pobs = pseudo_observations(ranks);

    // beta_hat = -n^-1 sum_i d(score)/dtheta at U_i
    double info = 0.0;
    std::vector<double> score(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = pobs(i, 0), v = pobs(i, 1);
        score[i] = score_at(family, theta_hat, u, v);
        info -= (score_at(family, theta_hat + h, u, v) - score_at(family, theta_hat - h, u, v)) /
                (2.0 * h);
    }
    info /= static_cast<double>(n);
    if (!(info > 0.0) || !std::isfinite(info)) return std::nullopt;

    // g_{kj} = d(score)/du_j at U_k, by central differences clamped into (0,1)
    std::vector<double> g1(n), g2(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = pobs(k, 0), v = pobs(k, 1);
        g1[k] = (score_at(family, theta_hat, u + h, v) - score_at(family, theta_hat, u - h, v)) /
                (2.0 * h);
        g2[k] = (score_at(family, theta_hat, u, v + h) - score_at(family, theta_hat, u, v - h)) /
                (2.0 * h);
    }
    // suffix sums over rank order: sum_k 1{R_ij <= R_kj} g_{kj}
    std::vector<double> suf1(n + 2, 0.0), suf2(n + 2, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        suf1[static_cast<std::size_t>(ranks(k, 0))] += g1[k];
        suf2[static_cast<std::size_t>(ranks(k, 1))] += g2[k];
    }
    for (std::size_t r = n; r >= 1; --r) {
        suf1[r] += suf1[r + 1];
        suf2[r] += suf2[r + 1];
    }

    double mean = 0.0;
    std::vector<double> ni(n);
    for (std::size_t i = 0; i < n; ++i) {
        ni[i] = score[i] + (suf1[static_cast<std::size_t>(ranks(i, 0))] +
                            suf2[static_cast<std::size_t>(ranks(i, 1))]) /
                               static_cast<double>(n);
        mean += ni[i];
    }
    mean /= static_cast<double>(n);
    double varn = 0.0;
    for (double x : ni) varn += (x - mean) * (x - mean);
    varn /= static_cast<double>(n - 1);
    if (!std::isfinite(varn)) return std::nullopt;
    return varn / (info * info);
}

// ---------------------------------------------------------------------------
// Integral tables and symmetry statistics
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kFullTensorMax = 200;

// log Beta(t, n+1-t) density normalizer
double log_beta_norm(std::size_t n, std::int32_t t) {
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(t)) -
           std::lgamma(static_cast<double>(n - t + 1));
}

}  // namespace

IntegralTables::IntegralTables(std::size_t n, bool build_c, int extra_nodes) : n_(n) {
    if (n < 1) throw std::invalid_argument("IntegralTables: n < 1");
    // B: integrand degree 2n -> n+1 nodes exact
    {
        const QuadRule rule = gauss_legendre(static_cast<int>(n) + 1 + extra_nodes);
        const std::size_t q = rule.nodes.size();
        std::vector<double> fk(n * q);
        for (std::size_t r = 1; r <= n; ++r)
            for (std::size_t k = 0; k < q; ++k)
                fk[(r - 1) * q + k] = beta_kernel(n, static_cast<std::int32_t>(r), rule.nodes[k]);
        b_.assign(n * n, 0.0);
        for (std::size_t r = 1; r <= n; ++r)
            for (std::size_t s = r; s <= n; ++s) {
                double acc = 0.0;
                for (std::size_t k = 0; k < q; ++k)
                    acc += rule.weights[k] * fk[(r - 1) * q + k] * fk[(s - 1) * q + k];
                b_[(r - 1) * n + (s - 1)] = acc;
                b_[(s - 1) * n + (r - 1)] = acc;
            }
    }
    // C: integrand degree 3n-1 -> ceil(3n/2)+1 nodes exact
    {
        const int m = static_cast<int>((3 * n + 1) / 2) + 1 + extra_nodes;
        const QuadRule rule = gauss_legendre(m);
        const std::size_t q = rule.nodes.size();
        cnodes_ = rule.nodes;
        cweights_ = rule.weights;
        fker_.assign(n * q, 0.0);
        fdens_.assign(n * q, 0.0);
        for (std::size_t r = 1; r <= n; ++r) {
            const double lnorm = log_beta_norm(n, static_cast<std::int32_t>(r));
            for (std::size_t k = 0; k < q; ++k) {
                const double x = cnodes_[k];
                fker_[(r - 1) * q + k] = beta_kernel(n, static_cast<std::int32_t>(r), x);
                fdens_[(r - 1) * q + k] = std::exp(lnorm + (r - 1.0) * std::log(x) +
                                                   (static_cast<double>(n - r)) * std::log1p(-x));
            }
        }
        if (build_c && n <= kFullTensorMax) {
            c_.assign(n * n * n, 0.0);
            std::vector<double> slice;
            for (std::size_t t = 1; t <= n; ++t) {
                c_slice(static_cast<std::int32_t>(t), slice);
                std::copy(slice.begin(), slice.end(), c_.begin() + (t - 1) * n * n);
            }
        }
    }
}

void IntegralTables::c_slice(std::int32_t t, std::vector<double>& slice) const {
    const std::size_t n = n_, q = cnodes_.size();
    slice.assign(n * n, 0.0);
    const double* dens = &fdens_[(static_cast<std::size_t>(t) - 1) * q];
    std::vector<double> wd(q);
    for (std::size_t k = 0; k < q; ++k) wd[k] = cweights_[k] * dens[k];
    for (std::size_t r = 1; r <= n; ++r) {
        const double* fr = &fker_[(r - 1) * q];
        for (std::size_t s = r; s <= n; ++s) {
            const double* fs = &fker_[(s - 1) * q];
            double acc = 0.0;
            for (std::size_t k = 0; k < q; ++k) acc += wd[k] * fr[k] * fs[k];
            slice[(r - 1) * n + (s - 1)] = acc;
            slice[(s - 1) * n + (r - 1)] = acc;
        }
    }
}

double IntegralTables::C(std::int32_t r, std::int32_t s, std::int32_t t) const {
    if (!c_.empty())
        return c_[(static_cast<std::size_t>(t) - 1) * n_ * n_ +
                  (static_cast<std::size_t>(r) - 1) * n_ + (static_cast<std::size_t>(s) - 1)];
    std::vector<double> slice;
    c_slice(t, slice);
    return slice[(static_cast<std::size_t>(r) - 1) * n_ + (static_cast<std::size_t>(s) - 1)];
}

IntegralTables integral_tables(std::size_t n) { return IntegralTables(n); }

double symmetry_stat_Rn_beta(const RankMatrix& ranks, const IntegralTables& tables) {
    require_bivariate(ranks, "symmetry_stat_Rn_beta");
    const std::size_t n = ranks.n;
    if (tables.n() != n) throw std::invalid_argument("symmetry_stat_Rn_beta: table size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t ri1 = ranks(i, 0), ri2 = ranks(i, 1);
        for (std::size_t j = 0; j < n; ++j) {
            const std::int32_t rj1 = ranks(j, 0), rj2 = ranks(j, 1);
            acc += tables.B(ri1, rj1) * tables.B(ri2, rj2) -
                   tables.B(ri1, rj2) * tables.B(ri2, rj1);
        }
    }
    const double nn = static_cast<double>(n);
    return 2.0 / (nn * nn) * acc;
}

double symmetry_stat_Sn_beta(const RankMatrix& ranks, const IntegralTables& tables) {
    require_bivariate(ranks, "symmetry_stat_Sn_beta");
    const std::size_t n = ranks.n;
    if (tables.n() != n) throw std::invalid_argument("symmetry_stat_Sn_beta: table size mismatch");
    double acc = 0.0;
    std::vector<double> slice1, slice2;
    const bool full = tables.has_c_tensor();
    for (std::size_t k = 0; k < n; ++k) {
        const std::int32_t t1 = ranks(k, 0), t2 = ranks(k, 1);
        const double* c1 = nullptr;
        const double* c2 = nullptr;
        if (!full) {
            tables.c_slice(t1, slice1);
            tables.c_slice(t2, slice2);
            c1 = slice1.data();
            c2 = slice2.data();
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::int32_t a1 = ranks(i, 0), a2 = ranks(i, 1);
            for (std::size_t j = 0; j < n; ++j) {
                const std::int32_t b1 = ranks(j, 0), b2 = ranks(j, 1);
                double term;
                if (full) {
                    term = tables.C(a1, b1, t1) * tables.C(a2, b2, t2) -
                           tables.C(a1, b2, t1) * tables.C(a2, b1, t2) -
                           tables.C(a2, b1, t1) * tables.C(a1, b2, t2) +
                           tables.C(a2, b2, t1) * tables.C(a1, b1, t2);
                } else {
                    const auto at = [n](const double* s, std::int32_t r, std::int32_t c) {
                        return s[(static_cast<std::size_t>(r) - 1) * n +
                                 (static_cast<std::size_t>(c) - 1)];
                    };
                    term = at(c1, a1, b1) * at(c2, a2, b2) - at(c1, a1, b2) * at(c2, a2, b1) -
                           at(c1, a2, b1) * at(c2, a1, b2) + at(c1, a2, b2) * at(c2, a1, b1);
                }
                acc += term;
            }
        }
    }
    const double nn = static_cast<double>(n);
    return acc / (nn * nn * nn);
}

double symmetry_stat_Rn(const RankMatrix& ranks) {
    require_bivariate(ranks, "symmetry_stat_Rn");
    const std::size_t n = ranks.n;
    const double nn = static_cast<double>(n);
    // A(r,s) = int 1{r/n<=u} 1{s/n<=u} du = 1 - max(r,s)/n
    const auto A = [nn](std::int32_t r, std::int32_t s) {
        return 1.0 - static_cast<double>(std::max(r, s)) / nn;
    };
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t ri1 = ranks(i, 0), ri2 = ranks(i, 1);
        for (std::size_t j = 0; j < n; ++j) {
            const std::int32_t rj1 = ranks(j, 0), rj2 = ranks(j, 1);
            acc += A(ri1, rj1) * A(ri2, rj2) - A(ri1, rj2) * A(ri2, rj1);
        }
    }
    return 2.0 / (nn * nn) * acc;
}

double symmetry_stat_Sn(const RankMatrix& ranks) {
    require_bivariate(ranks, "symmetry_stat_Sn");
    const std::size_t n = ranks.n;
    const double nn = static_cast<double>(n);
    // n^-1 sum_k [C~(R_k1/n, R_k2/n) - C~(R_k2/n, R_k1/n)]^2, evaluated by
    // rank comparisons (no floating-point thresholds needed)
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::int32_t a = ranks(k, 0), b = ranks(k, 1);
        std::size_t c1 = 0, c2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            c1 += (ranks(i, 0) <= a && ranks(i, 1) <= b);
            c2 += (ranks(i, 0) <= b && ranks(i, 1) <= a);
        }
        const double diff = (static_cast<double>(c1) - static_cast<double>(c2)) / nn;
        acc += diff * diff;
    }
    return acc / nn;
}

}  // namespace betacop
