#include "betacop/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace betacop {

MultinomialWeights draw_multinomial_weights(std::size_t n, Rng& rng) {
    MultinomialWeights w;
    w.w.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) ++w.w[rng.index(n)];
    return w;
}

MultiplierWeights draw_two_point_multipliers(std::size_t n, Rng& rng) {
    MultiplierWeights mw;
    mw.mu = 1.0;
    mw.tau = 1.0;
    mw.xi.assign(n, 0.0);
    for (;;) {
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            mw.xi[i] = rng.uniform() < 0.5 ? 0.0 : 2.0;
            any = any || (mw.xi[i] > 0.0);
        }
        if (any) return mw;  // all-zero vector (prob 2^-n) is redrawn
    }
}

RankMatrix bootstrap_ranks(const RankMatrix& ranks, const MultinomialWeights& w) {
    const std::size_t n = ranks.n, d = ranks.d;
    if (w.w.size() != n) throw std::invalid_argument("bootstrap_ranks: weight size mismatch");
    RankMatrix out(n, d);
    // prefix sums of weights over rank order, per column
    std::vector<std::int32_t> pre(n + 1);
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(pre.begin(), pre.end(), 0);
        for (std::size_t k = 0; k < n; ++k)
            pre[static_cast<std::size_t>(ranks(k, j))] += w.w[k];
        for (std::size_t r = 1; r <= n; ++r) pre[r] += pre[r - 1];
        for (std::size_t i = 0; i < n; ++i)
            out(i, j) = pre[static_cast<std::size_t>(ranks(i, j))];
    }
    return out;
}

double straightforward_bootstrap_copula(const RankMatrix& ranks, const MultinomialWeights& w,
                                        std::span<const double> u) {
    const std::size_t n = ranks.n, d = ranks.d;
    if (u.size() != d) throw std::invalid_argument("straightforward_bootstrap_copula: dim mismatch");
    const RankMatrix rstar = bootstrap_ranks(ranks, w);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w.w[i] == 0) continue;
        bool in = true;
        for (std::size_t j = 0; j < d; ++j)
            if (!rank_leq(rstar(i, j), u[j], n)) {
                in = false;
                break;
            }
        if (in) acc += w.w[i];
    }
    return acc / static_cast<double>(n);
}

double beta_bootstrap_standard(const RankMatrix& ranks, const MultinomialWeights& w,
                               std::span<const double> u) {
    const std::size_t n = ranks.n, d = ranks.d;
    if (u.size() != d) throw std::invalid_argument("beta_bootstrap_standard: dim mismatch");
    const RankMatrix rstar = bootstrap_ranks(ranks, w);
    std::vector<double> f((n + 1) * d, 1.0);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t r = 1; r <= n; ++r)
            f[r * d + j] = beta_kernel(n, static_cast<std::int32_t>(r), u[j]);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w.w[i] == 0) continue;  // R*_ij >= 1 whenever W_i >= 1
        double prod = static_cast<double>(w.w[i]);
        for (std::size_t j = 0; j < d; ++j)
            prod *= f[static_cast<std::size_t>(rstar(i, j)) * d + j];
        acc += prod;
    }
    return acc / static_cast<double>(n);
}

double beta_bootstrap_standard(const RankMatrix& ranks, const MultinomialWeights& w,
                               const BetaKernelTable& table, std::span<const std::size_t> cols) {
    const std::size_t n = ranks.n, d = ranks.d;
    if (cols.size() != d) throw std::invalid_argument("beta_bootstrap_standard: cols mismatch");
    const RankMatrix rstar = bootstrap_ranks(ranks, w);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w.w[i] == 0) continue;
        double prod = static_cast<double>(w.w[i]);
        for (std::size_t j = 0; j < d; ++j) prod *= table.at(rstar(i, j), cols[j]);
        acc += prod;
    }
    return acc / static_cast<double>(n);
}

double estimate_partial_derivative(const RankMatrix& ranks, std::span<const double> u,
                                   std::size_t j) {
    const std::size_t d = ranks.d;
    if (u.size() != d || j >= d)
        throw std::invalid_argument("estimate_partial_derivative: bad arguments");
    const double h = 1.0 / std::sqrt(static_cast<double>(ranks.n));
    const double hi = std::min(u[j] + h, 1.0);
    const double lo = std::max(u[j] - h, 0.0);
    std::vector<double> pt(u.begin(), u.end());
    pt[j] = hi;
    const double chi = rank_empirical_copula(ranks, pt);
    pt[j] = lo;
    const double clo = rank_empirical_copula(ranks, pt);
    return std::clamp((chi - clo) / (hi - lo), 0.0, 1.0);
}

PdmReplicator::PdmReplicator(const RankMatrix& ranks, std::vector<std::vector<double>> grid)
    : ranks_(ranks), grid_(std::move(grid)) {
    const std::size_t d = ranks_.d;
    chat_.reserve(grid_.size());
    partial_.reserve(grid_.size());
    chat_marg_.reserve(grid_.size());
    std::vector<double> marg(d);
    for (const auto& u : grid_) {
        if (u.size() != d) throw std::invalid_argument("PdmReplicator: grid dim mismatch");
        chat_.push_back(rank_empirical_copula(ranks_, u));
        std::vector<double> p(d), cm(d);
        for (std::size_t j = 0; j < d; ++j) {
            p[j] = estimate_partial_derivative(ranks_, u, j);
            std::fill(marg.begin(), marg.end(), 1.0);
            marg[j] = u[j];
            cm[j] = rank_empirical_copula(ranks_, marg);
        }
        partial_.push_back(std::move(p));
        chat_marg_.push_back(std::move(cm));
    }
}

std::vector<double> PdmReplicator::replicate(const MultiplierWeights& xi) const {
    const std::size_t n = ranks_.n, d = ranks_.d;
    if (xi.xi.size() != n) throw std::invalid_argument("PdmReplicator: multiplier size mismatch");
    double xbar = 0.0;
    for (double x : xi.xi) xbar += x;
    xbar /= static_cast<double>(n);
    if (xbar <= 0.0) throw std::invalid_argument("PdmReplicator: all multipliers zero");
    const double scale = std::sqrt(static_cast<double>(n)) * xi.mu / xi.tau;

    std::vector<double> out(grid_.size());
    for (std::size_t p = 0; p < grid_.size(); ++p) {
        const auto& u = grid_[p];
        // C~o_n(u) = n^-1 sum_i (xi_i / xbar) prod_j 1{R_ij/n <= u_j}
        double co = 0.0;
        std::vector<double> co_marg(d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double wt = xi.xi[i] / xbar;
            if (wt == 0.0) continue;
            bool in = true;
            for (std::size_t j = 0; j < d; ++j) {
                if (rank_leq(ranks_(i, j), u[j], n))
                    co_marg[j] += wt;
                else
                    in = false;
            }
            if (in) co += wt;
        }
        co /= static_cast<double>(n);
        double alpha = scale * (co - chat_[p]);
        for (std::size_t j = 0; j < d; ++j) {
            const double beta_j = scale * (co_marg[j] / static_cast<double>(n) - chat_marg_[p][j]);
            alpha -= partial_[p][j] * beta_j;
        }
        out[p] = alpha;
    }
    return out;
}

std::vector<double> multiplier_pdm_replicate(const RankMatrix& ranks, const MultiplierWeights& xi,
                                             const std::vector<std::vector<double>>& grid) {
    return PdmReplicator(ranks, grid).replicate(xi);
}

Sample beta_copula_sample(const RankMatrix& ranks, std::size_t m, Rng& rng, bool symmetrize) {
    if (m < 1) throw std::invalid_argument("beta_copula_sample: m < 1");
    if (symmetrize && ranks.d != 2)
        throw std::invalid_argument("beta_copula_sample: symmetrize requires d = 2");
    const std::size_t n = ranks.n, d = ranks.d;
    const double np1 = static_cast<double>(n) + 1.0;
    Sample out(m, d);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t row = rng.index(n);
        for (std::size_t j = 0; j < d; ++j) {
            const double r = static_cast<double>(ranks(row, j));
            out(i, j) = rng.beta(r, np1 - r);
        }
        if (symmetrize && rng.uniform() < 0.5) std::swap(out(i, 0), out(i, 1));
    }
    return out;
}

RankMatrix rerank(const Sample& sample) {
    const std::size_t n = sample.n, d = sample.d;
    RankMatrix ranks(n, d);
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return sample(a, j) < sample(b, j); });
        // max-rank rule: equal values share the rank of the last of the block
        std::size_t k = 0;
        while (k < n) {
            std::size_t e = k;
            while (e + 1 < n && sample(order[e + 1], j) == sample(order[k], j)) ++e;
            for (std::size_t t = k; t <= e; ++t)
                ranks(order[t], j) = static_cast<std::int32_t>(e + 1);
            k = e + 1;
        }
    }
    return ranks;
}

Replicates smoothed_beta_bootstrap(const RankMatrix& ranks, const FallibleRankStatistic& stat,
                                   std::size_t B, std::uint64_t seed, bool symmetrize,
                                   std::size_t m) {
    if (B < 1) throw std::invalid_argument("smoothed_beta_bootstrap: B < 1");
    if (m == 0) m = ranks.n;
    Replicates rep;
    rep.scheme = symmetrize ? Scheme::BetaSmoothedSymmetrized : Scheme::BetaSmoothed;
    rep.values.reserve(B);
    for (std::size_t b = 0; b < B; ++b) {
        Rng rng(Rng::derive(seed, {b}));
        const Sample v = beta_copula_sample(ranks, m, rng, symmetrize);
        if (auto t = stat(rerank(v)))
            rep.values.push_back(*t);
        else
            ++rep.failures;
    }
    return rep;
}

Replicates smoothed_beta_bootstrap(const RankMatrix& ranks, const RankStatistic& stat,
                                   std::size_t B, std::uint64_t seed, bool symmetrize,
                                   std::size_t m) {
    return smoothed_beta_bootstrap(
        ranks, FallibleRankStatistic([&stat](const RankMatrix& r) { return std::optional<double>(stat(r)); }),
        B, seed, symmetrize, m);
}

Replicates parametric_bootstrap(Family family, double theta_hat, std::size_t n,
                                const std::function<std::optional<double>(const Sample&)>& estimator,
                                std::size_t B, std::uint64_t seed) {
    if (B < 1) throw std::invalid_argument("parametric_bootstrap: B < 1");
    const CopulaModel model{family, theta_hat, 2};
    check_model(model);
    Replicates rep;
    rep.scheme = Scheme::Parametric;
    rep.values.reserve(B);
    for (std::size_t b = 0; b < B; ++b) {
        Rng rng(Rng::derive(seed, {b}));
        const Sample s = copula_sample(model, n, rng);
        if (auto v = estimator(s))
            rep.values.push_back(*v);
        else
            ++rep.failures;
    }
    return rep;
}

}  // namespace betacop
