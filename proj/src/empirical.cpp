#include "betacop/empirical.hpp"

#include "betacop/special.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace betacop {

RankMatrix compute_ranks(const Sample& sample) {
    if (sample.n == 0 || sample.d < 1) throw std::invalid_argument("compute_ranks: empty sample");
    const std::size_t n = sample.n, d = sample.d;
    RankMatrix ranks(n, d);
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return sample(a, j) < sample(b, j); });
        for (std::size_t k = 0; k + 1 < n; ++k)
            if (sample(order[k], j) == sample(order[k + 1], j))
                throw std::invalid_argument("compute_ranks: ties detected in column " +
                                            std::to_string(j));
        for (std::size_t k = 0; k < n; ++k)
            ranks(order[k], j) = static_cast<std::int32_t>(k + 1);
    }
    return ranks;
}

double rank_empirical_copula(const RankMatrix& ranks, std::span<const double> u) {
    if (u.size() != ranks.d) throw std::invalid_argument("rank_empirical_copula: dim mismatch");
    const std::size_t n = ranks.n, d = ranks.d;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool in = true;
        for (std::size_t j = 0; j < d; ++j)
            if (!rank_leq(ranks(i, j), u[j], n)) {
                in = false;
                break;
            }
        count += in;
    }
    return static_cast<double>(count) / static_cast<double>(n);
}

namespace {

// per-column sorted atoms with cumulative weights
struct WeightedColumn {
    std::vector<double> values;   // ascending
    std::vector<double> cumw;     // cumulative weights at each atom
};

WeightedColumn build_column(const Sample& s, std::span<const double> w, std::size_t j) {
    const std::size_t n = s.n;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return s(a, j) < s(b, j); });
    WeightedColumn col;
    col.values.reserve(n);
    col.cumw.reserve(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = s(order[k], j);
        const double wt = w.empty() ? 1.0 : w[order[k]];
        acc += wt;
        if (!col.values.empty() && col.values.back() == v)
            col.cumw.back() = acc;
        else {
            col.values.push_back(v);
            col.cumw.push_back(acc);
        }
    }
    return col;
}

// H^-(u): smallest atom whose cumulative weight reaches u * total
double generalized_inverse(const WeightedColumn& col, double u, double total) {
    const double target = u * total - kIndicatorSlack;
    auto it = std::lower_bound(col.cumw.begin(), col.cumw.end(), target);
    if (it == col.cumw.end()) return col.values.back();
    return col.values[static_cast<std::size_t>(it - col.cumw.begin())];
}

}  // namespace

double deheuvels_empirical_copula(const Sample& sample, std::span<const double> u) {
    return deheuvels_empirical_copula(sample, {}, u);
}

double deheuvels_empirical_copula(const Sample& sample, std::span<const double> weights,
                                  std::span<const double> u) {
    const std::size_t n = sample.n, d = sample.d;
    if (u.size() != d) throw std::invalid_argument("deheuvels_empirical_copula: dim mismatch");
    if (!weights.empty() && weights.size() != n)
        throw std::invalid_argument("deheuvels_empirical_copula: weight size mismatch");
    double total = 0.0;
    if (weights.empty())
        total = static_cast<double>(n);
    else
        for (double w : weights) total += w;
    if (total <= 0.0) throw std::invalid_argument("deheuvels_empirical_copula: zero total weight");

    std::vector<double> cut(d);
    for (std::size_t j = 0; j < d; ++j) {
        const WeightedColumn col = build_column(sample, weights, j);
        cut[j] = generalized_inverse(col, u[j], total);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        bool in = true;
        for (std::size_t j = 0; j < d; ++j)
            if (sample(i, j) > cut[j]) {
                in = false;
                break;
            }
        if (in) acc += weights.empty() ? 1.0 : weights[i];
    }
    return acc / total;
}

double beta_kernel(std::size_t n, std::int32_t r, double u) {
    if (r < 1 || static_cast<std::size_t>(r) > n)
        throw std::out_of_range("beta_kernel: rank outside 1..n");
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return reg_inc_beta(static_cast<double>(r), static_cast<double>(n - r + 1), u);
}

double empirical_beta_copula(const RankMatrix& ranks, std::span<const double> u) {
    const std::size_t n = ranks.n, d = ranks.d;
    if (u.size() != d) throw std::invalid_argument("empirical_beta_copula: dim mismatch");
    // one kernel column per coordinate, evaluated once per rank value
    std::vector<double> f((n + 1) * d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t r = 1; r <= n; ++r)
            f[r * d + j] = beta_kernel(n, static_cast<std::int32_t>(r), u[j]);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double prod = 1.0;
        for (std::size_t j = 0; j < d; ++j)
            prod *= f[static_cast<std::size_t>(ranks(i, j)) * d + j];
        acc += prod;
    }
    return acc / static_cast<double>(n);
}

BetaKernelTable::BetaKernelTable(std::size_t n, std::span<const double> us)
    : n_(n), m_(us.size()), us_(us.begin(), us.end()), f_((n + 1) * us.size(), 1.0) {
    for (std::size_t r = 1; r <= n_; ++r)
        for (std::size_t q = 0; q < m_; ++q)
            f_[r * m_ + q] = beta_kernel(n_, static_cast<std::int32_t>(r), us_[q]);
}

}  // namespace betacop
