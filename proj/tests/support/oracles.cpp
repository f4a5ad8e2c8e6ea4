#include "support/oracles.hpp"

#include "betacop/empirical.hpp"
#include "betacop/special.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

namespace betacop::oracle {

double beta_kernel_binomial_sum(std::size_t n, std::int32_t r, double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double lu = std::log(u), l1u = std::log1p(-u);
    const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
    double acc = 0.0;
    for (std::size_t s = static_cast<std::size_t>(r); s <= n; ++s) {
        const double lterm = lgn - std::lgamma(static_cast<double>(s) + 1.0) -
                             std::lgamma(static_cast<double>(n - s) + 1.0) +
                             static_cast<double>(s) * lu + static_cast<double>(n - s) * l1u;
        acc += std::exp(lterm);
    }
    return acc;
}

RankMatrix random_rank_matrix(std::size_t n, std::size_t d, Rng& rng) {
    RankMatrix m(n, d);
    std::vector<std::int32_t> perm(n);
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(perm.begin(), perm.end(), 1);
        for (std::size_t i = n; i > 1; --i)
            std::swap(perm[i - 1], perm[rng.index(i)]);
        for (std::size_t i = 0; i < n; ++i) m(i, j) = perm[i];
    }
    return m;
}

RankMatrix exchangeable_rank_matrix(std::size_t n, Rng& rng) {
    if (n % 2 != 0) throw std::invalid_argument("exchangeable_rank_matrix: n must be even");
    // pair up ranks (a,b) and add both orientations
    std::vector<std::int32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 1);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
    RankMatrix m(n, 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        m(2 * k, 0) = perm[2 * k];
        m(2 * k, 1) = perm[2 * k + 1];
        m(2 * k + 1, 0) = perm[2 * k + 1];
        m(2 * k + 1, 1) = perm[2 * k];
    }
    return m;
}

void graded_gl_rule(std::vector<double>& nodes, std::vector<double>& weights) {
    static std::vector<double> cached_nodes, cached_weights;
    if (cached_nodes.empty()) {
        const QuadRule gl = gauss_legendre(64);
        std::vector<std::pair<double, double>> half;  // panels of (0, 1/2)
        double s = 0.5;
        for (int k = 0; k < 16; ++k) {
            half.emplace_back(s / 2.0, s);
            s /= 2.0;
        }
        half.emplace_back(0.0, s);  // final sliver down to 0
        std::vector<std::pair<double, double>> panels;
        for (auto [a, b] : half) panels.emplace_back(a, b);
        for (auto [a, b] : half) panels.emplace_back(1.0 - b, 1.0 - a);
        for (auto [a, b] : panels) {
            const double len = b - a;
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                cached_nodes.push_back(a + len * gl.nodes[q]);
                cached_weights.push_back(len * gl.weights[q]);
            }
        }
    }
    nodes = cached_nodes;
    weights = cached_weights;
}

namespace {

double density(const CopulaModel& m, double u, double v) {
    const double pt[2] = {u, v};
    const double l = copula_log_density(m, pt);
    return std::isfinite(l) ? std::exp(l) : 0.0;
}

// Clayton theta < 0: integrate v over the conditional support (v0(u), 1)
// through y = v^|theta| and y = y0 + (1-y0) s^2, which makes the
// support-boundary factor A = (1-y0) s^2 exact.
double clayton_negative_mass(const CopulaModel& m) {
    const double t = m.theta, at = -t;
    std::vector<double> xs, ws;
    graded_gl_rule(xs, ws);
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double u = xs[i];
        const double y0 = 1.0 - std::pow(u, at);
        double inner = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double s = xs[k];
            const double y = y0 + (1.0 - y0) * s * s;
            const double a = (1.0 - y0) * s * s;
            const double v = std::pow(y, 1.0 / at);
            const double dv_dy = (1.0 / at) * std::pow(y, 1.0 / at - 1.0);
            const double c = (1.0 + t) * std::pow(u * v, -t - 1.0) * std::pow(a, -2.0 - 1.0 / t);
            inner += ws[k] * c * dv_dy * 2.0 * (1.0 - y0) * s;
        }
        total += ws[i] * inner;
    }
    return total;
}

}  // namespace

double density_mass(const CopulaModel& m) {
    if (m.family == Family::Clayton && m.theta < 0.0) return clayton_negative_mass(m);
    std::vector<double> xs, ws;
    graded_gl_rule(xs, ws);
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double inner = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) inner += ws[k] * density(m, xs[i], xs[k]);
        total += ws[i] * inner;
    }
    return total;
}

double tensor_gl(const std::function<double(double, double)>& f, int m) {
    const QuadRule rule = gauss_legendre(m);
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            acc += rule.weights[i] * rule.weights[j] * f(rule.nodes[i], rule.nodes[j]);
    return acc;
}

namespace {

bool load_matrix(const std::string& path, std::size_t k, std::vector<double>& out) {
    std::ifstream in(path);
    if (!in) return false;
    out.assign(k * k, 0.0);
    for (auto& v : out)
        if (!(in >> v)) return false;
    return true;
}

void save_matrix(const std::string& path, std::size_t k, const std::vector<double>& m) {
    std::ofstream out(path);
    out.precision(17);
    for (std::size_t i = 0; i < k * k; ++i) out << m[i] << (i % k == k - 1 ? '\n' : ' ');
}

}  // namespace

std::vector<double> covariance_truth_oracle(const CopulaModel& m,
                                            const std::vector<std::vector<double>>& grid,
                                            std::size_t n, std::size_t samples,
                                            std::uint64_t seed, const std::string& cache_path,
                                            int threads) {
    const std::size_t k = grid.size();
    std::vector<double> cov;
    if (!cache_path.empty() && load_matrix(cache_path, k, cov)) return cov;

    // per-grid-point truth C(u) and order-statistic index floor(n u_j)
    std::vector<double> truth(k);
    std::vector<std::array<std::size_t, 2>> idx(k);
    for (std::size_t p = 0; p < k; ++p) {
        truth[p] = copula_cdf(m, grid[p]);
        for (std::size_t j = 0; j < 2; ++j)
            idx[p][j] = static_cast<std::size_t>(
                std::floor(static_cast<double>(n) * grid[p][j] + kIndicatorSlack));
    }

    // accumulate process values sqrt(n)(C~_n - C) per sample
    std::vector<double> procs(samples * k);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        std::vector<double> col1(n), col2(n), s1(n), s2(n);
        for (;;) {
            const std::size_t s = next.fetch_add(1);
            if (s >= samples) return;
            Rng rng(Rng::derive(seed, {s}));
            const Sample smp = copula_sample(m, n, rng);
            for (std::size_t i = 0; i < n; ++i) {
                col1[i] = smp(i, 0);
                col2[i] = smp(i, 1);
            }
            // distinct order-statistic thresholds per coordinate
            for (std::size_t p = 0; p < k; ++p) {
                s1 = col1;
                s2 = col2;
                const std::size_t k1 = idx[p][0], k2 = idx[p][1];
                std::nth_element(s1.begin(), s1.begin() + (k1 - 1), s1.end());
                std::nth_element(s2.begin(), s2.begin() + (k2 - 1), s2.end());
                const double q1 = s1[k1 - 1], q2 = s2[k2 - 1];
                std::size_t cnt = 0;
                for (std::size_t i = 0; i < n; ++i) cnt += (col1[i] <= q1 && col2[i] <= q2);
                procs[s * k + p] = std::sqrt(static_cast<double>(n)) *
                                   (static_cast<double>(cnt) / static_cast<double>(n) - truth[p]);
            }
        }
    };
    std::vector<std::thread> pool;
    const int nt = std::max(threads, 1);
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<double> mean(k, 0.0);
    for (std::size_t s = 0; s < samples; ++s)
        for (std::size_t p = 0; p < k; ++p) mean[p] += procs[s * k + p];
    for (auto& x : mean) x /= static_cast<double>(samples);
    cov.assign(k * k, 0.0);
    for (std::size_t s = 0; s < samples; ++s)
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = p; q < k; ++q)
                cov[p * k + q] += (procs[s * k + p] - mean[p]) * (procs[s * k + q] - mean[q]);
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t q = p; q < k; ++q) {
            cov[p * k + q] /= static_cast<double>(samples - 1);
            cov[q * k + p] = cov[p * k + q];
        }
    if (!cache_path.empty()) save_matrix(cache_path, k, cov);
    return cov;
}

namespace {

// counts inversions while merge-sorting v
std::uint64_t count_inversions(std::vector<std::int32_t>& v, std::vector<std::int32_t>& buf,
                               std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[i] <= v[j])
            buf[k++] = v[i++];
        else {
            inv += mid - i;
            buf[k++] = v[j++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
    return inv;
}

}  // namespace

double kendall_tau_fast(const RankMatrix& ranks) {
    const std::size_t n = ranks.n;
    // order second-column ranks by the first column; discordant pairs are
    // exactly the inversions of that sequence
    std::vector<std::int32_t> seq(n);
    for (std::size_t i = 0; i < n; ++i)
        seq[static_cast<std::size_t>(ranks(i, 0)) - 1] = ranks(i, 1);
    std::vector<std::int32_t> buf(n);
    const std::uint64_t inv = count_inversions(seq, buf, 0, n);
    const double pairs = 0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1.0);
    return 1.0 - 2.0 * static_cast<double>(inv) / pairs;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] <= b[ib])
            ++ia;
        else
            ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    return d;
}

}  // namespace betacop::oracle
