#include "betacop/special.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betacop {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_quantile: p outside (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return boost::math::ibeta(a, b, x);
}

namespace {

// 24-node Gauss-Legendre on [-1,1].
constexpr int kBvnNodes = 24;
const double* bvn_abscissae() {
    static const QuadRule r = gauss_legendre(kBvnNodes);
    return r.nodes.data();
}
const double* bvn_weights() {
    static const QuadRule r = gauss_legendre(kBvnNodes);
    return r.weights.data();
}

// integrand of the Sheppard/Owen representation at angle t
inline double bvn_integrand(double h, double k, double t) {
    const double c = std::cos(t);
    return std::exp(-(h * h - 2.0 * h * k * std::sin(t) + k * k) / (2.0 * c * c));
}

}  // namespace

double binorm_cdf(double h, double k, double rho) {
    if (!(rho > -1.0 && rho < 1.0)) throw std::domain_error("binorm_cdf: |rho| >= 1");
    if (rho == 0.0) return norm_cdf(h) * norm_cdf(k);

    const double upper = std::asin(rho);
    // Panels of [0, upper]; graded toward `upper` when rho is near +-1,
    // where the integrand develops a boundary layer of width ~cos(t).
    std::vector<std::pair<double, double>> panels;
    if (std::abs(rho) < 0.9) {
        panels.emplace_back(0.0, 1.0);
    } else {
        double s = 1.0;
        for (int depth = 0; depth < 60; ++depth) {
            panels.emplace_back(1.0 - s, 1.0 - s / 2.0);
            s /= 2.0;
        }
        panels.emplace_back(1.0 - s, 1.0);
    }

    const double* xs = bvn_abscissae();  // nodes on [0,1]
    const double* ws = bvn_weights();
    double integral = 0.0;
    for (auto [a, b] : panels) {
        const double lo = a * upper, hi = b * upper;
        const double len = hi - lo;
        double acc = 0.0;
        for (int q = 0; q < kBvnNodes; ++q) acc += ws[q] * bvn_integrand(h, k, lo + len * xs[q]);
        integral += acc * len;
    }
    const double pi = 3.14159265358979323846;
    double p = norm_cdf(h) * norm_cdf(k) + integral / (2.0 * pi);
    return std::clamp(p, 0.0, 1.0);
}

QuadRule gauss_legendre(int m) {
    if (m < 1) throw std::invalid_argument("gauss_legendre: m < 1");
    QuadRule rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    const double pi = 3.14159265358979323846;
    // Newton iteration on P_m, nodes on [-1,1]; symmetric pairs.
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = m * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.nodes[i] = x;
        rule.weights[i] = w;
        rule.nodes[m - 1 - i] = -x;
        rule.weights[m - 1 - i] = w;
    }
    // map [-1,1] -> [0,1]; store ascending
    for (int i = 0; i < m; ++i) {
        rule.nodes[i] = 0.5 * (1.0 - rule.nodes[i]);
        rule.weights[i] *= 0.5;
    }
    std::reverse(rule.nodes.begin(), rule.nodes.end());
    std::reverse(rule.weights.begin(), rule.weights.end());
    return rule;
}

namespace {

inline double debye_integrand(double t) {
    if (t < 1e-8) return 1.0 - t / 2.0;  // t/(e^t-1) ~ 1 - t/2 + t^2/12
    return t / std::expm1(t);
}

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(double a, double b, double fa, double fm, double fb, double whole, double tol,
             int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = debye_integrand(lm), frm = debye_integrand(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adapt(m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double debye1(double x) {
    if (x <= 0.0) throw std::domain_error("debye1: x <= 0");
    const double fa = debye_integrand(0.0);
    const double fm = debye_integrand(0.5 * x);
    const double fb = debye_integrand(x);
    const double whole = simpson(0.0, x, fa, fm, fb);
    const double integral = adapt(0.0, x, fa, fm, fb, whole, 1e-12, 48);
    return integral / x;
}

double quantile_type7_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile_type7_sorted: empty input");
    if (sorted.size() == 1) return sorted[0];
    p = std::clamp(p, 0.0, 1.0);
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace betacop
