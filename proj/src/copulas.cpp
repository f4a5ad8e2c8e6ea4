#include "betacop/copulas.hpp"

#include "betacop/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace betacop {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kThetaZeroTol = 1e-8;  // removable singularity cutoff

bool is_independence(const CopulaModel& m) {
    if (m.family == Family::Independence) return true;
    if (m.family == Family::Clayton || m.family == Family::Frank || m.family == Family::Gauss)
        return std::abs(m.theta) < kThetaZeroTol;
    return false;  // Gumbel theta=1 is exact independence but handled by its own formulas
}

void require_dim2(const CopulaModel& m, const char* op) {
    if (m.dim != 2 && m.family != Family::Independence)
        throw std::domain_error(std::string(op) + ": only d=2 supported for parametric families");
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

Family family_from_string(const std::string& s) {
    if (s == "clayton") return Family::Clayton;
    if (s == "gumbel") return Family::GumbelHougaard;
    if (s == "frank") return Family::Frank;
    if (s == "gauss") return Family::Gauss;
    if (s == "independence") return Family::Independence;
    throw std::domain_error("unknown copula family: " + s);
}

std::string family_name(Family f) {
    switch (f) {
        case Family::Clayton: return "clayton";
        case Family::GumbelHougaard: return "gumbel";
        case Family::Frank: return "frank";
        case Family::Gauss: return "gauss";
        case Family::Independence: return "independence";
    }
    return "?";
}

void check_model(const CopulaModel& m) {
    if (m.dim < 2) throw std::domain_error("CopulaModel: dim < 2");
    const double t = m.theta;
    switch (m.family) {
        case Family::Clayton:
            if (t < -1.0) throw std::domain_error("Clayton: theta < -1");
            break;
        case Family::GumbelHougaard:
            if (t < 1.0) throw std::domain_error("Gumbel-Hougaard: theta < 1");
            break;
        case Family::Frank:
        case Family::Gauss:
            if (m.family == Family::Gauss && !(t > -1.0 && t < 1.0))
                throw std::domain_error("Gauss: |theta| >= 1");
            break;
        case Family::Independence: break;
    }
}

void check_model(const KhoudrajiModel& m) {
    check_model(m.base);
    if (m.base.dim != 2) throw std::domain_error("KhoudrajiModel: base must be bivariate");
    if (!(m.delta >= 0.0 && m.delta <= 1.0)) throw std::domain_error("Khoudraji: delta outside [0,1]");
}

// ---------------------------------------------------------------------------
// CDFs
// ---------------------------------------------------------------------------

namespace {

// bivariate kernels on strictly interior points
double cdf_interior(const CopulaModel& m, double u, double v) {
    const double t = m.theta;
    switch (m.family) {
        case Family::Independence: return u * v;
        case Family::Clayton: {
            const double a = std::pow(u, -t) + std::pow(v, -t) - 1.0;
            if (a <= 0.0) return 0.0;  // outside support, theta < 0
            return std::pow(a, -1.0 / t);
        }
        case Family::GumbelHougaard: {
            const double x = -std::log(u), y = -std::log(v);
            const double w = std::pow(std::pow(x, t) + std::pow(y, t), 1.0 / t);
            return std::exp(-w);
        }
        case Family::Frank: {
            const double num = std::expm1(-t * u) * std::expm1(-t * v);
            return -std::log1p(num / std::expm1(-t)) / t;
        }
        case Family::Gauss:
            return binorm_cdf(norm_quantile(u), norm_quantile(v), t);
    }
    return 0.0;
}

}  // namespace

double copula_cdf(const CopulaModel& m, std::span<const double> u) {
    check_model(m);
    if (u.size() != static_cast<std::size_t>(m.dim))
        throw std::invalid_argument("copula_cdf: point dimension mismatch");
    for (double x : u)
        if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("copula_cdf: u outside [0,1]^d");

    // groundedness and uniform margins handled exactly
    for (double x : u)
        if (x == 0.0) return 0.0;
    std::vector<double> inner;
    for (double x : u)
        if (x < 1.0) inner.push_back(x);
    if (inner.empty()) return 1.0;
    if (inner.size() == 1) return inner[0];

    if (is_independence(m)) {
        double p = 1.0;
        for (double x : inner) p *= x;
        return p;
    }
    require_dim2(m, "copula_cdf");
    return clamp01(cdf_interior(m, inner[0], inner[1]));
}

double copula_cdf(const KhoudrajiModel& m, std::span<const double> u) {
    check_model(m);
    if (u.size() != 2) throw std::invalid_argument("copula_cdf: Khoudraji is bivariate");
    const double u1 = u[0], u2 = u[1];
    if (!(u1 >= 0.0 && u1 <= 1.0 && u2 >= 0.0 && u2 <= 1.0))
        throw std::domain_error("copula_cdf: u outside [0,1]^2");
    if (u1 == 0.0 || u2 == 0.0) return 0.0;
    const double base_pt[2] = {std::pow(u1, 1.0 - m.delta), u2};
    return clamp01(std::pow(u1, m.delta) * copula_cdf(m.base, base_pt));
}

double copula_partial(const CopulaModel& m, std::span<const double> u, std::size_t j) {
    check_model(m);
    if (u.size() != 2 || j > 1) throw std::invalid_argument("copula_partial: bivariate only");
    const double uj = u[j], uo = u[1 - j];  // families below are exchangeable
    if (!(uj > 0.0 && uj < 1.0)) throw std::domain_error("copula_partial: u_j on boundary");
    if (uo == 0.0) return 0.0;
    if (uo == 1.0) return 1.0;
    if (is_independence(m)) return uo;
    const double t = m.theta;
    switch (m.family) {
        case Family::Independence: return uo;
        case Family::Clayton: {
            const double a = std::pow(uj, -t) + std::pow(uo, -t) - 1.0;
            if (a <= 0.0) return 0.0;
            return std::pow(uj, -t - 1.0) * std::pow(a, -1.0 / t - 1.0);
        }
        case Family::GumbelHougaard: {
            const double x = -std::log(uj), y = -std::log(uo);
            const double a = std::pow(x, t) + std::pow(y, t);
            const double w = std::pow(a, 1.0 / t);
            return std::exp(-w) * std::pow(a, 1.0 / t - 1.0) * std::pow(x, t - 1.0) / uj;
        }
        case Family::Frank: {
            const double ej = std::expm1(-t * uj), eo = std::expm1(-t * uo);
            // dC/du_j = e^{-t u_j} eo / (expm1(-t) + ej*eo)
            return std::exp(-t * uj) * eo / (std::expm1(-t) + ej * eo);
        }
        case Family::Gauss: {
            const double x = norm_quantile(uj), y = norm_quantile(uo);
            return norm_cdf((y - t * x) / std::sqrt(1.0 - t * t));
        }
    }
    return 0.0;
}

double copula_partial(const KhoudrajiModel& m, std::span<const double> u, std::size_t j) {
    check_model(m);
    if (u.size() != 2 || j > 1) throw std::invalid_argument("copula_partial: bivariate only");
    const double d = m.delta, u1 = u[0], u2 = u[1];
    const double b1 = std::pow(u1, 1.0 - d);
    const double pt[2] = {b1, u2};
    if (j == 0) {
        // d/du1 [u1^d C(u1^{1-d}, u2)]
        double res = 0.0;
        if (d > 0.0) res += d * std::pow(u1, d - 1.0) * copula_cdf(m.base, pt);
        if (d < 1.0) res += (1.0 - d) * copula_partial(m.base, pt, 0);
        return res;
    }
    return std::pow(u1, d) * copula_partial(m.base, pt, 1);
}

// ---------------------------------------------------------------------------
// log density and score
// ---------------------------------------------------------------------------

double copula_log_density(const CopulaModel& m, std::span<const double> u) {
    check_model(m);
    require_dim2(m, "copula_log_density");
    if (u.size() != 2) throw std::invalid_argument("copula_log_density: bivariate point expected");
    const double x = u[0], y = u[1];
    if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0))
        throw std::domain_error("copula_log_density: boundary point");
    if (is_independence(m)) return 0.0;
    const double t = m.theta;
    switch (m.family) {
        case Family::Independence: return 0.0;
        case Family::Clayton: {
            const double a = std::pow(x, -t) + std::pow(y, -t) - 1.0;
            if (a <= 0.0) return -std::numeric_limits<double>::infinity();
            if (1.0 + t <= 0.0) return -std::numeric_limits<double>::infinity();  // theta = -1
            return std::log1p(t) - (t + 1.0) * (std::log(x) + std::log(y)) -
                   (2.0 + 1.0 / t) * std::log(a);
        }
        case Family::GumbelHougaard: {
            const double lx = -std::log(x), ly = -std::log(y);
            const double a = std::pow(lx, t) + std::pow(ly, t);
            const double w = std::pow(a, 1.0 / t);
            return -w + lx + ly + (t - 1.0) * (std::log(lx) + std::log(ly)) +
                   (1.0 / t - 2.0) * std::log(a) + std::log(w + t - 1.0);
        }
        case Family::Frank: {
            const double den = -std::expm1(-t) - std::expm1(-t * x) * std::expm1(-t * y);
            // t * (1 - e^{-t}) > 0 for every t != 0
            return std::log(t * -std::expm1(-t)) - t * (x + y) - 2.0 * std::log(std::abs(den));
        }
        case Family::Gauss: {
            const double a = norm_quantile(x), b = norm_quantile(y);
            const double r2 = t * t;
            return -0.5 * std::log1p(-r2) -
                   (r2 * (a * a + b * b) - 2.0 * t * a * b) / (2.0 * (1.0 - r2));
        }
    }
    return 0.0;
}

double copula_score(const CopulaModel& m, std::span<const double> u) {
    check_model(m);
    require_dim2(m, "copula_score");
    if (u.size() != 2) throw std::invalid_argument("copula_score: bivariate point expected");
    const double x = u[0], y = u[1];
    if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0))
        throw std::domain_error("copula_score: boundary point");
    const double t = m.theta;
    switch (m.family) {
        case Family::Independence: return 0.0;
        case Family::Clayton: {
            if (std::abs(t) < kThetaZeroTol)  // theta -> 0 limit of the Clayton score
                return (1.0 + std::log(x)) * (1.0 + std::log(y));
            const double px = std::pow(x, -t), py = std::pow(y, -t);
            const double a = px + py - 1.0;
            if (a <= 0.0 || 1.0 + t <= 0.0) return 0.0;  // outside support: density 0
            const double ap = -px * std::log(x) - py * std::log(y);  // dA/dtheta
            return 1.0 / (1.0 + t) - std::log(x) - std::log(y) + std::log(a) / (t * t) -
                   (2.0 + 1.0 / t) * ap / a;
        }
        case Family::GumbelHougaard: {
            const double lx = -std::log(x), ly = -std::log(y);
            const double pxt = std::pow(lx, t), pyt = std::pow(ly, t);
            const double a = pxt + pyt;
            const double la = std::log(a);
            const double a1 = pxt * std::log(lx) + pyt * std::log(ly);  // da/dtheta
            const double w = std::pow(a, 1.0 / t);
            const double dw = w * (-la / (t * t) + a1 / (t * a));
            return -dw + std::log(lx) + std::log(ly) - la / (t * t) + (1.0 / t - 2.0) * a1 / a +
                   (dw + 1.0) / (w + t - 1.0);
        }
        case Family::Frank: {
            if (std::abs(t) < kThetaZeroTol)  // theta -> 0 limit of the Frank score
                return 0.5 * (1.0 - 2.0 * x) * (1.0 - 2.0 * y);
            const double ex = std::expm1(-t * x), ey = std::expm1(-t * y);
            const double emt = std::expm1(-t);
            const double den = -emt - ex * ey;
            // d/dtheta of log|t| + log(-expm1(-t)) - t(x+y) - 2 log(den)
            const double dden = std::exp(-t) -
                                (x * std::exp(-t * x) * (-ey) + y * std::exp(-t * y) * (-ex));
            // note: den = (1-e^-t) - (1-e^-tx)(1-e^-ty); d/dt (1-e^-t) = e^-t;
            // d/dt (1-e^-tx)(1-e^-ty) = x e^-tx (1-e^-ty) + y e^-ty (1-e^-tx)
            return 1.0 / t + std::exp(-t) / (-emt) - (x + y) - 2.0 * dden / den;
        }
        case Family::Gauss: {
            const double a = norm_quantile(x), b = norm_quantile(y);
            const double r2 = t * t, om = 1.0 - r2;
            return t / om - (t * (a * a + b * b) - (1.0 + r2) * a * b) / (om * om);
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace {

// positive stable S with Laplace transform exp(-s^alpha), 0 < alpha < 1
// (Chambers-Mallows-Stuck)
double positive_stable(double alpha, Rng& rng) {
    const double v = kPi * rng.uniform();
    const double e = rng.exponential();
    const double s1 = std::sin(alpha * v) / std::pow(std::sin(v), 1.0 / alpha);
    const double s2 = std::pow(std::sin((1.0 - alpha) * v) / e, (1.0 - alpha) / alpha);
    return s1 * s2;
}

void sample_pair(const CopulaModel& m, Rng& rng, double& u, double& v) {
    const double t = m.theta;
    switch (m.family) {
        case Family::Independence:
            u = rng.uniform();
            v = rng.uniform();
            return;
        case Family::Clayton: {
            u = rng.uniform();
            const double w = rng.uniform();
            // conditional inversion; valid for theta > 0 and theta in (-1, 0)
            const double b = 1.0 + std::pow(u, -t) * (std::pow(w, -t / (1.0 + t)) - 1.0);
            v = std::pow(std::max(b, 1e-300), -1.0 / t);
            v = std::clamp(v, 1e-15, 1.0 - 1e-15);
            return;
        }
        case Family::GumbelHougaard: {
            if (t - 1.0 < kThetaZeroTol) {
                u = rng.uniform();
                v = rng.uniform();
                return;
            }
            const double s = positive_stable(1.0 / t, rng);
            u = std::exp(-std::pow(rng.exponential() / s, 1.0 / t));
            v = std::exp(-std::pow(rng.exponential() / s, 1.0 / t));
            u = std::clamp(u, 1e-15, 1.0 - 1e-15);
            v = std::clamp(v, 1e-15, 1.0 - 1e-15);
            return;
        }
        case Family::Frank: {
            u = rng.uniform();
            const double w = rng.uniform();
            const double y = w * std::expm1(-t) / (w + std::exp(-t * u) * (1.0 - w));
            v = -std::log1p(y) / t;
            v = std::clamp(v, 1e-15, 1.0 - 1e-15);
            return;
        }
        case Family::Gauss: {
            const double z1 = rng.normal(), z2 = rng.normal();
            u = norm_cdf(z1);
            v = norm_cdf(t * z1 + std::sqrt(1.0 - t * t) * z2);
            u = std::clamp(u, 1e-15, 1.0 - 1e-15);
            v = std::clamp(v, 1e-15, 1.0 - 1e-15);
            return;
        }
    }
}

}  // namespace

Sample copula_sample(const CopulaModel& m, std::size_t n, Rng& rng) {
    check_model(m);
    if (n < 1) throw std::invalid_argument("copula_sample: n < 1");
    if (m.family == Family::Independence || is_independence(m)) {
        Sample s(n, static_cast<std::size_t>(m.dim));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < s.d; ++j) s(i, j) = rng.uniform();
        return s;
    }
    require_dim2(m, "copula_sample");
    Sample s(n, 2);
    for (std::size_t i = 0; i < n; ++i) sample_pair(m, rng, s(i, 0), s(i, 1));
    return s;
}

Sample copula_sample(const KhoudrajiModel& m, std::size_t n, Rng& rng) {
    check_model(m);
    if (n < 1) throw std::invalid_argument("copula_sample: n < 1");
    const double d = m.delta;
    Sample s(n, 2);
    if (d <= 0.0) return copula_sample(m.base, n, rng);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.uniform();
        double b1, b2;
        sample_pair(m.base, rng, b1, b2);
        // max construction: (max(A^{1/delta}, B1^{1/(1-delta)}), B2) ~ K_delta
        double first = std::pow(a, 1.0 / d);
        if (d < 1.0) first = std::max(first, std::pow(b1, 1.0 / (1.0 - d)));
        s(i, 0) = first;
        s(i, 1) = b2;
    }
    return s;
}

// ---------------------------------------------------------------------------
// tau / rho maps
// ---------------------------------------------------------------------------

double tau_of_theta(Family f, double theta) {
    check_model(CopulaModel{f, theta, 2});
    switch (f) {
        case Family::Independence: return 0.0;
        case Family::Clayton:
            if (std::abs(theta) < kThetaZeroTol) return 0.0;
            return theta / (theta + 2.0);
        case Family::GumbelHougaard: return 1.0 - 1.0 / theta;
        case Family::Gauss:
            if (std::abs(theta) < kThetaZeroTol) return 0.0;
            return 2.0 / kPi * std::asin(theta);
        case Family::Frank: {
            if (std::abs(theta) < kThetaZeroTol) return 0.0;
            const double a = std::abs(theta);
            const double tau = 1.0 - 4.0 / a * (1.0 - debye1(a));
            return theta > 0 ? tau : -tau;
        }
    }
    return 0.0;
}

namespace {

// monotone bisection for tau/rho inverses
template <typename F>
double bisect(F f, double target, double lo, double hi, double tol) {
    double flo = f(lo) - target, fhi = f(hi) - target;
    if (flo * fhi > 0.0) throw std::domain_error("inverse map: target outside attainable range");
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid) - target;
        if (flo * fm <= 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double theta_of_tau(Family f, double tau) {
    switch (f) {
        case Family::Independence:
            if (tau != 0.0) throw std::domain_error("Independence: tau must be 0");
            return 0.0;
        case Family::Clayton: {
            if (!(tau > -1.0 && tau < 1.0)) throw std::domain_error("Clayton: tau outside (-1,1)");
            const double th = 2.0 * tau / (1.0 - tau);
            if (th < -1.0) throw std::domain_error("Clayton: tau unattainable");
            return th;
        }
        case Family::GumbelHougaard:
            if (!(tau >= 0.0 && tau < 1.0))
                throw std::domain_error("Gumbel-Hougaard: tau outside [0,1)");
            return 1.0 / (1.0 - tau);
        case Family::Gauss:
            if (!(tau > -1.0 && tau < 1.0)) throw std::domain_error("Gauss: tau outside (-1,1)");
            return std::sin(kPi * tau / 2.0);
        case Family::Frank: {
            if (tau == 0.0) return 0.0;
            const double a = std::abs(tau);
            const double hi = 500.0;
            if (a >= tau_of_theta(Family::Frank, hi))
                throw std::domain_error("Frank: |tau| too large for solver range");
            const double th =
                bisect([](double t) { return tau_of_theta(Family::Frank, t); }, a, 1e-6, hi, 1e-10);
            return tau > 0 ? th : -th;
        }
    }
    return 0.0;
}

double rho_of_theta(Family f, double theta) {
    check_model(CopulaModel{f, theta, 2});
    if (f == Family::Independence) return 0.0;
    if (f == Family::Gauss) return 6.0 / kPi * std::asin(theta / 2.0);
    const CopulaModel m{f, theta, 2};
    if (is_independence(m)) return 0.0;
    static const QuadRule rule = gauss_legendre(64);
    double acc = 0.0;
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j)
            acc += rule.weights[i] * rule.weights[j] *
                   cdf_interior(m, rule.nodes[i], rule.nodes[j]);
    return 12.0 * acc - 3.0;
}

double theta_of_rho(Family f, double rho) {
    switch (f) {
        case Family::Independence:
            if (rho != 0.0) throw std::domain_error("Independence: rho must be 0");
            return 0.0;
        case Family::Gauss:
            if (!(rho > -1.0 && rho < 1.0)) throw std::domain_error("Gauss: rho outside (-1,1)");
            return 2.0 * std::sin(kPi * rho / 6.0);
        case Family::Clayton: {
            if (rho == 0.0) return 0.0;
            if (rho > 0)
                return bisect([](double t) { return rho_of_theta(Family::Clayton, t); }, rho, 1e-6,
                              60.0, 1e-9);
            return bisect([](double t) { return rho_of_theta(Family::Clayton, t); }, rho, -0.9999,
                          -1e-6, 1e-9);
        }
        case Family::GumbelHougaard:
            if (rho == 0.0) return 1.0;
            return bisect([](double t) { return rho_of_theta(Family::GumbelHougaard, t); }, rho,
                          1.0, 60.0, 1e-9);
        case Family::Frank: {
            if (rho == 0.0) return 0.0;
            const double a = std::abs(rho);
            const double th = bisect([](double t) { return rho_of_theta(Family::Frank, t); }, a,
                                     1e-6, 300.0, 1e-9);
            return rho > 0 ? th : -th;
        }
    }
    return 0.0;
}

}  // namespace betacop
