#pragma once

#include "betacop/core.hpp"
#include "betacop/rng.hpp"

#include <span>
#include <string>

namespace betacop {

enum class Family { Clayton, GumbelHougaard, Frank, Gauss, Independence };

Family family_from_string(const std::string& s);
std::string family_name(Family f);

/// One-parameter bivariate copula. Admissible parameter ranges:
///   Clayton          theta in [-1, inf) \ {0}
///   Gumbel-Hougaard  theta in [1, inf)
///   Frank            theta in R \ {0}
///   Gauss            theta in (-1, 1)
/// |theta| < 1e-8 for Clayton/Frank/Gauss is treated as Independence
/// (removable singularity; avoids catastrophic cancellation near 0).
struct CopulaModel {
    Family family = Family::Independence;
    double theta = 0.0;
    int dim = 2;
};

/// Khoudraji asymmetrization of a bivariate base copula:
///   K_delta(u1, u2) = u1^delta * C(u1^(1-delta), u2),  delta in [0, 1].
struct KhoudrajiModel {
    CopulaModel base;
    double delta = 0.5;
};

/// Throws std::domain_error if the parameter is outside the family's range.
void check_model(const CopulaModel& m);
void check_model(const KhoudrajiModel& m);

double copula_cdf(const CopulaModel& m, std::span<const double> u);
double copula_cdf(const KhoudrajiModel& m, std::span<const double> u);

/// Closed-form first partial derivative dC/du_j on the open strip
/// 0 < u_j < 1. Used for the analytic limit-process covariance; the
/// resampling module estimates this quantity nonparametrically.
double copula_partial(const CopulaModel& m, std::span<const double> u, std::size_t j);
double copula_partial(const KhoudrajiModel& m, std::span<const double> u, std::size_t j);

/// log c_theta(u) for a strictly interior bivariate point. Points outside
/// the support of a negative-theta Clayton yield -infinity.
double copula_log_density(const CopulaModel& m, std::span<const double> u);

/// Score d/dtheta log c_theta(u), analytic per family. At the removable
/// theta=0 singularity (Clayton, Frank) returns the theta->0 limit.
double copula_score(const CopulaModel& m, std::span<const double> u);

/// n i.i.d. draws. Deterministic for a given rng state.
Sample copula_sample(const CopulaModel& m, std::size_t n, Rng& rng);
Sample copula_sample(const KhoudrajiModel& m, std::size_t n, Rng& rng);

/// Kendall's tau of the family at theta, and its inverse. The Frank
/// direction tau->theta is solved by bisection to 1e-10.
double tau_of_theta(Family f, double theta);
double theta_of_tau(Family f, double tau);

/// Spearman's rho of the family at theta (12 * int C - 3, tensor
/// Gauss-Legendre) and its bisection inverse. Harness plumbing for the
/// rho-targeted experiment presets.
double rho_of_theta(Family f, double theta);
double theta_of_rho(Family f, double rho);

}  // namespace betacop
