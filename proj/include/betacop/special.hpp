#pragma once

#include <span>
#include <vector>

namespace betacop {

/// Standard normal CDF.
double norm_cdf(double x);

/// Standard normal quantile.
double norm_quantile(double p);

/// Bivariate standard normal CDF P(X <= h, Y <= k) with correlation rho,
/// |rho| < 1. Sheppard/Owen arcsin-integral evaluated with composite
/// Gauss-Legendre, graded toward the endpoint for |rho| close to 1.
/// Absolute accuracy ~1e-13.
double binorm_cdf(double h, double k, double rho);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

/// Gauss-Legendre rule with m nodes on [0, 1].
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadRule gauss_legendre(int m);

/// First Debye function D1(x) = (1/x) int_0^x t/(e^t - 1) dt for x > 0.
/// Adaptive Simpson, absolute tolerance 1e-12.
double debye1(double x);

/// Type-7 empirical quantile (linear interpolation of order statistics) of a
/// SORTED vector.
double quantile_type7_sorted(std::span<const double> sorted, double p);

}  // namespace betacop
