#pragma once

#include "betacop/copulas.hpp"
#include "betacop/core.hpp"

#include <optional>
#include <vector>

namespace betacop {

/// Sample Kendall's tau with the Hollander-Wolfe-Chicken variance estimate.
struct KendallResult {
    double tau_hat = 0.0;
    double sigma_hat = 0.0;  // estimated std. dev. of tau_hat
    long long concordance = 0;  // K = sum_{i<k} Q_{k,i}
};

KendallResult kendall_tau(const RankMatrix& ranks);

/// Sample Spearman's rho, 12/[n(n^2-1)] sum (R_i1 - (n+1)/2)(R_i2 - (n+1)/2).
double spearman_rho(const RankMatrix& ranks);

/// Spearman's rho of the empirical beta copula, in closed form:
///   12/n sum_i (1 - R_i1/(n+1))(1 - R_i2/(n+1)) - 3
/// Equals ((n-1)/(n+1)) * spearman_rho(ranks) for permutation ranks.
double spearman_rho_beta_copula(const RankMatrix& ranks);

/// Pseudo-observations U_ij = R_ij / (n+1).
Sample pseudo_observations(const RankMatrix& ranks);

/// Pseudo-likelihood fit of a one-parameter family: maximizes
/// sum_k log c_theta(U_k) over the family's parameter range, bracketed from
/// theta_of_tau around the sample tau. `boundary` is set when the optimizer
/// ends at the bracket edge (recorded, not fatal, for Monte Carlo
/// skip-and-count).
struct PleResult {
    double theta_hat = 0.0;
    bool boundary = false;
};

PleResult pseudo_likelihood_estimate(const RankMatrix& ranks, Family family);

/// Genest-Ghoudi-Rivest sandwich estimate of the asymptotic variance of
/// sqrt(n)(theta_hat - theta). Score derivatives in theta and u by central
/// finite differences with step h (default 1e-4). Returns nullopt when the
/// estimated information is non-positive.
std::optional<double> ggr_asymptotic_variance(const RankMatrix& ranks, Family family,
                                              double theta_hat, double h = 1e-4);

/// Exact integrals of beta-kernel products, precomputed by Gauss-Legendre
/// rules sized to the polynomial degrees (n+1 nodes for B, ceil(3n/2)+1 for
/// C):
///   B(r,s)   = int_0^1 F_{n,r} F_{n,s} du
///   C(r,s,t) = int_0^1 F_{n,r} F_{n,s} dF_{n,t}
/// The C tensor is materialized for n <= 200; above that, per-t slices are
/// computed on demand (O(n^2) memory per slice).
class IntegralTables {
  public:
    explicit IntegralTables(std::size_t n, bool build_c = true, int extra_nodes = 0);

    std::size_t n() const { return n_; }
    double B(std::int32_t r, std::int32_t s) const {
        return b_[static_cast<std::size_t>(r - 1) * n_ + static_cast<std::size_t>(s - 1)];
    }
    bool has_c_tensor() const { return !c_.empty(); }
    double C(std::int32_t r, std::int32_t s, std::int32_t t) const;

    /// Fills `slice` (n x n, row-major, 1-based ranks flattened) with
    /// C(., ., t). Thread-safe: writes only to the caller's buffer.
    void c_slice(std::int32_t t, std::vector<double>& slice) const;

  private:
    std::size_t n_ = 0;
    std::vector<double> b_;       // n x n
    std::vector<double> c_;      // n^3 when materialized
    // quadrature data for on-demand slices
    std::vector<double> cnodes_, cweights_;
    std::vector<double> fker_;   // F_{n,r}(x_q), n x Q
    std::vector<double> fdens_;  // beta density f_{n,t}(x_q), n x Q
};

IntegralTables integral_tables(std::size_t n);

/// Symmetry test statistics (d = 2). All are >= 0 up to numerical slack and
/// vanish on coordinate-exchangeable rank matrices.
double symmetry_stat_Rn_beta(const RankMatrix& ranks, const IntegralTables& tables);
double symmetry_stat_Sn_beta(const RankMatrix& ranks, const IntegralTables& tables);
double symmetry_stat_Rn(const RankMatrix& ranks);
double symmetry_stat_Sn(const RankMatrix& ranks);

}  // namespace betacop
