#pragma once

#include "betacop/core.hpp"

#include <span>
#include <vector>

namespace betacop {

/// Coordinatewise ranks R_ij = #{k : X_kj <= X_ij}. Ties within a column are
/// a hard error: the underlying theory assumes continuous margins, and every
/// downstream formula expects permutation ranks. Resampled data (where ties
/// are expected) is re-ranked elsewhere, never through this function.
RankMatrix compute_ranks(const Sample& sample);

/// Rank-based empirical copula
///   C~_n(u) = n^-1 sum_i prod_j 1{R_ij / n <= u_j}.
double rank_empirical_copula(const RankMatrix& ranks, std::span<const double> u);

/// Deheuvels empirical copula C_n(u) = F_n(F_n1^-(u_1), ..., F_nd^-(u_d)),
/// built from (optionally weighted) ECDFs with the generalized inverse
/// H^-(u) = inf{t : H(t) >= u}; H^-(0) is the smallest atom.
double deheuvels_empirical_copula(const Sample& sample, std::span<const double> u);
double deheuvels_empirical_copula(const Sample& sample, std::span<const double> weights,
                                  std::span<const double> u);

/// Beta CDF kernel F_{n,r}(u) = I_u(r, n+1-r), the Beta(r, n+1-r) CDF.
/// Requires 1 <= r <= n.
double beta_kernel(std::size_t n, std::int32_t r, double u);

/// Empirical beta copula C^beta_n(u) = n^-1 sum_i prod_j F_{n,R_ij}(u_j).
double empirical_beta_copula(const RankMatrix& ranks, std::span<const double> u);

/// Cache of F_{n,r}(u) over a fixed set of evaluation points, for the hot
/// resampling loops that re-evaluate the beta copula at the same u's with
/// changing ranks. at(r, q) is F_{n,r}(us[q]); r = 0 row is identically 1.
class BetaKernelTable {
  public:
    BetaKernelTable(std::size_t n, std::span<const double> us);

    double at(std::int32_t r, std::size_t q) const { return f_[static_cast<std::size_t>(r) * m_ + q]; }
    std::size_t n() const { return n_; }
    std::size_t points() const { return m_; }
    const std::vector<double>& axis() const { return us_; }

  private:
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<double> us_;
    std::vector<double> f_;  // (n+1) x m
};

}  // namespace betacop
