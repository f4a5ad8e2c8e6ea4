#pragma once

#include "betacop/copulas.hpp"
#include "betacop/core.hpp"
#include "betacop/empirical.hpp"
#include "betacop/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace betacop {

enum class Scheme {
    Straightforward,
    MultiplierPDM,
    BetaStandard,
    BetaSmoothed,
    BetaSmoothedSymmetrized,
    Parametric,
};

/// Multinomial(n; 1/n, ..., 1/n) resampling weights. sum w_i = n.
struct MultinomialWeights {
    std::vector<std::int32_t> w;
};

MultinomialWeights draw_multinomial_weights(std::size_t n, Rng& rng);

/// i.i.d. nonnegative multipliers with mean mu and std. dev. tau. The
/// default law is the paper's two-point law P[xi=0] = P[xi=2] = 1/2
/// (mu = tau = 1); an all-zero draw is rejected and redrawn.
struct MultiplierWeights {
    std::vector<double> xi;
    double mu = 1.0;
    double tau = 1.0;
};

MultiplierWeights draw_two_point_multipliers(std::size_t n, Rng& rng);

/// Bootstrap replicate statistics (one scalar statistic per replicate).
struct Replicates {
    std::vector<double> values;
    Scheme scheme = Scheme::Straightforward;
    int failures = 0;  // replicates skipped because the statistic failed
};

/// Bootstrapped ranks R*_ij = sum_k W_k 1{R_kj <= R_ij}; entries in 0..n.
RankMatrix bootstrap_ranks(const RankMatrix& ranks, const MultinomialWeights& w);

/// Bootstrapped rank-based empirical copula
///   C~*_n(u) = n^-1 sum_i W_i prod_j 1{R*_ij / n <= u_j}.
double straightforward_bootstrap_copula(const RankMatrix& ranks, const MultinomialWeights& w,
                                        std::span<const double> u);

/// Standard beta bootstrap C^{beta*}_n(u) = n^-1 sum_i W_i prod_j
/// F_{n,R*_ij}(u_j). The table overload serves hot loops where u is fixed:
/// `cols[j]` is the index of u_j in the table's axis.
double beta_bootstrap_standard(const RankMatrix& ranks, const MultinomialWeights& w,
                               std::span<const double> u);
double beta_bootstrap_standard(const RankMatrix& ranks, const MultinomialWeights& w,
                               const BetaKernelTable& table, std::span<const std::size_t> cols);

/// Finite-difference estimate of dC/du_j at spacing h = n^{-1/2}, two-sided
/// with boundary clipping, clamped into [0, 1].
double estimate_partial_derivative(const RankMatrix& ranks, std::span<const double> u,
                                   std::size_t j);

/// Partial-derivatives multiplier bootstrap. Precomputes everything that
/// depends only on (ranks, grid); replicate() maps one multiplier draw to
/// the process values alpha~^{pdm o}_n at the grid points.
class PdmReplicator {
  public:
    PdmReplicator(const RankMatrix& ranks, std::vector<std::vector<double>> grid);

    std::vector<double> replicate(const MultiplierWeights& xi) const;
    std::size_t points() const { return grid_.size(); }

  private:
    const RankMatrix& ranks_;
    std::vector<std::vector<double>> grid_;
    std::vector<double> chat_;                  // C~_n at grid
    std::vector<std::vector<double>> partial_;  // [point][j]
    std::vector<std::vector<double>> chat_marg_;  // [point][j]: C~_n at (1,..,u_j,..,1)
};

/// One multiplier replicate of the limit process at the grid points.
std::vector<double> multiplier_pdm_replicate(const RankMatrix& ranks, const MultiplierWeights& xi,
                                             const std::vector<std::vector<double>>& grid);

/// m i.i.d. draws from the empirical beta copula (Algorithm: pick a row
/// uniformly, then independent Beta(r_Ij, n+1-r_Ij) coordinates). With
/// `symmetrize` (d = 2) each draw's coordinates are swapped by a fair coin,
/// which samples the symmetrized beta copula.
Sample beta_copula_sample(const RankMatrix& ranks, std::size_t m, Rng& rng,
                          bool symmetrize = false);

/// Ranks of a resampled matrix by the max-rank rule R_ij = #{k: x_kj <= x_ij}
/// (equals permutation ranks when there are no ties).
RankMatrix rerank(const Sample& sample);

using RankStatistic = std::function<double(const RankMatrix&)>;
using FallibleRankStatistic = std::function<std::optional<double>(const RankMatrix&)>;

/// Smoothed beta bootstrap: B times, draw m (= n by default) points from the
/// (optionally symmetrized) empirical beta copula, re-rank, and evaluate the
/// statistic. Replicate b uses the stream derive(seed, {b}). The fallible
/// overload skips and counts replicates where the statistic fails.
Replicates smoothed_beta_bootstrap(const RankMatrix& ranks, const RankStatistic& stat,
                                   std::size_t B, std::uint64_t seed, bool symmetrize = false,
                                   std::size_t m = 0);
Replicates smoothed_beta_bootstrap(const RankMatrix& ranks, const FallibleRankStatistic& stat,
                                   std::size_t B, std::uint64_t seed, bool symmetrize = false,
                                   std::size_t m = 0);

/// Classic parametric bootstrap: B fresh samples of size n from C_{theta_hat},
/// estimator applied to each; failed replicates are skipped and counted.
Replicates parametric_bootstrap(Family family, double theta_hat, std::size_t n,
                                const std::function<std::optional<double>(const Sample&)>& estimator,
                                std::size_t B, std::uint64_t seed);

}  // namespace betacop
