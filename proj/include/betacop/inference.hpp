#pragma once

#include "betacop/copulas.hpp"
#include "betacop/core.hpp"
#include "betacop/rank_stats.hpp"
#include "betacop/resampling.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace betacop {

enum class CiMethod { Asymp, Boot, Beta, Param };

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    CiMethod method = CiMethod::Asymp;
    bool flagged = false;              // degenerate / unreliable
    std::optional<bool> covered;       // set by the harness when truth is known
};

enum class SymmetryStatistic { Sn, Rn, SnBeta, RnBeta };
enum class SymmetryScheme { BetaSym, BootSym };

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t B = 0;
    SymmetryScheme scheme = SymmetryScheme::BetaSym;
};

struct CovarianceEstimate {
    std::vector<std::vector<double>> grid;
    std::vector<double> cov;  // k x k row-major
    double at(std::size_t a, std::size_t b) const { return cov[a * grid.size() + b]; }
};

enum class CovScheme { MultiplierPDM, BetaStandard, BetaSmoothed };

/// tau_hat +- z_{alpha/2} sigma_hat. A zero sigma_hat yields a flagged
/// zero-length interval.
ConfidenceInterval ci_asymptotic_tau(const RankMatrix& ranks, double level = 0.95);

/// Percentile bootstrap interval [Q_{a/2}, Q_{1-a/2}] with type-7 quantiles;
/// `basic = true` switches to the reflected interval
/// [2T - Q_{1-a/2}, 2T - Q_{a/2}]. Requires at least 20 replicates.
ConfidenceInterval ci_bootstrap_percentile(const Replicates& replicates, double point_estimate,
                                           double level, bool basic = false);

/// Resampling symmetry test. Replicates are drawn under H0: BetaSym samples
/// n points from the symmetrized empirical beta copula and re-ranks; BootSym
/// draws a multinomial resample and applies an independent fair coordinate
/// swap per retained row before re-ranking. p = (1 + #{T*_b >= T}) / (B+1).
/// `tables` may be shared across calls; required for the beta statistics
/// (built on the fly when null).
TestResult symmetry_test(const RankMatrix& ranks, SymmetryStatistic statistic,
                         SymmetryScheme scheme, std::size_t B, std::uint64_t seed,
                         const IntegralTables* tables = nullptr);

/// Empirical covariance of B replicate evaluations of the bootstrapped
/// process at the grid points.
CovarianceEstimate covariance_estimate(const RankMatrix& ranks, CovScheme scheme,
                                       const std::vector<std::vector<double>>& grid, std::size_t B,
                                       std::uint64_t seed);

/// Parametric-bootstrap percentile interval for the pseudo-likelihood
/// estimate; flagged when more than 10% of replicates fail.
ConfidenceInterval ci_parametric(Family family, const RankMatrix& ranks, std::size_t B,
                                 std::uint64_t seed, double level = 0.95);

/// Analytic Cov{G^C(u), G^C(v)} of the limit process, from the copula CDF
/// and its closed-form partial derivatives. Truth reference for the
/// covariance experiment.
double limit_covariance(const CopulaModel& m, std::span<const double> u, std::span<const double> v);

}  // namespace betacop
