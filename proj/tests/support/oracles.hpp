// Test-only oracles, independent of the library implementation paths they
// check: brute-force sums, quadrature rules, Monte Carlo references.
#pragma once

#include "betacop/copulas.hpp"
#include "betacop/core.hpp"
#include "betacop/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace betacop::oracle {

/// F_{n,r}(u) by the defining binomial tail sum (log-space terms).
double beta_kernel_binomial_sum(std::size_t n, std::int32_t r, double u);

/// Random permutation rank matrix (each column an independent shuffle).
RankMatrix random_rank_matrix(std::size_t n, std::size_t d, Rng& rng);

/// Coordinate-exchangeable rank matrix: rows closed under swapping the two
/// coordinates. n must be even.
RankMatrix exchangeable_rank_matrix(std::size_t n, Rng& rng);

/// Nodes/weights of 64-point Gauss-Legendre panels on a dyadically
/// corner-graded partition of (0,1); integrates corner-singular copula
/// densities to ~1e-10.
void graded_gl_rule(std::vector<double>& nodes, std::vector<double>& weights);

/// int_(0,1)^2 c_theta du dv for a parametric family, handling the interior
/// support boundary of the negative-theta Clayton by a support-aware
/// substitution. Everything else uses the graded tensor rule.
double density_mass(const CopulaModel& m);

/// Plain m-node tensor Gauss-Legendre of f over (0,1)^2.
double tensor_gl(const std::function<double(double, double)>& f, int m);

/// Monte Carlo truth for Cov{G^C(u), G^C(v)}: `samples` independent samples
/// of size n from the model, empirical covariance of sqrt(n)(C~_n - C) at
/// the grid points. Returns the k x k matrix (row-major). Cached to
/// `cache_path` when non-empty (plain text; reread if present).
std::vector<double> covariance_truth_oracle(const CopulaModel& m,
                                            const std::vector<std::vector<double>>& grid,
                                            std::size_t n, std::size_t samples,
                                            std::uint64_t seed, const std::string& cache_path,
                                            int threads);

/// Two-sample Kolmogorov-Smirnov statistic between two scalar samples.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kendall's tau by inversion counting (merge sort), O(n log n). Tie-free
/// permutation ranks only; used for the large-n sampling checks.
double kendall_tau_fast(const RankMatrix& ranks);

}  // namespace betacop::oracle
