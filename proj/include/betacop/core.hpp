#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace betacop {

/// Dense row-major n x d matrix of observations (values in R^d, or points in
/// the unit cube for copula samples).
struct Sample {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> data;  // row-major, size n*d

    Sample() = default;
    Sample(std::size_t n_, std::size_t d_) : n(n_), d(d_), data(n_ * d_, 0.0) {}

    double operator()(std::size_t i, std::size_t j) const { return data[i * d + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * d + j]; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * d, d}; }
};

/// Coordinatewise ranks. For tie-free original data every column is a
/// permutation of 1..n; weighted (bootstrapped) rank matrices may contain 0
/// and repeated entries, but stay within 0..n.
struct RankMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<std::int32_t> r;  // row-major, size n*d

    RankMatrix() = default;
    RankMatrix(std::size_t n_, std::size_t d_) : n(n_), d(d_), r(n_ * d_, 0) {}

    std::int32_t operator()(std::size_t i, std::size_t j) const { return r[i * d + j]; }
    std::int32_t& operator()(std::size_t i, std::size_t j) { return r[i * d + j]; }
};

/// Slack used when evaluating rank indicators 1{r/n <= u}. Absorbs the
/// floating-point rounding of grid coordinates like k/40 so that evaluation
/// at exact jump locations is stable.
inline constexpr double kIndicatorSlack = 1e-9;

inline bool rank_leq(std::int32_t r, double u, std::size_t n) {
    return static_cast<double>(r) <= u * static_cast<double>(n) + kIndicatorSlack;
}

}  // namespace betacop
