#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace betacop {

/// Seeded random stream. Streams for parallel work are never shared; each
/// Monte Carlo run / bootstrap replicate constructs its own Rng from a key
/// derived with Rng::derive, so results do not depend on scheduling order.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// splitmix64-based key derivation: derive(seed, {a, b, ...}) folds the
    /// parts into the seed one by one. Used as the splittable-stream contract
    /// hash(seed, run, scheme, replicate).
    static std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
        std::uint64_t h = splitmix(seed ^ 0x9e3779b97f4a7c15ULL);
        for (std::uint64_t p : parts) h = splitmix(h ^ splitmix(p + 0x632be59bd9b4e019ULL));
        return h;
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }

    /// Uniform index in {0, ..., n-1}.
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_);
    }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }

    double exponential() { return std::exponential_distribution<double>(1.0)(eng_); }

    double gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(eng_); }

    /// Beta(a, b) via the gamma-ratio construction.
    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

    std::mt19937_64& engine() { return eng_; }

  private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 eng_;
};

}  // namespace betacop
