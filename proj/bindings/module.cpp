#include "betacop/empirical.hpp"
#include "betacop/harness.hpp"
#include "betacop/inference.hpp"
#include "betacop/rank_stats.hpp"
#include "betacop/resampling.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace betacop;

namespace {

Sample sample_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected an n x d array");
    Sample s(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), s.data.begin());
    return s;
}

py::array_t<double> sample_to_array(const Sample& s) {
    py::array_t<double> a({s.n, s.d});
    std::copy(s.data.begin(), s.data.end(), a.mutable_data());
    return a;
}

RankMatrix ranks_from_array(const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected an n x d integer array");
    RankMatrix r(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), r.r.begin());
    return r;
}

py::array_t<std::int32_t> ranks_to_array(const RankMatrix& r) {
    py::array_t<std::int32_t> a({r.n, r.d});
    std::copy(r.r.begin(), r.r.end(), a.mutable_data());
    return a;
}

CopulaModel make_model(const std::string& family, double theta) {
    return CopulaModel{family_from_string(family), theta, 2};
}

SymmetryStatistic stat_from_name(const std::string& s) {
    if (s == "Sn") return SymmetryStatistic::Sn;
    if (s == "Rn") return SymmetryStatistic::Rn;
    if (s == "SnBeta") return SymmetryStatistic::SnBeta;
    if (s == "RnBeta") return SymmetryStatistic::RnBeta;
    throw std::invalid_argument("unknown statistic: " + s);
}

}  // namespace

PYBIND11_MODULE(_betacop, m) {
    m.doc() = "empirical beta copula estimation and resampling";

    m.def(
        "compute_ranks",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
            return ranks_to_array(compute_ranks(sample_from_array(a)));
        },
        py::arg("sample"), "Coordinatewise ranks of a tie-free sample.");

    m.def(
        "rank_empirical_copula",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& r,
           const std::vector<double>& u) {
            return rank_empirical_copula(ranks_from_array(r), u);
        },
        py::arg("ranks"), py::arg("u"));

    m.def(
        "empirical_beta_copula",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& r,
           const std::vector<double>& u) {
            return empirical_beta_copula(ranks_from_array(r), u);
        },
        py::arg("ranks"), py::arg("u"));

    m.def("beta_kernel", &beta_kernel, py::arg("n"), py::arg("r"), py::arg("u"),
          "Beta(r, n+1-r) CDF at u.");

    m.def(
        "kendall_tau",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& r) {
            const KendallResult k = kendall_tau(ranks_from_array(r));
            return py::make_tuple(k.tau_hat, k.sigma_hat);
        },
        py::arg("ranks"), "Returns (tau_hat, sigma_hat).");

    m.def(
        "spearman_rho",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& r) {
            return spearman_rho(ranks_from_array(r));
        },
        py::arg("ranks"));

    m.def(
        "copula_cdf",
        [](const std::string& family, double theta, const std::vector<double>& u) {
            return copula_cdf(make_model(family, theta), u);
        },
        py::arg("family"), py::arg("theta"), py::arg("u"));

    m.def(
        "copula_sample",
        [](const std::string& family, double theta, std::size_t n, std::uint64_t seed) {
            Rng rng(seed);
            return sample_to_array(copula_sample(make_model(family, theta), n, rng));
        },
        py::arg("family"), py::arg("theta"), py::arg("n"), py::arg("seed"));

    m.def(
        "khoudraji_sample",
        [](const std::string& family, double theta, double delta, std::size_t n,
           std::uint64_t seed) {
            Rng rng(seed);
            const KhoudrajiModel kh{make_model(family, theta), delta};
            return sample_to_array(copula_sample(kh, n, rng));
        },
        py::arg("family"), py::arg("theta"), py::arg("delta"), py::arg("n"), py::arg("seed"));

    m.def("tau_of_theta",
          [](const std::string& family, double theta) {
              return tau_of_theta(family_from_string(family), theta);
          });
    m.def("theta_of_tau", [](const std::string& family, double tau) {
        return theta_of_tau(family_from_string(family), tau);
    });

    m.def(
        "beta_copula_sample",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& r,
           std::size_t m_, std::uint64_t seed, bool symmetrize) {
            Rng rng(seed);
            return sample_to_array(beta_copula_sample(ranks_from_array(r), m_, rng, symmetrize));
        },
        py::arg("ranks"), py::arg("m"), py::arg("seed"), py::arg("symmetrize") = false);

    m.def(
        "pseudo_likelihood_estimate",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& r,
           const std::string& family) {
            const PleResult res =
                pseudo_likelihood_estimate(ranks_from_array(r), family_from_string(family));
            return py::make_tuple(res.theta_hat, !res.boundary);
        },
        py::arg("ranks"), py::arg("family"), "Returns (theta_hat, converged).");

    m.def(
        "kendall_ci",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& r,
           const std::string& scheme, std::size_t B, std::uint64_t seed, double level) {
            const RankMatrix ranks = ranks_from_array(r);
            ConfidenceInterval ci;
            if (scheme == "asymp") {
                ci = ci_asymptotic_tau(ranks, level);
            } else if (scheme == "beta") {
                const Replicates rep = smoothed_beta_bootstrap(
                    ranks, RankStatistic([](const RankMatrix& x) { return kendall_tau(x).tau_hat; }),
                    B, seed);
                ci = ci_bootstrap_percentile(rep, kendall_tau(ranks).tau_hat, level);
            } else {
                throw std::invalid_argument("scheme must be 'asymp' or 'beta'");
            }
            return py::make_tuple(ci.lower, ci.upper);
        },
        py::arg("ranks"), py::arg("scheme"), py::arg("B") = 500, py::arg("seed") = 1,
        py::arg("level") = 0.95);

    m.def(
        "symmetry_test",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& r,
           const std::string& statistic, const std::string& scheme, std::size_t B,
           std::uint64_t seed) {
            const SymmetryScheme ss =
                scheme == "beta" ? SymmetryScheme::BetaSym : SymmetryScheme::BootSym;
            const TestResult t =
                symmetry_test(ranks_from_array(r), stat_from_name(statistic), ss, B, seed);
            return py::make_tuple(t.statistic, t.p_value);
        },
        py::arg("ranks"), py::arg("statistic"), py::arg("scheme") = "beta", py::arg("B") = 250,
        py::arg("seed") = 1, "Returns (statistic, p_value).");

    m.def(
        "run_experiment_csv",
        [](const std::string& config_text) {
            std::istringstream in(config_text);
            ExperimentConfig cfg = parse_config(in);
            cfg.progress = false;
            const ExperimentReport rep = run_experiment(cfg);
            std::ostringstream out;
            write_report(rep, out);
            return out.str();
        },
        py::arg("config_text"),
        "Parse a config, run the experiment, return the report as CSV text.");
}
