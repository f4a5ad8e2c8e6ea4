"""Empirical beta copula estimation and resampling toolkit."""

try:
    from ._betacop import *  # noqa: F401,F403  (installed layout)
    from ._betacop import __doc__ as _core_doc
except ImportError:  # development layout: extension on sys.path
    from _betacop import *  # noqa: F401,F403
    from _betacop import __doc__ as _core_doc

__all__ = [
    "compute_ranks",
    "rank_empirical_copula",
    "empirical_beta_copula",
    "beta_kernel",
    "kendall_tau",
    "spearman_rho",
    "copula_cdf",
    "copula_sample",
    "khoudraji_sample",
    "tau_of_theta",
    "theta_of_tau",
    "beta_copula_sample",
    "pseudo_likelihood_estimate",
    "kendall_ci",
    "symmetry_test",
    "run_experiment_csv",
]
