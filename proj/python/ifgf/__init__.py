"""Fast evaluation of Helmholtz and Laplace point-source sums."""

from ._ifgf import (
    Plan,
    analytic_factor,
    centered_factor,
    direct,
    factorization_error,
    gen_rough_sphere,
    gen_sphere,
    gen_spheroid,
    green,
    precompute,
    r_vs_s,
    random_subset,
    relative_error,
)


def evaluate(points, coefficients, kappa, threads=1, **params):
    """One-shot precompute and evaluate."""
    return precompute(points, kappa, **params).evaluate(coefficients, threads=threads)


__all__ = [
    "Plan",
    "analytic_factor",
    "centered_factor",
    "direct",
    "evaluate",
    "factorization_error",
    "gen_rough_sphere",
    "gen_sphere",
    "gen_spheroid",
    "green",
    "precompute",
    "r_vs_s",
    "random_subset",
    "relative_error",
]
