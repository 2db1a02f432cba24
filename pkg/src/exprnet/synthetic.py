"""Seeded synthetic expression data for tests, benchmarks and demos."""
from __future__ import annotations

import numpy as np

from .core import ExpressionMatrix


def latent_factor_matrix(n: int, p: int, n_factors: int = 4, noise: float = 0.5,
                         seed: int = 0) -> ExpressionMatrix:
    """Genes loading on a few shared latent factors plus independent noise.

    Produces the block-correlated structure typical of expression data, so
    correlation filters keep non-trivial candidate sets.
    """
    rng = np.random.default_rng(seed)
    factors = rng.normal(size=(n, n_factors))
    loadings = rng.normal(size=(n_factors, p)) * (rng.random((n_factors, p)) < 0.5)
    values = factors @ loadings + noise * rng.normal(size=(n, p))
    return ExpressionMatrix.from_array(values)


def regulator_network(p: int = 20, n: int = 50, n_regulators: int = 10, max_parents: int = 3,
                      seed: int = 0, weight_range: tuple[float, float] = (0.8, 1.2),
                      noise: float = 1.0) -> tuple[ExpressionMatrix, dict[int, list[int]]]:
    """Linear-Gaussian data from a sparse two-layer regulatory structure.

    Genes 0..n_regulators-1 are independent regulators. Every other gene
    draws 1..max_parents regulators as parents, with weights of random sign
    and magnitude in ``weight_range`` plus Gaussian noise. Each gene is
    rescaled to unit variance. Returns the matrix and a map from gene index
    to its sorted true parent indices.
    """
    if not 0 < n_regulators <= p:
        raise ValueError("n_regulators must be in 1..p")
    rng = np.random.default_rng(seed)
    values = np.empty((n, p))
    parents: dict[int, list[int]] = {}
    lo, hi = weight_range
    for j in range(p):
        if j < n_regulators:
            pa = []
        else:
            k = int(rng.integers(1, min(max_parents, n_regulators) + 1))
            pa = sorted(rng.choice(n_regulators, size=k, replace=False).tolist())
        parents[j] = pa
        col = noise * rng.normal(size=n)
        for q in pa:
            col += rng.choice([-1.0, 1.0]) * rng.uniform(lo, hi) * values[:, q]
        values[:, j] = (col - col.mean()) / col.std()
    return ExpressionMatrix.from_array(values), parents
