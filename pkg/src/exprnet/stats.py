"""Correlation, ordinary least squares and leave-one-out error."""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ZERO_VARIANCE_TOL, ExpressionMatrix, GeneId, Metric, RegressionFit
from .errors import LengthMismatch, TargetInParents, ZeroVariance

_EPS = np.finfo(float).eps
# relative pivot size below which a QR-solved design counts as rank deficient
_RANK_TOL = 1e3 * _EPS


@dataclass(frozen=True)
class CorrelationMatrix:
    values: np.ndarray
    gene_ids: tuple[GeneId, ...]
    constant: tuple[GeneId, ...] = ()

    def r(self, a: GeneId | int, b: GeneId | int) -> float:
        return float(self.values[int(getattr(a, "index", a)), int(getattr(b, "index", b))])


@dataclass(frozen=True)
class LoocvError:
    value: float
    metric: Metric
    folds: int
    fold_errors: np.ndarray | None = None

    def __float__(self):
        return self.value


def _as_pair(x, y):
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"vectors differ in shape: {x.shape} vs {y.shape}")
    return x, y


def _is_constant(sum_sq: float, n: int) -> bool:
    return sum_sq / max(n - 1, 1) <= ZERO_VARIANCE_TOL


def _r_centered(cx, cy, sxx, syy):
    r = float(np.dot(cx, cy)) / np.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def pearson_correlation(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson's r, clamped to [-1, 1] against rounding."""
    x, y = _as_pair(x, y)
    if x.size < 2:
        raise LengthMismatch("need at least two observations")
    cx = x - x.mean()
    cy = y - y.mean()
    sxx = float(np.dot(cx, cx))
    syy = float(np.dot(cy, cy))
    if _is_constant(sxx, x.size) or _is_constant(syy, y.size):
        raise ZeroVariance("correlation undefined for a constant vector")
    return _r_centered(cx, cy, sxx, syy)


def correlation_matrix(matrix: ExpressionMatrix) -> CorrelationMatrix:
    """All pairwise correlations. Constant genes get a zero row/column and are listed in ``constant``."""
    p = matrix.p
    # centred exactly as pearson_correlation does, so entries match it bit for bit
    cols = []
    for j in range(p):
        col = np.ascontiguousarray(matrix.values[:, j])
        cols.append(col - col.mean())
    ss = [float(np.dot(c, c)) for c in cols]
    const = [_is_constant(s, matrix.n) for s in ss]
    out = np.zeros((p, p))
    for i in range(p):
        if const[i]:
            continue
        out[i, i] = 1.0
        for j in range(i + 1, p):
            if not const[j]:
                out[i, j] = out[j, i] = _r_centered(cols[i], cols[j], ss[i], ss[j])
    out.setflags(write=False)
    flagged = tuple(g for g, c in zip(matrix.gene_ids, const) if c)
    return CorrelationMatrix(out, matrix.gene_ids, flagged)


def fit_simple_lr(x: Sequence[float], y: Sequence[float], parent=None) -> RegressionFit:
    """Closed-form OLS of y on a single predictor x."""
    x, y = _as_pair(x, y)
    cx = x - x.mean()
    sxx = float(np.dot(cx, cx))
    if x.size < 2 or _is_constant(sxx, x.size):
        raise ZeroVariance("predictor is constant")
    slope = float(np.dot(cx, y - y.mean())) / sxx
    intercept = float(y.mean()) - slope * float(x.mean())
    resid = y - (intercept + slope * x)
    return RegressionFit(intercept, np.array([slope]), resid, float(np.dot(resid, resid)),
                         (parent,) if parent is not None else ())


def _min_norm_lstsq(A: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares solutions for a stack of systems via SVD.

    A has shape (..., m, c), y (..., m). Singular values below
    eps * max(m, c) * s_max are treated as zero, matching LAPACK's gelsd default.
    """
    m, c = A.shape[-2:]
    u, s, vt = np.linalg.svd(A, full_matrices=False)
    cutoff = _EPS * max(m, c) * s[..., :1]
    inv = np.divide(1.0, s, out=np.zeros_like(s), where=s > cutoff)
    uty = np.einsum("...mk,...m->...k", u, y)
    return np.einsum("...kc,...k->...c", vt, inv * uty)


def _lstsq(A: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least squares for a stack (b, m, c) of systems.

    Householder QR for the well-posed ones; systems that are underdetermined
    or whose R has a negligible pivot fall through to the SVD route.
    """
    b, m, c = A.shape
    beta = np.empty((b, c))
    use_svd = np.ones(b, dtype=bool)
    if m >= c:
        q, r = np.linalg.qr(A)
        d = np.abs(np.diagonal(r, axis1=-2, axis2=-1))
        use_svd = d.min(axis=-1) <= _RANK_TOL * max(m, c) * d.max(axis=-1)
        ok = ~use_svd
        if ok.any():
            qty = np.einsum("bmc,bm->bc", q[ok], y[ok])
            beta[ok] = np.linalg.solve(r[ok], qty[..., None])[..., 0]
    if use_svd.any():
        beta[use_svd] = _min_norm_lstsq(A[use_svd], y[use_svd])
    return beta


def _fit_stack(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Intercept-first coefficient vectors for stacked designs X (b, m, k), y (b, m)."""
    if X.shape[-1] == 0:
        return y.mean(axis=-1, keepdims=True)
    A = np.concatenate([np.ones(X.shape[:-1] + (1,)), X], axis=-1)
    return _lstsq(A, y)


def fit_mlr(X, y, parent_ids: Sequence = ()) -> RegressionFit:
    """OLS with intercept on the columns of X.

    Rank-deficient designs, including more columns than rows, get the
    minimum-norm solution of the intercept-augmented system.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    X = np.asarray(X, dtype=float).reshape(n, -1)
    beta = _fit_stack(X[None], y[None])[0]
    resid = y - (beta[0] + X @ beta[1:])
    return RegressionFit(float(beta[0]), beta[1:].copy(), resid, float(np.dot(resid, resid)),
                         tuple(parent_ids))


def predict(fit: RegressionFit, x_row) -> float:
    x_row = np.asarray(x_row, dtype=float).ravel()
    if x_row.size != fit.coefficients.size:
        raise LengthMismatch(f"row has {x_row.size} values, fit has {fit.coefficients.size} coefficients")
    return fit.intercept + float(np.dot(fit.coefficients, x_row))


def loocv_residuals(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Held-out prediction errors y_i - yhat_(-i), one fold per sample.

    Every fold is an independent :func:`fit_mlr` problem; the folds are just
    solved as one stacked batch.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    # contiguous rows keep the dot products on the same kernel as predict()
    X = np.ascontiguousarray(np.asarray(X, dtype=float).reshape(n, -1))
    rows = _fold_rows(n)
    beta = _fit_stack(X[rows], y[rows])
    pred = np.array([beta[i, 0] + float(np.dot(beta[i, 1:], X[i])) for i in range(n)])
    return y - pred


@functools.lru_cache(maxsize=64)
def _fold_rows(n: int) -> np.ndarray:
    return np.array([np.delete(np.arange(n), i) for i in range(n)])


def summarize_errors(errors: np.ndarray, metric: Metric) -> float:
    if metric == "mse":
        return float(np.mean(errors * errors))
    if metric == "mae":
        return float(np.mean(np.abs(errors)))
    raise ValueError(f"unknown metric {metric!r}")


def loocv_error(matrix: ExpressionMatrix, target: GeneId, parents: Sequence[GeneId] = (),
                metric: Metric = "mse") -> LoocvError:
    t = int(target[0]) if isinstance(target, tuple) else int(target)
    idx = [int(g[0]) if isinstance(g, tuple) else int(g) for g in parents]
    if t in idx:
        raise TargetInParents(f"target {t} is among its own predictors")
    errors = loocv_residuals(matrix.values[:, idx], matrix.values[:, t])
    return LoocvError(summarize_errors(errors, metric), metric, matrix.n, errors)
