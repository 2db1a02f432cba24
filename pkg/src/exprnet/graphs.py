"""Co-expression, single-parent Bayesian and dependency network learners.

Each learner returns a :class:`~exprnet.core.Network` over all genes of the
matrix. Constant genes stay isolated in every learner. Networks are scored
by regressing each gene on its predictors (parents, or neighbours for the
undirected co-expression graph) and averaging the LOOCV errors.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import Edge, ExpressionMatrix, GeneId, Metric, Network
from .errors import NoCandidates, UnknownGene
from .stats import CorrelationMatrix, LoocvError, correlation_matrix, fit_mlr, fit_simple_lr, loocv_error

MODEL_LABELS = {
    "coexpression": "Co-expression network",
    "bayesian": "Bayesian network",
    "dependency": "Dependency network",
}


def _stat(corr: CorrelationMatrix, use_absolute_r: bool) -> np.ndarray:
    return np.abs(corr.values) if use_absolute_r else corr.values


def learn_coexpression(matrix: ExpressionMatrix, threshold: float = 0.5, use_absolute_r: bool = True,
                       corr: CorrelationMatrix | None = None) -> Network:
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0,1]")
    corr = corr if corr is not None else correlation_matrix(matrix)
    stat = _stat(corr, use_absolute_r)
    genes = matrix.gene_ids
    edges = [
        Edge(genes[i], genes[j], float(corr.values[i, j]), False)
        for i in range(matrix.p) for j in range(i + 1, matrix.p)
        if stat[i, j] >= threshold
    ]
    return Network("coexpression", list(genes), edges)


def learn_bayesian(matrix: ExpressionMatrix, corr: CorrelationMatrix | None = None) -> Network:
    """One parent per gene: the simple-regression predictor with the smallest RSS.

    Directed cycles are allowed; see :func:`find_cycles`.
    """
    if matrix.p < 2:
        raise NoCandidates("need at least two genes")
    corr = corr if corr is not None else correlation_matrix(matrix)
    constant = {g.index for g in corr.constant}
    genes = matrix.gene_ids
    edges = []
    for g in genes:
        if g.index in constant:
            continue
        best = None
        for c in genes:
            if c.index == g.index or c.index in constant:
                continue
            fit = fit_simple_lr(matrix.column(c), matrix.column(g), parent=c)
            if best is None or fit.rss < best.rss:  # strict: lowest index wins ties
                best = fit
        if best is not None:
            edges.append(Edge(best.parent_ids[0], g, float(best.coefficients[0]), True))
    return Network("bayesian", list(genes), edges)


def top_k_parents(corr: CorrelationMatrix, target: GeneId, k: int, use_absolute_r: bool = True) -> list[GeneId]:
    """The k non-constant genes most correlated with ``target``, ties to the lower index."""
    constant = {g.index for g in corr.constant}
    if target.index in constant:
        return []
    stat = _stat(corr, use_absolute_r)[target.index]
    pool = [g for g in corr.gene_ids if g.index != target.index and g.index not in constant]
    pool.sort(key=lambda g: (-stat[g.index], g.index))
    return pool[:k]


def learn_dependency(matrix: ExpressionMatrix, k: int = 5, use_absolute_r: bool = True,
                     corr: CorrelationMatrix | None = None) -> Network:
    if k < 1:
        raise ValueError("k must be >= 1")
    corr = corr if corr is not None else correlation_matrix(matrix)
    edges = []
    for g in matrix.gene_ids:
        parents = sorted(top_k_parents(corr, g, k, use_absolute_r))
        if not parents:
            continue
        fit = fit_mlr(matrix.values[:, [q.index for q in parents]], matrix.column(g), parents)
        edges.extend(Edge(q, g, float(b), True) for q, b in zip(parents, fit.coefficients))
    return Network("dependency", list(matrix.gene_ids), edges)


def evaluate_network(matrix: ExpressionMatrix, network: Network,
                     metric: Metric = "mse") -> tuple[dict[GeneId, LoocvError], float]:
    """Per-gene LOOCV error of regressing each gene on its network predictors, and their mean."""
    for g in network.nodes:
        if g.index >= matrix.p or matrix.gene_ids[g.index].name != g.name:
            raise UnknownGene(g.name)
    per_gene = {g: loocv_error(matrix, g, network.parents(g), metric) for g in sorted(network.nodes)}
    overall = float(np.mean([e.value for e in per_gene.values()])) if per_gene else 0.0
    return per_gene, overall


def find_cycles(network: Network) -> list[list[GeneId]]:
    """Directed cycles of a graph whose nodes have in-degree at most one.

    Each cycle is listed once, rotated to start at its lowest-index gene;
    cycles are sorted by that gene.
    """
    parent = {}
    for e in network.edges:
        if e.directed:
            if e.target in parent:
                raise ValueError("find_cycles needs in-degree <= 1")
            parent[e.target] = e.source
    cycles = []
    done: set = set()
    for start in sorted(network.nodes):
        path, pos = [], {}
        node = start
        while node is not None and node not in done and node not in pos:
            pos[node] = len(path)
            path.append(node)
            node = parent.get(node)
        if node is not None and node in pos:
            # walking parent pointers lists the cycle against edge direction
            cyc = path[pos[node]:][::-1]
            i = cyc.index(min(cyc))
            cycles.append(cyc[i:] + cyc[:i])
        done.update(path)
    return sorted(cycles)


def learn(matrix: ExpressionMatrix, model: str, threshold: float = 0.5, k: int = 5,
          use_absolute_r: bool = True, corr: CorrelationMatrix | None = None) -> Network:
    corr = corr if corr is not None else correlation_matrix(matrix)
    if model == "coexpression":
        return learn_coexpression(matrix, threshold, use_absolute_r, corr)
    if model == "bayesian":
        return learn_bayesian(matrix, corr)
    if model == "dependency":
        return learn_dependency(matrix, k, use_absolute_r, corr)
    raise ValueError(f"unknown model {model!r}")


def compare_models(matrix: ExpressionMatrix, models: Sequence[str] = ("coexpression", "bayesian", "dependency"),
                   threshold: float = 0.5, k: int = 5, use_absolute_r: bool = True,
                   metric: Metric = "mse") -> dict[str, tuple[Network, dict[GeneId, LoocvError], float]]:
    corr = correlation_matrix(matrix)
    out = {}
    for model in models:
        net = learn(matrix, model, threshold, k, use_absolute_r, corr)
        per_gene, overall = evaluate_network(matrix, net, metric)
        out[model] = (net, per_gene, overall)
    return out
