"""Domain types shared by every analysis module.

Genes are identified by position; names are labels carried along for
reporting and export.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Sequence

import numpy as np

MIN_SAMPLES = 3
MIN_GENES = 2
ZERO_VARIANCE_TOL = 1e-12

NetworkKind = Literal["coexpression", "bayesian", "dependency"]
Metric = Literal["mse", "mae"]


class GeneId(NamedTuple):
    index: int
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, eq=False)
class ExpressionMatrix:
    """n samples x p genes of expression levels.

    ``values`` is stored read-only so the matrix can be shared freely.
    Construction does not validate; call :func:`validate_matrix`.
    """

    values: np.ndarray
    gene_ids: tuple[GeneId, ...]
    sample_ids: tuple[str, ...]

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError(f"expression values must be 2-D, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "gene_ids", tuple(GeneId(int(i), str(s)) for i, s in self.gene_ids))
        object.__setattr__(self, "sample_ids", tuple(str(s) for s in self.sample_ids))

    @classmethod
    def from_array(cls, values, gene_names: Sequence[str] | None = None,
                   sample_ids: Sequence[str] | None = None) -> "ExpressionMatrix":
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise ValueError(f"expression values must be 2-D, got shape {values.shape}")
        n, p = values.shape
        if gene_names is None:
            gene_names = [f"g{j + 1}" for j in range(p)]
        if sample_ids is None:
            sample_ids = [f"s{i + 1}" for i in range(n)]
        genes = tuple(GeneId(j, name) for j, name in enumerate(gene_names))
        return cls(values, genes, tuple(sample_ids))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def column(self, gene: GeneId | int) -> np.ndarray:
        return self.values[:, int(gene[0] if isinstance(gene, tuple) else gene)]

    def gene(self, key: int | str) -> GeneId:
        """Look a gene up by column index or by name."""
        if isinstance(key, str):
            for g in self.gene_ids:
                if g.name == key:
                    return g
            raise KeyError(key)
        return self.gene_ids[key]

    def standardized(self) -> "ExpressionMatrix":
        """Per-gene z-scores (sample std, ddof=1); constant genes become all zeros."""
        centered = self.values - self.values.mean(axis=0)
        sd = self.values.std(axis=0, ddof=1)
        sd[sd == 0] = 1.0
        return ExpressionMatrix(centered / sd, self.gene_ids, self.sample_ids)


@dataclass(frozen=True)
class RegressionFit:
    intercept: float
    coefficients: np.ndarray
    residuals: np.ndarray
    rss: float
    parent_ids: tuple = ()


class Edge(NamedTuple):
    source: GeneId
    target: GeneId
    weight: float
    directed: bool


@dataclass
class Network:
    kind: NetworkKind
    nodes: list[GeneId]
    edges: list[Edge] = field(default_factory=list)

    def parents(self, gene: GeneId) -> list[GeneId]:
        """Predictors of ``gene``: incoming sources, or neighbours when undirected.

        Returned in gene-index order.
        """
        found = set()
        for e in self.edges:
            if e.target.index == gene.index and e.source.index != gene.index:
                found.add(e.source)
            elif not e.directed and e.source.index == gene.index:
                found.add(e.target)
        return sorted(found)

    def in_degree(self) -> dict[int, int]:
        counts = Counter(e.target.index for e in self.edges if e.directed)
        return {g.index: counts.get(g.index, 0) for g in self.nodes}

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges, key=lambda e: (e.source.index, e.target.index))


def network_violations(network: Network, max_parents: int | None = None,
                       threshold: float | None = None) -> list[str]:
    """Structural invariant check; an empty list means the network is well formed."""
    problems = []
    node_idx = {g.index for g in network.nodes}
    for e in network.edges:
        if e.source.index == e.target.index:
            problems.append(f"self-loop on {e.source.name}")
        if e.source.index not in node_idx or e.target.index not in node_idx:
            problems.append(f"edge {e.source.name}->{e.target.name} references a missing node")
        if network.kind == "coexpression":
            if e.directed:
                problems.append(f"coexpression edge {e.source.name}--{e.target.name} is directed")
            if threshold is not None and abs(e.weight) < threshold:
                problems.append(f"coexpression edge {e.source.name}--{e.target.name} below threshold")
        elif not e.directed:
            problems.append(f"{network.kind} edge {e.source.name}->{e.target.name} is undirected")
    if network.kind != "coexpression":
        cap = 1 if network.kind == "bayesian" else max_parents
        if cap is not None:
            for idx, deg in network.in_degree().items():
                if deg > cap:
                    problems.append(f"node {idx} has in-degree {deg} > {cap}")
    return problems


@dataclass
class ErrorReport:
    """Rows of overall LOOCV errors, one column per dataset."""

    datasets: list[str]
    rows: list[tuple[str, dict[str, float]]] = field(default_factory=list)
    metric: Metric = "mse"
    label_header: str = "Strategies"

    def add_row(self, label: str, errors: dict[str, float]):
        self.rows.append((label, dict(errors)))

    def problems(self) -> list[str]:
        out = []
        for label, errs in self.rows:
            for name in self.datasets:
                if name not in errs:
                    out.append(f"row {label!r} lacks dataset {name!r}")
                elif not (np.isfinite(errs[name]) and errs[name] >= 0):
                    out.append(f"row {label!r} has invalid error {errs[name]!r} for {name!r}")
        return out


def validate_matrix(matrix: ExpressionMatrix) -> list[str]:
    findings = []
    n, p = matrix.values.shape
    if n < MIN_SAMPLES:
        findings.append(f"n < {MIN_SAMPLES} (got {n} samples)")
    if p < MIN_GENES:
        findings.append(f"p < {MIN_GENES} (got {p} genes)")
    if len(matrix.gene_ids) != p:
        findings.append(f"{len(matrix.gene_ids)} gene ids for {p} columns")
    if len(matrix.sample_ids) != n:
        findings.append(f"{len(matrix.sample_ids)} sample ids for {n} rows")
    for pos, g in enumerate(matrix.gene_ids):
        if g.index != pos:
            findings.append(f"gene {g.name!r} has index {g.index} at position {pos}")
    counts = Counter(g.name for g in matrix.gene_ids)
    for name, c in counts.items():
        if c > 1:
            findings.append(f"duplicate gene name {name!r}")
    for i, j in zip(*np.nonzero(~np.isfinite(matrix.values))):
        findings.append(f"non-finite at sample {i}, gene {j}")
    return findings


def zero_variance_genes(matrix: ExpressionMatrix) -> list[GeneId]:
    if matrix.n < 2:
        return list(matrix.gene_ids)
    var = matrix.values.var(axis=0, ddof=1)
    return [g for g, v in zip(matrix.gene_ids, var) if v <= ZERO_VARIANCE_TOL]
