"""Correlation-filtered greedy wrapper search (SFS / SBE) scored by LOOCV.

For every target gene the candidate predictors are the genes whose
correlation with it reaches a threshold. Those candidates are ordered by
one of three strategies and handed to a forward or backward greedy search
that evaluates each tentative subset by the leave-one-out error of an
ordinary least-squares fit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Optional, Sequence

import numpy as np

from .core import ExpressionMatrix, GeneId, Metric
from .errors import TargetInCandidates
from .stats import CorrelationMatrix, LoocvError, correlation_matrix, loocv_error

Search = Literal["sfs", "sbe"]
Ordering = Literal["highest_first", "lowest_first", "unordered"]

# minimum error change treated as a real difference between subsets
IMPROVEMENT_TOL = 1e-12

_ORDER_LABEL = {"highest_first": "highest", "lowest_first": "lowest", "unordered": "without ordering"}


@dataclass(frozen=True)
class StrategyConfig:
    search: Search = "sfs"
    ordering: Ordering = "highest_first"
    threshold: float = 0.5
    use_absolute_r: bool = True
    metric: Metric = "mse"
    max_subset: Optional[int] = None  # None -> n - 2

    def __post_init__(self):
        if self.search not in ("sfs", "sbe"):
            raise ValueError(f"search must be 'sfs' or 'sbe', got {self.search!r}")
        if self.ordering not in _ORDER_LABEL:
            raise ValueError(f"unknown ordering {self.ordering!r}")
        if not 0 < self.threshold <= 1:
            raise ValueError("threshold must be in (0,1]")
        if self.metric not in ("mse", "mae"):
            raise ValueError(f"metric must be 'mse' or 'mae', got {self.metric!r}")
        if self.max_subset is not None and self.max_subset < 0:
            raise ValueError("max_subset must be >= 0")

    @property
    def label(self) -> str:
        return f"Ensemble method –{self.search.upper()} ({_ORDER_LABEL[self.ordering]})"

    def subset_cap(self, n: int) -> int:
        return max(n - 2, 0) if self.max_subset is None else self.max_subset


# row order of the published strategy table
STRATEGY_GRID = (
    ("sfs", "highest_first"),
    ("sfs", "lowest_first"),
    ("sfs", "unordered"),
    ("sbe", "lowest_first"),
    ("sbe", "highest_first"),
    ("sbe", "unordered"),
)


def all_strategies(**kwargs) -> list[StrategyConfig]:
    return [StrategyConfig(search=s, ordering=o, **kwargs) for s, o in STRATEGY_GRID]


class TraceStep(NamedTuple):
    step: int
    gene: Optional[GeneId]
    action: str  # start | add | remove | stop
    error: float


@dataclass
class SelectionResult:
    target: GeneId
    candidates: list[GeneId]
    selected: list[GeneId]
    error: LoocvError
    trace: list[TraceStep] = field(default_factory=list)
    start_set: list[GeneId] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "target": self.target.name,
            "candidates": [g.name for g in self.candidates],
            "start_set": [g.name for g in self.start_set],
            "selected": [g.name for g in self.selected],
            "error": self.error.value,
            "metric": self.error.metric,
            "trace": [
                {"step": t.step, "gene": t.gene.name if t.gene is not None else None,
                 "action": t.action, "error": t.error}
                for t in self.trace
            ],
        }


def filter_candidates(matrix: ExpressionMatrix, target: GeneId, config: StrategyConfig,
                      corr: CorrelationMatrix | None = None) -> list[GeneId]:
    if corr is None:
        corr = correlation_matrix(matrix)
    row = corr.values[target.index]
    stat = np.abs(row) if config.use_absolute_r else row
    passing = [g for g in matrix.gene_ids if g.index != target.index and stat[g.index] >= config.threshold]
    if config.ordering == "highest_first":
        passing.sort(key=lambda g: (-stat[g.index], g.index))
    elif config.ordering == "lowest_first":
        passing.sort(key=lambda g: (stat[g.index], g.index))
    return passing


def _check_target(target, candidates):
    if any(g.index == target.index for g in candidates):
        raise TargetInCandidates(f"{target.name} is among its own candidates")


def sfs(matrix: ExpressionMatrix, target: GeneId, candidates: Sequence[GeneId],
        config: StrategyConfig) -> SelectionResult:
    """Forward selection scanning candidates in the given order.

    Each candidate is tried once; it is kept only if it lowers the LOOCV
    error, and the first candidate that does not ends the search.
    """
    _check_target(target, candidates)
    cap = config.subset_cap(matrix.n)
    selected: list[GeneId] = []
    best = loocv_error(matrix, target, selected, config.metric)
    trace = [TraceStep(0, None, "start", best.value)]
    stop_gene = None
    for g in candidates:
        if len(selected) >= cap:
            break
        trial = loocv_error(matrix, target, selected + [g], config.metric)
        if trial.value < best.value - IMPROVEMENT_TOL:
            selected.append(g)
            best = trial
            trace.append(TraceStep(len(trace), g, "add", best.value))
        else:
            stop_gene = g
            break
    trace.append(TraceStep(len(trace), stop_gene, "stop", best.value))
    return SelectionResult(target, list(candidates), selected, best, trace, [])


def sbe(matrix: ExpressionMatrix, target: GeneId, candidates: Sequence[GeneId],
        config: StrategyConfig) -> SelectionResult:
    """Backward elimination from the first ``subset_cap`` candidates.

    Passes over the working set in candidate order, dropping any gene whose
    removal does not raise the LOOCV error, until a pass drops nothing.
    """
    _check_target(target, candidates)
    cap = config.subset_cap(matrix.n)
    working = list(candidates[:cap])
    start = list(working)
    best = loocv_error(matrix, target, working, config.metric)
    trace = [TraceStep(0, None, "start", best.value)]
    changed = True
    while changed and working:
        changed = False
        for g in list(working):
            rest = [h for h in working if h.index != g.index]
            trial = loocv_error(matrix, target, rest, config.metric)
            if trial.value <= best.value + IMPROVEMENT_TOL:
                working = rest
                best = trial
                changed = True
                trace.append(TraceStep(len(trace), g, "remove", best.value))
    trace.append(TraceStep(len(trace), None, "stop", best.value))
    return SelectionResult(target, list(candidates), working, best, trace, start)


def select_for_target(matrix: ExpressionMatrix, target: GeneId, config: StrategyConfig,
                      corr: CorrelationMatrix | None = None) -> SelectionResult:
    candidates = filter_candidates(matrix, target, config, corr)
    search = sfs if config.search == "sfs" else sbe
    return search(matrix, target, candidates, config)


def run_ensemble(matrix: ExpressionMatrix, config: StrategyConfig,
                 corr: CorrelationMatrix | None = None) -> tuple[list[SelectionResult], float]:
    """Run the filter + wrapper search with every gene as target.

    Returns the per-target results in gene order and their mean LOOCV error.
    """
    if corr is None:
        corr = correlation_matrix(matrix)
    results = [select_for_target(matrix, g, config, corr) for g in matrix.gene_ids]
    overall = float(np.mean([r.error.value for r in results]))
    return results, overall
