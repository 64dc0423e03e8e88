"""ROC scoring and repeated k-fold cross-validation of bagged predictions."""
from __future__ import annotations

import json
import logging
import math
import statistics
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateFoldError, DomainError, EvaluationError
from .graph import WeightedGraph
from .seeding import derive_seed, rng_for
from .semisup import BagConfig, LabelAssignment, bagged_predict

log = logging.getLogger(__name__)


def roc_auc(scores: Mapping[str, float], truth: Mapping[str, int]) -> float:
    """Area under the ROC curve of ``scores`` on the vertices of ``truth``.

    Counts positive/negative pairs ranked correctly, ties counting half.
    Raises :class:`DegenerateFoldError` unless both classes are present.
    """
    pos = np.array([scores[v] for v, y in truth.items() if y == 1], dtype=float)
    neg = np.array([scores[v] for v, y in truth.items() if y == 0], dtype=float)
    if len(pos) + len(neg) != len(truth):
        raise DomainError("truth labels must be 0 or 1")
    if len(pos) == 0 or len(neg) == 0:
        raise DegenerateFoldError(f"need both classes, got {len(pos)} positive and {len(neg)} negative")
    neg.sort()
    below = np.searchsorted(neg, pos, side="left")
    not_above = np.searchsorted(neg, pos, side="right")
    # twice the Mann-Whitney statistic, kept integral so ties stay exact
    twice = int(np.sum(below + not_above))
    return twice / (2 * len(pos) * len(neg))


@dataclass(frozen=True)
class FoldPlan:
    """Fold index of every labeled vertex, for each repeat."""

    k: int
    repeats: int
    seed: int
    assignments: tuple[dict[str, int], ...]
    stratified: bool = True

    def folds(self, repeat: int) -> list[list[str]]:
        out: list[list[str]] = [[] for _ in range(self.k)]
        for v, f in self.assignments[repeat].items():
            out[f].append(v)
        return out


def make_folds(labels: LabelAssignment, k: int, repeats: int, seed: int) -> FoldPlan:
    """Stratified k-fold assignments, reshuffled for every repeat.

    Each class is shuffled separately and the classes are dealt round-robin
    into folds, one after the other, so fold sizes and per-class counts per
    fold differ by at most one. If some class has fewer than ``k`` members,
    folds are dealt from one shuffle of all vertices instead (with a warning).
    """
    if k < 2:
        raise DomainError(f"need at least 2 folds, got {k}")
    if repeats < 1:
        raise DomainError(f"need at least 1 repeat, got {repeats}")
    if len(labels) < k:
        raise DomainError(f"{len(labels)} labeled vertices cannot fill {k} folds")
    classes = [sorted(v for v, y in labels.items() if y == c) for c in (0, 1)]
    stratified = all(len(members) >= k for members in classes)
    if not stratified:
        warnings.warn(
            f"a class has fewer than {k} members; folds are not stratified",
            stacklevel=2,
        )
        classes = [sorted(labels)]
    assignments = []
    for r in range(repeats):
        rng = rng_for(seed, r)
        dealt = [members[i] for members in classes for i in rng.permutation(len(members))]
        assignments.append({v: i % k for i, v in enumerate(dealt)})
    return FoldPlan(k, repeats, seed, tuple(assignments), stratified)


@dataclass(frozen=True)
class RocResult:
    """Fold AUCs of one cross-validation; ``fold_scores`` holds (repeat, fold, auc)."""

    fold_scores: tuple[tuple[int, int, float], ...]
    skipped: tuple[tuple[int, int, str], ...] = ()

    @property
    def scores(self) -> list[float]:
        return [s for _, _, s in self.fold_scores]

    @property
    def mean(self) -> float:
        return statistics.fmean(self.scores)

    @property
    def std(self) -> float:
        """Sample standard deviation over all scored folds."""
        s = self.scores
        return statistics.stdev(s) if len(s) > 1 else math.nan

    @property
    def repeat_means(self) -> list[float]:
        by_repeat: dict[int, list[float]] = {}
        for r, _, s in self.fold_scores:
            by_repeat.setdefault(r, []).append(s)
        return [statistics.fmean(by_repeat[r]) for r in sorted(by_repeat)]

    @property
    def repeat_std(self) -> float:
        """Sample standard deviation of the per-repeat means."""
        m = self.repeat_means
        return statistics.stdev(m) if len(m) > 1 else math.nan

    def to_dict(self) -> dict:
        return {
            "fold_scores": [{"repeat": r, "fold": f, "auc": s} for r, f, s in self.fold_scores],
            "skipped": [{"repeat": r, "fold": f, "reason": why} for r, f, why in self.skipped],
            "mean": self.mean,
            "std_folds": _json_float(self.std),
            "repeat_means": self.repeat_means,
            "std_repeats": _json_float(self.repeat_std),
        }


def _json_float(x: float) -> float | None:
    return None if math.isnan(x) else x


def cross_validate(
    g: WeightedGraph,
    labels: LabelAssignment,
    plan: FoldPlan,
    cfg: BagConfig,
    *,
    score_isolated: bool = False,
    workers: int = 1,
) -> RocResult:
    """Hide each fold in turn, predict it from the rest and score the AUC.

    Fold ``f`` of repeat ``r`` bags with master seed
    ``derive_seed(cfg.seed, r, f)``. Test vertices isolated in ``g`` are left
    out of the score unless ``score_isolated`` is set. Folds lacking a class
    (or a training label) are skipped and recorded.
    """
    isolated = g.isolated
    ids = g.vertex_ids
    excluded = set() if score_isolated else {ids[i] for i in np.flatnonzero(isolated)}
    scored: list[tuple[int, int, float]] = []
    skipped: list[tuple[int, int, str]] = []
    for r in range(plan.repeats):
        for f, test in enumerate(plan.folds(r)):
            test_set = set(test)
            train = {v: y for v, y in labels.items() if v not in test_set}
            if not train:
                skipped.append((r, f, "no training labels"))
                continue
            fold_cfg = BagConfig(cfg.runs, cfg.fraction, derive_seed(cfg.seed, r, f))
            pred = bagged_predict(g, train, fold_cfg, workers=workers)
            truth = {v: labels[v] for v in sorted(test_set) if v not in excluded}
            try:
                auc = roc_auc(pred.probs, truth)
            except DegenerateFoldError as exc:
                log.info("repeat %d fold %d skipped: %s", r, f, exc)
                skipped.append((r, f, str(exc)))
                continue
            scored.append((r, f, auc))
    if not scored:
        raise EvaluationError("every fold was degenerate; nothing to score")
    return RocResult(tuple(scored), tuple(skipped))


@dataclass(frozen=True)
class ExperimentReport:
    """Cross-validation results for every (class, graph) pair."""

    classes: tuple[str, ...]
    graphs: tuple[str, ...]
    cells: dict[tuple[str, str], RocResult] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.cells)

    def to_tsv(self) -> str:
        lines = ["class\t" + "\t".join(self.graphs)]
        for c in self.classes:
            row = [c]
            for gname in self.graphs:
                res = self.cells[c, gname]
                row.append(f"{res.mean:.3f}±{res.std:.3f}")
            lines.append("\t".join(row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "classes": list(self.classes),
            "graphs": list(self.graphs),
            "cells": [
                {"class": c, "graph": gname, **self.cells[c, gname].to_dict()}
                for c in self.classes
                for gname in self.graphs
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def run_experiment(
    graphs: Sequence[tuple[str, WeightedGraph]] | Mapping[str, WeightedGraph],
    label_matrix: Sequence[tuple[str, LabelAssignment]] | Mapping[str, LabelAssignment],
    *,
    k: int = 5,
    repeats: int = 3,
    cfg: BagConfig = BagConfig(),
    score_isolated: bool = False,
    workers: int = 1,
    progress=None,
) -> ExperimentReport:
    """Cross-validate every class on every graph.

    Class ``c`` (0-based, in the given order) uses fold plan seed
    ``derive_seed(cfg.seed, c)`` on every graph, so graph columns are compared
    on identical folds, and bag seed ``derive_seed(cfg.seed, c, 1)``. Labels
    of vertices missing from a graph are ignored for that graph.
    """
    graph_items = list(graphs.items()) if isinstance(graphs, Mapping) else list(graphs)
    class_items = list(label_matrix.items()) if isinstance(label_matrix, Mapping) else list(label_matrix)
    names = [n for n, _ in graph_items]
    if len(set(names)) != len(names):
        raise DomainError("graph names must be unique")
    cells: dict[tuple[str, str], RocResult] = {}
    for ci, (cname, labels) in enumerate(class_items):
        plan = make_folds(labels, k, repeats, derive_seed(cfg.seed, ci))
        cell_cfg = BagConfig(cfg.runs, cfg.fraction, derive_seed(cfg.seed, ci, 1))
        for gname, g in graph_items:
            present = {v: y for v, y in labels.items() if g.has_vertex(v)}
            if len(present) != len(labels):
                plan_g = FoldPlan(
                    plan.k, plan.repeats, plan.seed,
                    tuple({v: f for v, f in a.items() if v in present} for a in plan.assignments),
                    plan.stratified,
                )
            else:
                plan_g = plan
            cells[cname, gname] = cross_validate(
                g, present, plan_g, cell_cfg, score_isolated=score_isolated, workers=workers
            )
            if progress is not None:
                progress(cname, gname, cells[cname, gname])
    return ExperimentReport(tuple(c for c, _ in class_items), tuple(names), cells)
