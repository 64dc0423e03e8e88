"""Binary label prediction from pinch clusters.

:func:`propagate` clusters every connected component and gives each
unlabeled vertex the mean label of the labeled vertices sharing its cluster.
:func:`bagged_predict` repeats this on random subsamples of the unlabeled
vertices and averages the estimates.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError
from .graph import WeightedGraph
from .seeding import derive_seed, rng_for
from .tilo import cluster_graph

LabelAssignment = Mapping[str, int]


@dataclass(frozen=True)
class PredictionVector:
    """Probability of label 1 per unlabeled vertex.

    ``counts[v]`` is the number of runs that produced an estimate for ``v``;
    zero means the value is the majority-label fallback.
    """

    probs: dict[str, float]
    counts: dict[str, int] = field(default_factory=dict)

    def __getitem__(self, vertex_id: str) -> float:
        return self.probs[vertex_id]

    def __len__(self) -> int:
        return len(self.probs)

    def as_array(self, vertex_ids) -> np.ndarray:
        return np.array([self.probs[v] for v in vertex_ids], dtype=float)


@dataclass(frozen=True)
class BagConfig:
    runs: int = 25
    fraction: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if int(self.runs) != self.runs or self.runs < 1:
            raise DomainError(f"runs must be a positive integer, got {self.runs!r}")
        if not 0.0 < self.fraction <= 1.0:
            raise DomainError(f"sample fraction must lie in (0, 1], got {self.fraction!r}")


def _check_labels(g: WeightedGraph, labels: LabelAssignment) -> dict[str, int]:
    if not labels:
        raise DomainError("at least one labeled vertex is required")
    out = {}
    for v, y in labels.items():
        if not g.has_vertex(v):
            raise DomainError(f"labeled vertex {v!r} is not in the graph")
        if y not in (0, 1):
            raise DomainError(f"label of {v!r} must be 0 or 1, got {y!r}")
        out[v] = int(y)
    return out


def majority_label(labels: LabelAssignment) -> int:
    """Most common label; ties go to 0."""
    ones = sum(labels.values())
    return 1 if 2 * ones > len(labels) else 0


def propagate(g: WeightedGraph, labels: LabelAssignment, seed: int) -> PredictionVector:
    """Cluster-mean label estimates for every unlabeled vertex of ``g``."""
    labels = _check_labels(g, labels)
    fallback = float(majority_label(labels))
    ids = g.vertex_ids
    probs: dict[str, float] = {}
    for cluster in cluster_graph(g, seed):
        known = [labels[ids[v]] for v in cluster if ids[v] in labels]
        value = sum(known) / len(known) if known else fallback
        for v in cluster:
            if ids[v] not in labels:
                probs[ids[v]] = value
    return PredictionVector(probs, {v: 1 for v in probs})


def _bag_run(g: WeightedGraph, labels: dict[str, int], unlabeled: list[int], cfg: BagConfig, r: int):
    take = math.floor(cfg.fraction * len(unlabeled))
    rng = rng_for(cfg.seed, r, 0)
    chosen = rng.choice(len(unlabeled), size=take, replace=False)
    keep = [g.index_of(v) for v in labels] + [unlabeled[i] for i in chosen]
    sub = g.subgraph(keep)
    return propagate(sub, labels, derive_seed(cfg.seed, r)).probs


def bagged_predict(
    g: WeightedGraph, labels: LabelAssignment, cfg: BagConfig, workers: int = 1
) -> PredictionVector:
    """Average of :func:`propagate` over ``cfg.runs`` subsampled bags.

    Run ``r`` (1-based) keeps every labeled vertex plus
    ``floor(fraction * u)`` of the ``u`` unlabeled ones, drawn without
    replacement, and propagates with seed ``derive_seed(cfg.seed, r)``. Each
    vertex averages the runs that sampled it; vertices never sampled get the
    majority label. ``workers > 1`` runs bags on a thread pool with results
    identical to the sequential order.
    """
    labels = _check_labels(g, labels)
    unlabeled = [i for i, v in enumerate(g.vertex_ids) if v not in labels]
    runs = range(1, cfg.runs + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: _bag_run(g, labels, unlabeled, cfg, r), runs))
    else:
        results = [_bag_run(g, labels, unlabeled, cfg, r) for r in runs]

    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for probs in results:
        for v, p in probs.items():
            sums[v] = sums.get(v, 0.0) + p
            counts[v] = counts.get(v, 0) + 1
    fallback = float(majority_label(labels))
    ids = g.vertex_ids
    out: dict[str, float] = {}
    final_counts: dict[str, int] = {}
    for i in unlabeled:
        v = ids[i]
        k = counts.get(v, 0)
        out[v] = sums[v] / k if k else fallback
        final_counts[v] = k
    return PredictionVector(out, final_counts)
