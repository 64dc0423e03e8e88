"""Slow reference implementations used to check the package.

Nothing here imports package internals beyond the public graph accessors
(vertex count and edge triples), so disagreements point at the package.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

import numpy as np


def adjacency(g) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, v, w in g.edges():
        a[u, v] = a[v, u] = w
    return a


def boundary(edges, members) -> Fraction:
    """Exact boundary size from ``(u, v, w)`` triples, weights as fractions."""
    s = set(members)
    return sum((Fraction(w) for u, v, w in edges if (u in s) != (v in s)), Fraction(0))


def profile(edges, seq) -> list[Fraction]:
    return [boundary(edges, seq[:k]) for k in range(1, len(seq))]


def profiles_dense(a: np.ndarray, seqs: np.ndarray) -> np.ndarray:
    """Profiles of many orderings at once; row ``i`` belongs to ``seqs[i]``.

    ``b_k`` is the weight between the first ``k`` vertices and the rest,
    read off the cumulative sums of each permuted adjacency matrix.
    """
    seqs = np.asarray(seqs)
    m = a[seqs[:, :, None], seqs[:, None, :]]
    n = seqs.shape[1]
    out = np.empty((len(seqs), n - 1))
    for k in range(1, n):
        out[:, k - 1] = m[:, :k, k:].sum(axis=(1, 2))
    return out


def width(p) -> tuple:
    return tuple(sorted(p, reverse=True))


def relocations(seq):
    """Every single-vertex relocation as ``(p, q, new_sequence)``."""
    n = len(seq)
    for p in range(n):
        rest = list(seq[:p]) + list(seq[p + 1:])
        for q in range(n):
            if q != p:
                yield p, q, tuple(rest[:q] + [seq[p]] + rest[q:])


def run_moves(seq, max_len):
    """Every relocation of a run of 2..max_len vertices, kept or reversed."""
    n = len(seq)
    for i in range(n):
        for length in range(2, max_len + 1):
            if i + length > n:
                break
            rest = list(seq[:i]) + list(seq[i + length:])
            for blk in (list(seq[i:i + length]), list(seq[i:i + length])[::-1]):
                for q in range(len(rest) + 1):
                    if q != i:
                        yield tuple(rest[:q] + blk + rest[q:])


def first_improvement(edges, seq):
    """First improving relocation: vertices by position, then the smallest
    left target, else the smallest right target."""
    w0 = width(profile(edges, seq))
    n = len(seq)
    for p in range(n):
        for q in list(range(0, p)) + list(range(p + 1, n)):
            rest = list(seq[:p]) + list(seq[p + 1:])
            cand = tuple(rest[:q] + [seq[p]] + rest[q:])
            if width(profile(edges, cand)) < w0:
                return cand
    return None


def local_minima(p) -> list[int]:
    """Interior plateaus strictly below both neighbours (1-based, leftmost)."""
    out = []
    n = len(p)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and p[j + 1] == p[i]:
            j += 1
        if i > 0 and j < n - 1 and p[i - 1] > p[i] < p[j + 1]:
            out.append(i + 1)
        i = j + 1
    return out


def min_width_orderings(g):
    """All orderings of ``g`` of minimum width (exhaustive)."""
    a = adjacency(g)
    perms = np.array(list(itertools.permutations(range(g.n))))
    profs = profiles_dense(a, perms)
    widths = -np.sort(-profs, axis=1)
    order = np.lexsort(widths.T[::-1])
    best = widths[order[0]]
    hits = np.all(widths == best, axis=1)
    return tuple(best), perms[hits], profs[hits]


def auc_pairs(pos, neg) -> float:
    wins = ties = 0
    for x in pos:
        for y in neg:
            if x > y:
                wins += 1
            elif x == y:
                ties += 1
    return (wins + Fraction(ties, 2)) / (len(pos) * len(neg))


def random_connected_edges(rng: random.Random, n: int, wmax: int = 5):
    """Random connected graph: a random spanning tree plus extra edges."""
    while True:
        p = rng.uniform(0.2, 0.8)
        edges = [(i, j, rng.randint(1, wmax)) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for u, v, _ in edges:
            parent[find(u)] = find(v)
        if len({find(v) for v in range(n)}) == 1:
            return edges


def mean_label_predictions(clusters, ids, labels):
    """Cluster-mean predictions with majority fallback, ties to 0."""
    ones = sum(labels.values())
    fallback = 1.0 if 2 * ones > len(labels) else 0.0
    out = {}
    for c in clusters:
        known = [labels[ids[v]] for v in c if ids[v] in labels]
        val = sum(known) / len(known) if known else fallback
        for v in c:
            if ids[v] not in labels:
                out[ids[v]] = val
    return out


def is_pinch_cluster(g, members) -> bool:
    """Breadth-first search over vertex sets one toggle apart.

    Starting from ``members``, walk through every set reachable by adding
    or removing single vertices while the boundary never exceeds the
    starting boundary; the start is a pinch cluster iff no visited set
    (the empty and full sets included) has a strictly smaller boundary.
    """
    edges = g.edges()
    start = frozenset(members)
    b0 = boundary(edges, start)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for s in frontier:
            for v in range(g.n):
                t = s ^ {v}
                if t in seen:
                    continue
                b = boundary(edges, t)
                if b < b0:
                    return False
                if b <= b0:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return True
