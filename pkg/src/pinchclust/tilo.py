"""Width-reducing vertex orderings and the clusters cut from them.

An ordering of a connected graph induces a boundary profile: entry ``i``
(1-based) is the boundary size of the first ``i`` vertices. The width is the
profile sorted in nonincreasing order, and widths are compared
lexicographically. :func:`tilo_fixpoint` starts from a random ordering and
relocates single vertices, and then short runs of consecutive vertices,
while that strictly lowers the width; the fixed point is then cut at every
local minimum of its profile.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _kernels
from .errors import CapacityError, DomainError
from .graph import WeightedGraph, connected_components

log = logging.getLogger(__name__)

ORACLE_MAX_VERTICES = 20
# longest run of consecutive vertices relocated as one move
MAX_BLOCK = 2


class Comparison(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


BoundaryProfile = tuple
Width = tuple


@dataclass(frozen=True)
class Ordering:
    graph: WeightedGraph
    sequence: tuple[int, ...]

    def __post_init__(self):
        seq = tuple(int(v) for v in self.sequence)
        if sorted(seq) != list(range(self.graph.n)):
            raise DomainError("ordering is not a permutation of the graph's vertices")
        object.__setattr__(self, "sequence", seq)

    def __len__(self) -> int:
        return len(self.sequence)

    @property
    def vertex_ids(self) -> list[str]:
        ids = self.graph.vertex_ids
        return [ids[v] for v in self.sequence]

    def reversed(self) -> "Ordering":
        return Ordering(self.graph, self.sequence[::-1])


@dataclass(frozen=True)
class Partition:
    """Blocks cut from an ordering; ``cuts`` are prefix sizes (1-based)."""

    cuts: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.blocks)


class _CompiledGraph:
    """CSR arrays with exact integer weights, as consumed by the kernels."""

    __slots__ = ("indptr", "indices", "w", "scale")

    def __init__(self, g: WeightedGraph):
        ints, scale = g.integer_weights()
        n = g.n
        rows = np.concatenate([g.src, g.dst])
        cols = np.concatenate([g.dst, g.src])
        data = np.concatenate([ints, ints])
        perm = np.lexsort((cols, rows))
        self.indices = np.ascontiguousarray(cols[perm], dtype=np.int64)
        self.w = np.ascontiguousarray(data[perm], dtype=np.int64)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=self.indptr[1:])
        self.scale = scale


_compiled_cache: "dict[int, tuple[WeightedGraph, _CompiledGraph]]" = {}


def _compiled(g: WeightedGraph) -> _CompiledGraph:
    hit = _compiled_cache.get(id(g))
    if hit is not None and hit[0] is g:
        return hit[1]
    cg = _CompiledGraph(g)
    if len(_compiled_cache) > 64:
        _compiled_cache.clear()
    _compiled_cache[id(g)] = (g, cg)
    return cg


def _int_profile(o: Ordering) -> np.ndarray:
    cg = _compiled(o.graph)
    order = np.array(o.sequence, dtype=np.int64)
    return _kernels.profile(cg.indptr, cg.indices, cg.w, order)[1:-1]


def boundary_profile(o: Ordering) -> BoundaryProfile:
    """Boundary sizes ``(b_1, ..., b_{n-1})`` of the prefixes of ``o``."""
    if len(o) < 2:
        raise DomainError("boundary profile needs at least two vertices")
    scale = _compiled(o.graph).scale
    return tuple(float(x / scale) for x in _int_profile(o).tolist())


def width_of(p: Sequence[float]) -> Width:
    return tuple(sorted(p, reverse=True))


def compare_widths(a: Sequence[float], b: Sequence[float]) -> Comparison:
    if len(a) != len(b):
        raise DomainError(f"cannot compare widths of length {len(a)} and {len(b)}")
    for x, y in zip(a, b):
        if x < y:
            return Comparison.LESS
        if x > y:
            return Comparison.GREATER
    return Comparison.EQUAL


def _order_array(o: Ordering) -> np.ndarray:
    return np.array(o.sequence, dtype=np.int64)


def improving_move(o: Ordering) -> Ordering | None:
    """First single-vertex relocation that lowers the width, if any.

    Scans vertices by current position and targets by ascending position.
    """
    if len(o) < 2:
        return None
    cg = _compiled(o.graph)
    order = _order_array(o)
    b = _kernels.profile(cg.indptr, cg.indices, cg.w, order)
    ws = _kernels.workspace(cg.w, len(order))
    p, q = _kernels.first_improvement(cg.indptr, cg.indices, cg.w, order, b, *ws)
    if p < 0:
        return None
    _kernels.relocate(order, p, q)
    return Ordering(o.graph, tuple(order.tolist()))


def random_ordering(g: WeightedGraph, seed: int) -> Ordering:
    rng = np.random.default_rng(seed)
    return Ordering(g, tuple(rng.permutation(g.n).tolist()))


def descend(
    o: Ordering, max_moves: int | None = None, max_block: int = MAX_BLOCK
) -> tuple[Ordering, int]:
    """Relocate vertices until no move lowers the width.

    Each step applies the single-vertex relocation giving the smallest width.
    Once none helps, runs of 2..``max_block`` consecutive vertices (kept in
    order or reversed) are tried, first improvement in scan order; any
    success resumes the single-vertex phase. ``max_block < 2`` disables run
    moves. Returns the final ordering and the number of accepted moves.
    """
    if len(o) < 2:
        return o, 0
    cg = _compiled(o.graph)
    order = _order_array(o)
    limit = -1 if max_moves is None else max_moves
    moves = _kernels.descend(cg.indptr, cg.indices, cg.w, order, limit, True, max_block)
    if moves < 0:
        raise DomainError(f"no fixed point within {max_moves} moves")
    return Ordering(o.graph, tuple(order.tolist())), moves


def descent_steps(o: Ordering, max_block: int = MAX_BLOCK) -> Iterator[Ordering]:
    """Yield the ordering after each move :func:`descend` would accept."""
    if len(o) < 2:
        return
    cg = _compiled(o.graph)
    order = _order_array(o)
    direct, tab, touched = _kernels.workspace(cg.w, len(order))
    while True:
        b = _kernels.profile(cg.indptr, cg.indices, cg.w, order)
        p, q = _kernels.steepest_move(cg.indptr, cg.indices, cg.w, order, b, direct, tab, touched)
        if p >= 0:
            _kernels.relocate(order, p, q)
        elif max_block >= 2:
            i, length, flip, t = _kernels.block_improvement(cg.indptr, cg.indices, cg.w, order, b, max_block)
            if i < 0:
                return
            _kernels.move_block(order, i, length, flip, t)
        else:
            return
        yield Ordering(o.graph, tuple(order.tolist()))


def tilo_fixpoint(g: WeightedGraph, seed: int, max_block: int = MAX_BLOCK) -> Ordering:
    """Fixed-point ordering of a connected graph from a seeded random start."""
    if g.n < 2:
        raise DomainError("tilo_fixpoint needs at least two vertices")
    if len(connected_components(g)) != 1:
        raise DomainError("tilo_fixpoint needs a connected graph")
    return descend(random_ordering(g, seed), max_block=max_block)[0]


def local_minima(p: Sequence[float]) -> list[int]:
    """1-based indices of the interior local minima of a profile.

    Runs of equal values are collapsed first. A run is a minimum when both
    neighbouring runs are strictly larger; it reports its leftmost index.
    Runs touching either end of the profile never count.
    """
    runs: list[tuple[float, int]] = []
    for i, x in enumerate(p, start=1):
        if not runs or runs[-1][0] != x:
            runs.append((x, i))
    return [
        runs[j][1]
        for j in range(1, len(runs) - 1)
        if runs[j - 1][0] > runs[j][0] < runs[j + 1][0]
    ]


def extract_clusters(o: Ordering) -> Partition:
    seq = o.sequence
    if len(seq) < 2:
        return Partition((), (seq,) if seq else ())
    # integer profile: minima are decided on exact values
    cuts = tuple(local_minima(_int_profile(o).tolist()))
    bounds = (0,) + cuts + (len(seq),)
    blocks = tuple(seq[a:b] for a, b in zip(bounds, bounds[1:]))
    return Partition(cuts, blocks)


def cluster_graph(g: WeightedGraph, seed: int) -> list[tuple[int, ...]]:
    """Clusters of every component of ``g``; isolated vertices are singletons.

    Component ``c`` (ordered by smallest vertex) is searched with seed
    ``derive_seed(seed, c)``.
    """
    from .seeding import derive_seed

    out: list[tuple[int, ...]] = []
    for c, block in enumerate(connected_components(g).blocks):
        if len(block) == 1:
            out.append(block)
            continue
        sub = g.subgraph(block)
        part = extract_clusters(tilo_fixpoint(sub, derive_seed(seed, c)))
        out.extend(tuple(block[v] for v in cl) for cl in part.blocks)
    return out


def is_pinch_cluster_oracle(g: WeightedGraph, s: Iterable[int]) -> bool:
    """Exhaustive check that no single-vertex toggle path escapes ``s`` downhill.

    Explores every set reachable from ``s`` by adding or removing one vertex
    at a time without ever exceeding ``s``'s boundary; ``s`` is a pinch
    cluster iff none of them has a strictly smaller boundary.
    """
    n = g.n
    if n > ORACLE_MAX_VERTICES:
        raise CapacityError(f"oracle limited to {ORACLE_MAX_VERTICES} vertices, got {n}")
    members = {int(v) for v in s}
    if any(not 0 <= v < n for v in members):
        raise DomainError("vertex set not contained in graph")
    if not members or len(members) == n:
        raise DomainError("vertex set must be a nonempty proper subset")
    ints, _ = g.integer_weights()
    nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for (u, v), x in zip(zip(g.src.tolist(), g.dst.tolist()), ints.tolist()):
        nbrs[u].append((v, x))
        nbrs[v].append((u, x))
    deg = [sum(x for _, x in row) for row in nbrs]

    start = 0
    for v in members:
        start |= 1 << v
    b0 = 0
    for u in range(n):
        if start >> u & 1:
            b0 += sum(x for t, x in nbrs[u] if not start >> t & 1)
    if b0 == 0:
        return True

    seen = {start}
    queue = deque([(start, b0)])
    while queue:
        mask, b = queue.popleft()
        for v in range(n):
            inside = sum(x for t, x in nbrs[v] if mask >> t & 1)
            if mask >> v & 1:
                nb, nmask = b + 2 * inside - deg[v], mask & ~(1 << v)
            else:
                nb, nmask = b + deg[v] - 2 * inside, mask | (1 << v)
            if nb < b0:
                return False
            if nb <= b0 and nmask not in seen:
                seen.add(nmask)
                queue.append((nmask, nb))
    return True
