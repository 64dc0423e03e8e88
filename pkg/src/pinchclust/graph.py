"""Weighted undirected graphs, boundaries and connected components."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .errors import DomainError, InputError

# Integer scaling limits used by :meth:`WeightedGraph.integer_weights`.
_MAX_DENOMINATOR = 10**6
_INT_BUDGET = 2**53
_REL_TOL = 1e-12


class WeightedGraph:
    """Immutable undirected graph with positive edge weights.

    Vertices are the integers ``0..n-1``; ``vertex_ids`` holds the external
    name of each one. Edges are stored once, as ``(u, v)`` with ``u < v``,
    sorted lexicographically. Zero-weight edges are dropped.
    """

    def __init__(self, vertex_ids: Sequence[str], edges: Iterable[tuple[int, int, float]] = ()):
        ids = tuple(str(v) for v in vertex_ids)
        index = {v: i for i, v in enumerate(ids)}
        if len(index) != len(ids):
            raise InputError("duplicate vertex identifiers")
        n = len(ids)
        store: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge ({u}, {v}) references a missing vertex")
            if u == v:
                raise DomainError(f"self-loop on vertex {ids[u]!r}")
            if not math.isfinite(w) or w < 0:
                raise DomainError(f"edge ({ids[u]!r}, {ids[v]!r}) has invalid weight {w}")
            key = (u, v) if u < v else (v, u)
            if key in store:
                raise DomainError(f"duplicate edge ({ids[key[0]]!r}, {ids[key[1]]!r})")
            if w > 0:
                store[key] = w
        keys = sorted(store)
        self._ids = ids
        self._index = index
        self.src = np.array([k[0] for k in keys], dtype=np.int64)
        self.dst = np.array([k[1] for k in keys], dtype=np.int64)
        self.weight = np.array([store[k] for k in keys], dtype=np.float64)
        for arr in (self.src, self.dst, self.weight):
            arr.setflags(write=False)

    @classmethod
    def from_dense(cls, matrix, vertex_ids: Sequence[str] | None = None, threshold: float = 0.0) -> "WeightedGraph":
        """Build from a square similarity matrix.

        The matrix is symmetrized as ``(M + M.T) / 2``; the diagonal and
        entries ``<= threshold`` are ignored.
        """
        m = np.asarray(matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"matrix must be square, got shape {m.shape}")
        n = m.shape[0]
        if vertex_ids is None:
            vertex_ids = [str(i) for i in range(n)]
        if len(vertex_ids) != n:
            raise InputError(f"{len(vertex_ids)} identifiers for a {n}x{n} matrix")
        if np.any(m < 0):
            raise InputError("negative matrix entries")
        sym = (m + m.T) / 2.0
        iu, ju = np.triu_indices(n, k=1)
        vals = sym[iu, ju]
        keep = vals > threshold
        return cls(vertex_ids, zip(iu[keep], ju[keep], vals[keep]))

    @classmethod
    def from_sparse(cls, matrix, vertex_ids: Sequence[str] | None = None, threshold: float = 0.0) -> "WeightedGraph":
        """Like :meth:`from_dense` for a scipy sparse matrix."""
        m = matrix.tocsr().astype(np.float64)
        if m.shape[0] != m.shape[1]:
            raise InputError(f"matrix must be square, got shape {m.shape}")
        n = m.shape[0]
        if vertex_ids is None:
            vertex_ids = [str(i) for i in range(n)]
        if len(vertex_ids) != n:
            raise InputError(f"{len(vertex_ids)} identifiers for a {n}x{n} matrix")
        if m.nnz and m.data.min() < 0:
            raise InputError("negative matrix entries")
        sym = ((m + m.T) / 2.0).tocoo()
        keep = (sym.row < sym.col) & (sym.data > threshold)
        return cls(vertex_ids, zip(sym.row[keep], sym.col[keep], sym.data[keep]))

    @classmethod
    def from_id_edges(cls, edges: Iterable[tuple[str, str, float]], vertex_ids: Sequence[str] | None = None) -> "WeightedGraph":
        """Build from ``(id_u, id_v, weight)`` triples.

        Without ``vertex_ids`` the vertex order is order of first appearance.
        """
        edges = list(edges)
        if vertex_ids is None:
            seen: dict[str, None] = {}
            for u, v, _ in edges:
                seen.setdefault(str(u), None)
                seen.setdefault(str(v), None)
            vertex_ids = list(seen)
        index = {v: i for i, v in enumerate(vertex_ids)}
        try:
            triples = [(index[str(u)], index[str(v)], w) for u, v, w in edges]
        except KeyError as exc:
            raise InputError(f"unknown vertex {exc.args[0]!r}") from None
        return cls(vertex_ids, triples)

    # basic accessors

    @property
    def vertex_ids(self) -> tuple[str, ...]:
        return self._ids

    @property
    def n(self) -> int:
        return len(self._ids)

    @property
    def edge_count(self) -> int:
        return len(self.weight)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, edges={self.edge_count})"

    def index_of(self, vertex_id: str) -> int:
        try:
            return self._index[vertex_id]
        except KeyError:
            raise DomainError(f"unknown vertex {vertex_id!r}") from None

    def has_vertex(self, vertex_id: str) -> bool:
        return vertex_id in self._index

    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()))

    def edge_dict(self) -> dict[tuple[str, str], float]:
        """Edges keyed by identifier pair, smaller identifier first."""
        out = {}
        for u, v, w in self.edges():
            a, b = sorted((self._ids[u], self._ids[v]))
            out[(a, b)] = w
        return out

    def weight_between(self, u: int, v: int) -> float:
        return self.adjacency[u].get(v, 0.0)

    @cached_property
    def adjacency(self) -> list[dict[int, float]]:
        adj: list[dict[int, float]] = [{} for _ in range(self.n)]
        for u, v, w in self.edges():
            adj[u][v] = w
            adj[v][u] = w
        return adj

    @cached_property
    def degree(self) -> np.ndarray:
        """Weighted degree of every vertex."""
        deg = np.zeros(self.n)
        np.add.at(deg, self.src, self.weight)
        np.add.at(deg, self.dst, self.weight)
        return deg

    @cached_property
    def isolated(self) -> np.ndarray:
        """Boolean mask of vertices with no incident edge."""
        mask = np.ones(self.n, dtype=bool)
        mask[self.src] = False
        mask[self.dst] = False
        return mask

    def total_weight(self) -> float:
        return math.fsum(self.weight.tolist())

    def csr(self) -> csr_matrix:
        n = self.n
        rows = np.concatenate([self.src, self.dst])
        cols = np.concatenate([self.dst, self.src])
        data = np.concatenate([self.weight, self.weight])
        return csr_matrix((data, (rows, cols)), shape=(n, n))

    def integer_weights(self) -> tuple[np.ndarray, Fraction]:
        """Edge weights as exact integers, plus the factor they were scaled by.

        Rational weights with small denominators (decimal input, averages of
        integer matrices), up to relative rounding error 1e-12, are scaled by the lcm of their denominators and
        divided by the gcd, so ``w * c`` and ``w`` give identical integers for
        rational ``c > 0``. Other weights are quantized to 2**-k of the total.
        """
        return self._integer_weights

    @cached_property
    def _integer_weights(self) -> tuple[np.ndarray, Fraction]:
        if self.edge_count == 0:
            return np.zeros(0, dtype=np.int64), Fraction(1)
        fracs = [Fraction(w).limit_denominator(_MAX_DENOMINATOR) for w in self.weight.tolist()]
        # accept a fraction when it explains the float up to a few ulps, so
        # products like 3 * 0.1 still map onto 3/10
        exact = all(abs(float(f) - w) <= _REL_TOL * w for f, w in zip(fracs, self.weight.tolist()))
        if exact:
            lcm = 1
            for f in fracs:
                lcm = math.lcm(lcm, f.denominator)
            ints = [f.numerator * (lcm // f.denominator) for f in fracs]
            g = 0
            for i in ints:
                g = math.gcd(g, i)
            ints = [i // g for i in ints]
            if sum(ints) < _INT_BUDGET:
                return np.array(ints, dtype=np.int64), Fraction(lcm, g)
        # Fallback: fixed-point quantization; total weight stays below 2**53.
        total = math.fsum(self.weight.tolist())
        scale = 2 ** (52 - math.frexp(total)[1])
        ints = np.rint(self.weight * scale).astype(np.int64)
        return ints, Fraction(scale)

    # derived graphs

    def subgraph(self, vertices: Iterable[int]) -> "WeightedGraph":
        """Induced subgraph on ``vertices``, kept in ascending index order."""
        keep = sorted(set(int(v) for v in vertices))
        for v in keep:
            if not 0 <= v < self.n:
                raise DomainError(f"vertex index {v} out of range")
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[keep] = np.arange(len(keep))
        mask = (remap[self.src] >= 0) & (remap[self.dst] >= 0)
        edges = zip(remap[self.src[mask]], remap[self.dst[mask]], self.weight[mask])
        return WeightedGraph([self._ids[v] for v in keep], edges)

    def scaled(self, factor: float) -> "WeightedGraph":
        if not factor > 0:
            raise DomainError("scale factor must be positive")
        return WeightedGraph(self._ids, zip(self.src, self.dst, self.weight * factor))

    def without_isolated(self) -> "WeightedGraph":
        return self.subgraph(np.flatnonzero(~self.isolated))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return set(self._ids) == set(other._ids) and self.edge_dict() == other.edge_dict()

    __hash__ = None  # type: ignore[assignment]


def _as_index_array(g: WeightedGraph, a: Iterable[int]) -> np.ndarray:
    idx = np.fromiter((int(v) for v in a), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= g.n):
        bad = idx[(idx < 0) | (idx >= g.n)][0]
        raise DomainError(f"vertex index {bad} not in graph")
    return idx


def membership(g: WeightedGraph, a: Iterable[int]) -> np.ndarray:
    """Boolean membership mask of the vertex set ``a``."""
    mask = np.zeros(g.n, dtype=bool)
    mask[_as_index_array(g, a)] = True
    return mask


def boundary_size(g: WeightedGraph, a: Iterable[int]) -> float:
    """Total weight of edges with exactly one endpoint in ``a``.

    Summed with :func:`math.fsum` over the sorted edge list, so the result is
    independent of how ``a`` is given.
    """
    mask = membership(g, a)
    crossing = mask[g.src] != mask[g.dst]
    return math.fsum(g.weight[crossing].tolist())


def internal_weight(g: WeightedGraph, a: Iterable[int]) -> float:
    mask = membership(g, a)
    inside = mask[g.src] & mask[g.dst]
    return math.fsum(g.weight[inside].tolist())


@dataclass(frozen=True)
class ComponentDecomposition:
    """Connected components, ordered by smallest contained vertex."""

    blocks: tuple[tuple[int, ...], ...]
    block_of: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.blocks)

    def sizes(self) -> list[int]:
        return [len(b) for b in self.blocks]


def connected_components(g: WeightedGraph) -> ComponentDecomposition:
    if g.n == 0:
        return ComponentDecomposition((), ())
    _, raw = _cc(g.csr(), directed=False)
    # relabel so block order follows the smallest member
    relabel: dict[int, int] = {}
    for lab in raw.tolist():
        relabel.setdefault(lab, len(relabel))
    block_of = tuple(relabel[lab] for lab in raw.tolist())
    blocks: list[list[int]] = [[] for _ in relabel]
    for v, b in enumerate(block_of):
        blocks[b].append(v)
    return ComponentDecomposition(tuple(tuple(b) for b in blocks), block_of)


def integrate(graphs: Sequence[WeightedGraph]) -> WeightedGraph:
    """Entrywise mean of graphs over a shared vertex universe.

    Inputs are aligned by identifier; vertex order follows the first graph.
    """
    if not graphs:
        raise DomainError("integrate needs at least one graph")
    ids = graphs[0].vertex_ids
    universe = set(ids)
    k = len(graphs)
    sums: dict[tuple[str, str], list[float]] = {}
    for g in graphs:
        if set(g.vertex_ids) != universe:
            raise DomainError("graphs do not share a vertex universe")
        for key, w in g.edge_dict().items():
            sums.setdefault(key, []).append(w)
    index = {v: i for i, v in enumerate(ids)}
    edges = [(index[a], index[b], math.fsum(ws) / k) for (a, b), ws in sums.items()]
    return WeightedGraph(ids, edges)


def graph_stats(g: WeightedGraph) -> dict[str, int]:
    """(components, vertices, edges) ignoring isolated vertices."""
    comps = connected_components(g)
    return {
        "components": sum(1 for b in comps.blocks if len(b) > 1),
        "vertices": int((~g.isolated).sum()),
        "edges": g.edge_count,
    }

