"""Reading and writing graphs and labels, dataset manifests and synthetic data.

File formats
------------
Edge list
    Tab-separated ``u<TAB>v<TAB>weight`` lines (``u<TAB>v`` means weight 1).
    A line holding a single identifier declares a vertex, which is how
    isolated vertices are written. Blank lines and ``#`` comments are skipped.
Labels
    ``vertex_id<TAB>0|1`` per line.
Label matrix
    A header row ``vertex_id<TAB>class...`` followed by one row of binary
    entries per vertex.
Manifest
    JSON object with ``matrices`` (list of ``{name, path, format, ids?}``,
    format one of ``edgelist``, ``mtx``, ``dense``), ``labels`` (label matrix
    path), and optionally ``expected_stats`` (``{name: {components,
    vertices, edges}}``), ``integrate`` (``true`` or a list of names; adds a
    graph named ``integrated``) and ``threshold``. Relative paths resolve
    against the manifest's directory.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import scipy.io
import scipy.sparse

from .errors import DomainError, InputError
from .graph import WeightedGraph, graph_stats, integrate

INTEGRATED = "integrated"


def _read_lines(path) -> list[tuple[int, list[str]]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append((lineno, line.split("\t")))
    return out


def _parse_weight(field_: str, where: str) -> float:
    try:
        w = float(field_)
    except ValueError:
        raise InputError(f"{where}: weight {field_!r} is not a number") from None
    if not math.isfinite(w) or w < 0:
        raise InputError(f"{where}: weight must be finite and nonnegative, got {field_!r}")
    return w


def read_edge_list(path) -> WeightedGraph:
    """Parse an edge-list file; vertices are numbered by first appearance."""
    rows = _read_lines(path)
    if not rows:
        raise InputError(f"{path}: no vertices")
    index: dict[str, int] = {}
    edges: dict[tuple[int, int], float] = {}
    for lineno, fields in rows:
        where = f"{path}:{lineno}"
        if len(fields) > 3 or any(not f for f in fields):
            raise InputError(f"{where}: expected 1 to 3 nonempty tab-separated fields")
        ends = [index.setdefault(f, len(index)) for f in fields[:2]]
        if len(fields) == 1:
            continue
        u, v = ends
        if u == v:
            raise InputError(f"{where}: self-loop on {fields[0]!r}")
        w = _parse_weight(fields[2], where) if len(fields) == 3 else 1.0
        key = (min(u, v), max(u, v))
        if key in edges:
            raise InputError(f"{where}: duplicate edge {fields[0]!r} - {fields[1]!r}")
        edges[key] = w
    return WeightedGraph(list(index), ((u, v, w) for (u, v), w in edges.items()))


def format_edge_list(g: WeightedGraph) -> str:
    """Canonical edge-list text: identifiers and edges in sorted order.

    Isolated vertices come first as single-field lines; weights use
    ``repr`` so they parse back to the same float.
    """
    ids = g.vertex_ids
    lines = [ids[i] for i in np.flatnonzero(g.isolated)]
    lines.sort()
    edges = sorted((min(ids[u], ids[v]), max(ids[u], ids[v]), w) for u, v, w in g.edges())
    lines.extend(f"{a}\t{b}\t{w!r}" for a, b, w in edges)
    return "".join(line + "\n" for line in lines)


def write_edge_list(g: WeightedGraph, path) -> None:
    Path(path).write_text(format_edge_list(g), encoding="utf-8")


def read_matrix(path, fmt: str, vertex_ids: Sequence[str] | None, threshold: float = 0.0) -> WeightedGraph:
    """Read a similarity matrix (``mtx`` Matrix Market or ``dense`` text)."""
    try:
        if fmt == "mtx":
            m = scipy.io.mmread(str(path))
        elif fmt == "dense":
            m = np.loadtxt(str(path), dtype=float, ndmin=2)
        else:
            raise InputError(f"unknown matrix format {fmt!r}")
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read matrix {path}: {exc}") from None
    if scipy.sparse.issparse(m):
        return WeightedGraph.from_sparse(m, vertex_ids, threshold)
    return WeightedGraph.from_dense(m, vertex_ids, threshold)


def read_ids(path) -> list[str]:
    return [fields[0] for _, fields in _read_lines(path)]


def read_labels(path) -> dict[str, int]:
    """``vertex_id<TAB>label`` lines into a dict; labels must be 0 or 1."""
    out: dict[str, int] = {}
    for lineno, fields in _read_lines(path):
        where = f"{path}:{lineno}"
        if len(fields) != 2 or fields[1] not in ("0", "1"):
            raise InputError(f"{where}: expected 'vertex_id<TAB>0|1'")
        if fields[0] in out:
            raise InputError(f"{where}: vertex {fields[0]!r} labeled twice")
        out[fields[0]] = int(fields[1])
    return out


def write_labels(labels: Mapping[str, int], path) -> None:
    Path(path).write_text("".join(f"{v}\t{labels[v]}\n" for v in sorted(labels)), encoding="utf-8")


def read_label_matrix(path) -> tuple[list[str], list[tuple[str, dict[str, int]]]]:
    """Vertex ids (row order) and one label assignment per class column."""
    rows = _read_lines(path)
    if not rows:
        raise InputError(f"{path}: empty label matrix")
    header = rows[0][1]
    classes = header[1:]
    if not classes:
        raise InputError(f"{path}: header names no classes")
    if len(set(classes)) != len(classes):
        raise InputError(f"{path}: duplicate class names")
    ids: list[str] = []
    columns: list[dict[str, int]] = [{} for _ in classes]
    seen = set()
    for lineno, fields in rows[1:]:
        where = f"{path}:{lineno}"
        if len(fields) != len(header):
            raise InputError(f"{where}: expected {len(header)} fields, got {len(fields)}")
        v = fields[0]
        if v in seen:
            raise InputError(f"{where}: vertex {v!r} listed twice")
        seen.add(v)
        ids.append(v)
        for col, x in zip(columns, fields[1:]):
            if x not in ("0", "1"):
                raise InputError(f"{where}: non-binary label {x!r}")
            col[v] = int(x)
    return ids, list(zip(classes, columns))


def write_label_matrix(classes: Sequence[tuple[str, Mapping[str, int]]], path) -> None:
    ids = sorted(set().union(*(lab.keys() for _, lab in classes)))
    lines = ["vertex_id\t" + "\t".join(name for name, _ in classes)]
    for v in ids:
        lines.append(v + "\t" + "\t".join(str(lab[v]) for _, lab in classes))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# statistics


@dataclass(frozen=True)
class StatsReport:
    """Outcome of comparing a graph's statistics with expected values.

    ``status`` is ``"ok"``, ``"mismatch"`` or ``"unchecked"``; mismatches
    are ``(field, expected, actual)`` triples.
    """

    actual: dict[str, int]
    status: str
    mismatches: tuple[tuple[str, int, int], ...] = ()


def validate_stats(g: WeightedGraph, expected: Mapping[str, int] | None) -> StatsReport:
    """Compare components, vertices and edges (isolated vertices ignored)."""
    actual = graph_stats(g)
    if not expected:
        return StatsReport(actual, "unchecked")
    bad = tuple(
        (key, int(expected[key]), actual[key])
        for key in ("components", "vertices", "edges")
        if key in expected and int(expected[key]) != actual[key]
    )
    return StatsReport(actual, "mismatch" if bad else "ok", bad)


# manifests


@dataclass(frozen=True)
class MatrixEntry:
    name: str
    path: Path
    format: str = "edgelist"
    ids: Path | None = None


@dataclass(frozen=True)
class DatasetManifest:
    matrices: tuple[MatrixEntry, ...]
    labels: Path
    expected_stats: dict[str, dict[str, int]] = field(default_factory=dict)
    integrate: tuple[str, ...] = ()
    threshold: float = 0.0

    def __post_init__(self):
        names = [m.name for m in self.matrices]
        if len(set(names)) != len(names):
            raise InputError("matrix names in manifest must be unique")
        if INTEGRATED in names and self.integrate:
            raise InputError(f"{INTEGRATED!r} is reserved for the integrated graph")


def read_manifest(path) -> DatasetManifest:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read manifest {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"manifest {path} is not valid JSON: {exc}") from None
    base = path.parent

    def resolve(p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else base / p

    try:
        matrices = tuple(
            MatrixEntry(
                str(m["name"]),
                resolve(m["path"]),
                str(m.get("format", "edgelist")),
                resolve(m["ids"]) if m.get("ids") else None,
            )
            for m in doc["matrices"]
        )
        labels = resolve(doc["labels"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"manifest {path} lacks required field {exc}") from None
    if not matrices:
        raise InputError(f"manifest {path} lists no matrices")
    integ = doc.get("integrate", False)
    if integ is True:
        integ = [m.name for m in matrices]
    elif not integ:
        integ = []
    return DatasetManifest(
        matrices,
        labels,
        {str(k): dict(v) for k, v in (doc.get("expected_stats") or {}).items()},
        tuple(str(x) for x in integ),
        float(doc.get("threshold", 0.0)),
    )


@dataclass(frozen=True)
class Dataset:
    graphs: tuple[tuple[str, WeightedGraph], ...]
    labels: tuple[tuple[str, dict[str, int]], ...]
    stats: dict[str, StatsReport]

    def graph(self, name: str) -> WeightedGraph:
        for n, g in self.graphs:
            if n == name:
                return g
        raise KeyError(name)


def _align(g: WeightedGraph, universe: Sequence[str]) -> WeightedGraph:
    """Re-index ``g`` onto ``universe``, adding absent vertices as isolated."""
    index = {v: i for i, v in enumerate(universe)}
    ids = g.vertex_ids
    return WeightedGraph(universe, ((index[ids[u]], index[ids[v]], w) for u, v, w in g.edges()))


def load_dataset(manifest: DatasetManifest | str | Path) -> Dataset:
    """Load every graph of a manifest onto one shared vertex universe.

    The universe is the label matrix's rows followed by any other graph
    vertices in order of first appearance; vertices outside the label matrix
    are unlabeled. Matrix files without an ``ids`` file take the label
    matrix's row order as their identifiers.
    """
    if not isinstance(manifest, DatasetManifest):
        manifest = read_manifest(manifest)
    label_ids, classes = read_label_matrix(manifest.labels)
    raw: list[tuple[str, WeightedGraph]] = []
    for m in manifest.matrices:
        if not m.path.exists():
            raise InputError(f"matrix file {m.path} does not exist")
        if m.format == "edgelist":
            g = read_edge_list(m.path)
            if manifest.threshold > 0:
                g = WeightedGraph(g.vertex_ids, ((u, v, w) for u, v, w in g.edges() if w > manifest.threshold))
        else:
            ids = read_ids(m.ids) if m.ids else list(label_ids)
            g = read_matrix(m.path, m.format, ids, manifest.threshold)
        raw.append((m.name, g))
    universe = dict.fromkeys(label_ids)
    for _, g in raw:
        universe.update(dict.fromkeys(g.vertex_ids))
    graphs = [(name, _align(g, list(universe))) for name, g in raw]
    if manifest.integrate:
        by_name = dict(graphs)
        missing = [n for n in manifest.integrate if n not in by_name]
        if missing:
            raise InputError(f"cannot integrate unknown graphs {missing}")
        graphs.append((INTEGRATED, integrate([by_name[n] for n in manifest.integrate])))
    stats = {name: validate_stats(g, manifest.expected_stats.get(name)) for name, g in graphs}
    return Dataset(tuple(graphs), tuple(classes), stats)


# synthetic data


@dataclass(frozen=True)
class SynthSpec:
    """Planted-partition graph with unit (or uniform random) weights.

    Vertices of block ``positive`` carry label 1, all others 0; a random
    ``label_fraction`` of the vertices is revealed. ``p_in == p_out`` gives a
    graph whose structure carries no label information.
    """

    sizes: tuple[int, ...] = (50, 50)
    p_in: float = 0.3
    p_out: float = 0.0
    weight_min: float = 1.0
    weight_max: float = 1.0
    label_fraction: float = 0.5
    seed: int = 0
    positive: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes or any(s < 1 for s in self.sizes):
            raise DomainError("every block needs at least one vertex")
        if not 0.0 <= self.p_out <= self.p_in <= 1.0:
            raise DomainError(f"need 0 <= p_out <= p_in <= 1, got p_in={self.p_in}, p_out={self.p_out}")
        if not 0.0 < self.weight_min <= self.weight_max:
            raise DomainError("need 0 < weight_min <= weight_max")
        if not 0.0 < self.label_fraction <= 1.0:
            raise DomainError("label fraction must lie in (0, 1]")
        if not 0 <= self.positive < len(self.sizes):
            raise DomainError(f"positive block {self.positive} does not exist")


def synth_planted(spec: SynthSpec) -> tuple[WeightedGraph, dict[str, int], dict[str, int]]:
    """Draw ``(graph, revealed labels, full ground truth)`` for ``spec``."""
    rng = np.random.default_rng(spec.seed)
    block = np.repeat(np.arange(len(spec.sizes)), spec.sizes)
    n = block.size
    width = len(str(n - 1))
    ids = [f"v{i:0{width}d}" for i in range(n)]
    iu, ju = np.triu_indices(n, k=1)
    prob = np.where(block[iu] == block[ju], spec.p_in, spec.p_out)
    hit = rng.random(iu.size) < prob
    if spec.weight_min == spec.weight_max:
        weights = np.full(int(hit.sum()), spec.weight_min)
    else:
        weights = rng.uniform(spec.weight_min, spec.weight_max, int(hit.sum()))
    g = WeightedGraph(ids, zip(iu[hit], ju[hit], weights))
    truth = {v: int(b == spec.positive) for v, b in zip(ids, block)}
    shown = rng.choice(n, size=max(1, round(spec.label_fraction * n)), replace=False)
    labels = {ids[i]: truth[ids[i]] for i in sorted(shown)}
    return g, labels, truth
