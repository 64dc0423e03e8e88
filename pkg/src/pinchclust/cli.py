"""Command-line interface: ``pinchclust {cluster,predict,cv,synth,validate}``.

Exit status is 0 on success, 2 for unreadable or malformed input and 3 for
inputs that parse but violate a precondition (for example an empty label
set).
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys
from pathlib import Path

from . import __version__
from .datasets import (
    SynthSpec,
    format_edge_list,
    load_dataset,
    read_edge_list,
    read_labels,
    synth_planted,
    write_label_matrix,
    write_labels,
)
from .errors import DomainError, InputError
from .evaluation import run_experiment
from .semisup import BagConfig, bagged_predict, propagate
from .seeding import derive_seed
from .tilo import cluster_graph


EXIT_INPUT = 2
EXIT_DOMAIN = 3


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _bag_config(args) -> BagConfig:
    return BagConfig(args.bags, args.fraction, _seed(args))


def cmd_cluster(args) -> int:
    g = read_edge_list(args.graph)
    seed = _seed(args)
    ids = g.vertex_ids
    cluster_of = {}
    for c, members in enumerate(cluster_graph(g, seed)):
        for v in members:
            cluster_of[ids[v]] = c
    order = sorted(cluster_of)
    if args.format == "json":
        text = json.dumps({"seed": seed, "clusters": {v: cluster_of[v] for v in order}}, indent=2) + "\n"
    else:
        text = "".join(f"{v}\t{cluster_of[v]}\n" for v in order)
    _emit(text, args.out)
    return 0


def cmd_predict(args) -> int:
    g = read_edge_list(args.graph)
    labels = read_labels(args.labels)
    unknown = sorted(v for v in labels if not g.has_vertex(v))
    if unknown:
        raise InputError(f"labels name vertices not in the graph, e.g. {unknown[0]!r}")
    cfg = _bag_config(args)
    if args.unbagged:
        pred = propagate(g, labels, derive_seed(cfg.seed, 1))
    else:
        pred = bagged_predict(g, labels, cfg, workers=args.threads)
    isolated = g.isolated
    ids = g.vertex_ids
    keep = sorted(ids[i] for i in range(g.n) if not isolated[i] and ids[i] in pred.probs)
    if args.format == "json":
        doc = {"seed": cfg.seed, "predictions": {v: pred.probs[v] for v in keep},
               "runs": {v: pred.counts.get(v, 0) for v in keep}}
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = "".join(f"{v}\t{pred.probs[v]!r}\n" for v in keep)
    _emit(text, args.out)
    return 0


def cmd_cv(args) -> int:
    data = load_dataset(args.manifest)
    cfg = _bag_config(args)

    def progress(cname, gname, res):
        print(f"class {cname} graph {gname}: {res.mean:.3f}±{res.std:.3f}", file=sys.stderr)

    report = run_experiment(
        data.graphs, data.labels, k=args.folds, repeats=args.repeats, cfg=cfg,
        score_isolated=args.score_isolated, workers=args.threads, progress=progress,
    )
    if args.out:
        base = Path(args.out)
        base.with_suffix(".tsv").write_text(report.to_tsv(), encoding="utf-8")
        base.with_suffix(".json").write_text(report.to_json(), encoding="utf-8")
    else:
        sys.stdout.write(report.to_json() if args.format == "json" else report.to_tsv())
    return 0


def cmd_synth(args) -> int:
    try:
        sizes = tuple(int(s) for s in args.sizes.split(","))
    except ValueError:
        raise InputError(f"--sizes must be comma-separated integers, got {args.sizes!r}") from None
    try:
        spec = SynthSpec(sizes, args.p_in, args.p_out, args.wmin, args.wmax, args.label_fraction, _seed(args))
    except DomainError as exc:
        raise InputError(str(exc)) from None
    g, labels, truth = synth_planted(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "graph.tsv").write_text(format_edge_list(g), encoding="utf-8")
    write_labels(labels, out / "labels.tsv")
    write_labels(truth, out / "truth.tsv")
    write_label_matrix([("planted", labels)], out / "label_matrix.tsv")
    manifest = {
        "matrices": [{"name": "planted", "path": "graph.tsv", "format": "edgelist"}],
        "labels": "label_matrix.tsv",
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_validate(args) -> int:
    data = load_dataset(args.manifest)
    rows = []
    for name, rep in data.stats.items():
        rows.append({"graph": name, "status": rep.status, **rep.actual,
                     "mismatches": [{"field": f, "expected": e, "actual": a} for f, e, a in rep.mismatches]})
    if args.format == "json":
        doc = {"graphs": rows, "classes": [c for c, _ in data.labels]}
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = ["graph\tcomponents\tvertices\tedges\tstatus"]
        for r in rows:
            detail = "".join(f" {m['field']}:expected={m['expected']}" for m in r["mismatches"])
            lines.append(f"{r['graph']}\t{r['components']}\t{r['vertices']}\t{r['edges']}\t{r['status']}{detail}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pinchclust", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, bagging=False):
        p.add_argument("--seed", type=int, default=None, help="master seed (drawn and printed if omitted)")
        p.add_argument("--format", choices=("tsv", "json"), default="tsv")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        if bagging:
            p.add_argument("--bags", type=int, default=25, help="bagging runs N")
            p.add_argument("--lambda", dest="fraction", type=float, default=0.5,
                           help="fraction of unlabeled vertices per bag")
            p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("cluster", help="cluster a graph")
    p.add_argument("graph")
    common(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("predict", help="predict labels of unlabeled vertices")
    p.add_argument("graph")
    p.add_argument("labels")
    common(p, bagging=True)
    p.add_argument("--unbagged", action="store_true",
                   help="single propagation over the whole graph with seed derived from (seed, 1)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("cv", help="cross-validate every class on every graph of a manifest")
    p.add_argument("manifest")
    common(p, bagging=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--score-isolated", action="store_true",
                   help="score isolated test vertices instead of excluding them")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("synth", help="write a planted-partition dataset")
    p.add_argument("--sizes", default="50,50", help="comma-separated block sizes")
    p.add_argument("--p-in", type=float, default=0.3)
    p.add_argument("--p-out", type=float, default=0.0)
    p.add_argument("--wmin", type=float, default=1.0)
    p.add_argument("--wmax", type=float, default=1.0)
    p.add_argument("--label-fraction", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("validate", help="check graph statistics of a manifest")
    p.add_argument("manifest")
    common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
