import json
import math
import random
import warnings

import pytest

import oracles
from pinchclust import (
    BagConfig,
    DegenerateFoldError,
    DomainError,
    EvaluationError,
    cross_validate,
    make_folds,
    roc_auc,
    run_experiment,
)
from pinchclust.datasets import SynthSpec, synth_planted
from pinchclust.evaluation import FoldPlan, RocResult
from pinchclust.seeding import derive_seed


def _auc(pos, neg):
    scores = {f"p{i}": s for i, s in enumerate(pos)} | {f"n{i}": s for i, s in enumerate(neg)}
    truth = {f"p{i}": 1 for i in range(len(pos))} | {f"n{i}": 0 for i in range(len(neg))}
    return roc_auc(scores, truth)


def test_roc_examples():
    assert _auc([0.9, 0.8], [0.1, 0.2]) == 1.0
    assert _auc([0.4, 0.4], [0.4]) == 0.5
    assert _auc([0.7, 0.3], [0.5]) == 0.5


def test_roc_degenerate():
    with pytest.raises(DegenerateFoldError):
        _auc([0.1, 0.2], [])
    with pytest.raises(DegenerateFoldError):
        _auc([], [0.3])


def test_roc_matches_pair_counting():
    rng = random.Random(0)
    for _ in range(300):
        pos = [rng.randint(0, 5) / 5 for _ in range(rng.randint(1, 20))]
        neg = [rng.randint(0, 5) / 5 for _ in range(rng.randint(1, 20))]
        assert _auc(pos, neg) == float(oracles.auc_pairs(pos, neg))


def test_roc_negation_and_monotone_invariance():
    rng = random.Random(1)
    for _ in range(100):
        pos = [rng.random() for _ in range(rng.randint(1, 15))]
        neg = [rng.random() for _ in range(rng.randint(1, 15))]
        a = _auc(pos, neg)
        assert a + _auc([-x for x in pos], [-x for x in neg]) == pytest.approx(1.0)
        assert _auc([math.exp(3 * x) for x in pos], [math.exp(3 * x) for x in neg]) == a


def test_folds_stratified_example():
    labels = {f"p{i}": 1 for i in range(5)} | {f"n{i}": 0 for i in range(5)}
    plan = make_folds(labels, 5, 1, seed=3)
    for fold in plan.folds(0):
        assert sorted(labels[v] for v in fold) == [0, 1]
    assert plan == make_folds(labels, 5, 1, seed=3)


def test_folds_sizes_and_partition():
    labels = {f"v{i}": int(i < 3) for i in range(8)}
    plan = make_folds(labels, 2, 3, seed=0)
    assert plan.stratified
    for r in range(3):
        folds = plan.folds(r)
        assert sorted(len(f) for f in folds) == [4, 4]
        assert sorted(v for f in folds for v in f) == sorted(labels)


def test_folds_balance_random():
    rng = random.Random(7)
    for t in range(50):
        n = rng.randint(10, 60)
        labels = {f"v{i}": int(rng.random() < 0.3) for i in range(n)}
        k = rng.randint(2, 5)
        if min(sum(labels.values()), n - sum(labels.values())) < k:
            continue
        plan = make_folds(labels, k, 2, t)
        for r in range(2):
            folds = plan.folds(r)
            sizes = [len(f) for f in folds]
            pos = [sum(labels[v] for v in f) for f in folds]
            assert max(sizes) - min(sizes) <= 1
            assert max(pos) - min(pos) <= 1


def test_folds_unstratified_warning_and_errors():
    labels = {"a": 1, "b": 0, "c": 0, "d": 0, "e": 0}
    with pytest.warns(UserWarning):
        plan = make_folds(labels, 3, 1, 0)
    assert not plan.stratified
    with pytest.raises(DomainError):
        make_folds(labels, 1, 1, 0)
    with pytest.raises(DomainError):
        make_folds(labels, 6, 1, 0)


def test_roc_result_statistics():
    res = RocResult(((0, 0, 0.8), (0, 1, 1.0), (1, 0, 0.6), (1, 1, 0.8)))
    assert res.mean == pytest.approx(0.8)
    assert res.std == pytest.approx(math.sqrt(0.08 / 3))
    assert res.repeat_means == pytest.approx([0.9, 0.7])
    assert res.repeat_std == pytest.approx(math.sqrt(0.02))
    assert math.isnan(RocResult(((0, 0, 0.5),)).std)


def test_cross_validate_planted_two_blocks():
    g, labels, _ = synth_planted(SynthSpec((50, 50), 0.3, 0.0, label_fraction=0.5, seed=0))
    plan = make_folds(labels, 5, 3, seed=1)
    res = cross_validate(g, labels, plan, BagConfig(5, 0.5, 2))
    assert len(res.fold_scores) + len(res.skipped) == 15
    assert res.mean >= 0.9
    assert res == cross_validate(g, labels, plan, BagConfig(5, 0.5, 2))


def test_cross_validate_skips_isolated_test_vertices():
    from pinchclust import WeightedGraph

    # positive 4-clique, negative 8-clique, two isolated positives; the
    # majority label is 0, so scoring the isolated positives costs AUC
    ids = [f"a{i}" for i in range(4)] + [f"b{i}" for i in range(8)] + ["i0", "i1"]
    edges = [(i, j, 1) for i in range(4) for j in range(i + 1, 4)]
    edges += [(i, j, 1) for i in range(4, 12) for j in range(i + 1, 12)]
    g = WeightedGraph(ids, edges)
    labels = {v: int(v[0] != "b") for v in ids}
    plan = make_folds(labels, 2, 1, seed=0)
    base = cross_validate(g, labels, plan, BagConfig(2, 1.0, 0))
    with_iso = cross_validate(g, labels, plan, BagConfig(2, 1.0, 0), score_isolated=True)
    assert base.mean == 1.0
    assert with_iso.mean < 1.0


def test_cross_validate_all_degenerate():
    g, labels, _ = synth_planted(SynthSpec((4, 4), 0.9, 0.1, label_fraction=1.0, seed=0))
    one_class = {v: 0 for v in labels}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        plan = make_folds(one_class, 2, 1, 0)
    with pytest.raises(EvaluationError):
        cross_validate(g, one_class, plan, BagConfig(1, 1.0, 0))


def test_run_experiment_matches_cross_validate():
    g, labels, _ = synth_planted(SynthSpec((15, 15), 0.4, 0.02, label_fraction=0.6, seed=5))
    cfg = BagConfig(3, 0.5, 11)
    report = run_experiment([("g", g)], [("c", labels)], k=3, repeats=2, cfg=cfg)
    assert len(report) == 1
    plan = make_folds(labels, 3, 2, derive_seed(11, 0))
    direct = cross_validate(g, labels, plan, BagConfig(3, 0.5, derive_seed(11, 0, 1)))
    assert report.cells["c", "g"] == direct


def test_report_formats():
    res = RocResult(((0, 0, 0.9), (0, 1, 0.95)))
    other = RocResult(((0, 0, 0.5), (0, 1, 0.7), (1, 0, 0.6)), skipped=((1, 1, "single class"),))
    from pinchclust.evaluation import ExperimentReport

    rep = ExperimentReport(("c1", "c2"), ("W1",), {("c1", "W1"): res, ("c2", "W1"): other})
    assert rep.to_tsv() == "class\tW1\nc1\t0.925±0.035\nc2\t0.600±0.100\n"
    doc = json.loads(rep.to_json())
    cell = doc["cells"][1]
    assert [f["auc"] for f in cell["fold_scores"]] == [0.5, 0.7, 0.6]
    assert cell["skipped"] == [{"repeat": 1, "fold": 1, "reason": "single class"}]
    assert cell["std_repeats"] == 0.0  # both repeat means are 0.6


def test_report_grid_shape():
    g, labels, _ = synth_planted(SynthSpec((8, 8), 0.6, 0.05, label_fraction=1.0, seed=1))
    h = g.scaled(2.0)
    classes = [(f"class{i}", labels) for i in range(3)]
    rep = run_experiment({"a": g, "b": h}, classes, k=2, repeats=1, cfg=BagConfig(1, 1.0, 0))
    assert len(rep) == 6
    assert len(rep.to_tsv().splitlines()) == 4
