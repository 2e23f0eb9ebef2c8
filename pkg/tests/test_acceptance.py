"""Acceptance suite: one test per criterion, all read from CLI runs of the seeded corpus.

The corpus is written with ``cocyclelab corpus`` and run twice through
``cocyclelab run`` in fresh interpreters (different hash seeds, serial and
parallel).  Every criterion prints a ``criterion N: PASS|FAIL`` line.
"""
import contextlib
import json
import os
import subprocess
import sys
import time

import pytest

TOL_RESIDUAL = 1e-9     # ergodic projection residual
TOL_COMPRESS = 1e-8     # float compression residual, scaled by 1 + ||b||
TOL_STATE = 1e-10       # flip stationary state


def _cli(*args, env=None):
    return subprocess.run([sys.executable, "-m", "cocyclelab.cli", *args], capture_output=True, text=True,
                          env=env, check=False)


@pytest.fixture(scope="module")
def corpus_run(tmp_path_factory):
    d = tmp_path_factory.mktemp("acceptance")
    doc = d / "corpus.json"
    assert _cli("corpus", str(doc)).returncode == 0
    reports, codes = [], []
    t0 = time.perf_counter()
    for seed, jobs in (("1", "1"), ("4242", "4")):
        out = d / f"report-{jobs}.json"
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = _cli("run", str(doc), "--json", str(out), "--jobs", jobs, env=env)
        codes.append(proc.returncode)
        reports.append(out.read_bytes())
    elapsed = time.perf_counter() - t0
    report = json.loads(reports[0])
    by_id = {t["id"]: t for t in report["tasks"]}
    return {"document": json.loads(doc.read_text()), "report": report, "by_id": by_id, "raw": reports,
            "codes": codes, "elapsed": elapsed}


@contextlib.contextmanager
def criterion(n, capsys):
    ok = False
    try:
        yield
        ok = True
    finally:
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}")


def tasks(run, prefix, type_=None):
    return [t for i, t in run["by_id"].items() if i.startswith(prefix) and (type_ is None or t["type"] == type_)]


def results(run, prefix, type_=None):
    ts = tasks(run, prefix, type_)
    bad = [t["id"] for t in ts if t["outcome"] != "pass"]
    assert not bad, f"non-passing tasks: {bad[:5]}"
    return [t["result"] for t in ts]


def _family(run, task_id):
    doc = run["document"]
    task = next(t for t in doc["tasks"] if t.get("id") == task_id)
    return doc["groups"][doc["representations"][task["rep"]]["group"]]["family"]


def test_criterion_1_ergodic_projection(corpus_run, capsys):
    with criterion(1, capsys):
        ts = tasks(corpus_run, "proj-", "cesaro")
        assert len(ts) == 200
        families = {_family(corpus_run, t["id"]) for t in ts}
        assert {"free_abelian", "free", "heisenberg3"} <= families
        assert families & {"permutation", "cyclic", "finite_table"}
        rs = results(corpus_run, "proj-", "cesaro")
        for t, r in zip(ts, rs):
            assert all(r["checks"][k] for k in ("absorbs_markov", "idempotent", "image_is_fixed",
                                                "kernel_is_image")), t["id"]
            assert r["residual"] < TOL_RESIDUAL, t["id"]
            if r["method"] == "exact-splitting":
                assert r["residual"] == 0 and r["checks"]["residual"] == 0, t["id"]
        assert sum(r["method"] == "exact-splitting" for r in rs) >= 50


def test_criterion_2_weak_unique_stationarity(corpus_run, capsys):
    with criterion(2, capsys):
        rs = results(corpus_run, "wus-", "stationary-decomposition")
        assert len(rs) == 200
        disagreements = [r for r in rs if not r["agree"]
                         or r["direct"] != r["pairing"]["weakly_uniquely_stationary"]]
        assert not disagreements


def test_criterion_3_harmonic_decomposition(corpus_run, capsys):
    with criterion(3, capsys):
        rs = results(corpus_run, "harm-", "harmonic")
        assert len(rs) >= 20
        for r in rs:
            assert r["markov_norm"] < 1
            assert r["dim_Z"] == r["dim_B"] + r["dim_H_mu"]
        s = corpus_run["by_id"]["harm-sign"]["result"]
        assert (s["dim_Z"], s["dim_B"], s["dim_H_mu"]) == (2, 1, 1)


def test_criterion_4_compression(corpus_run, capsys):
    with criterion(4, capsys):
        rs = results(corpus_run, "comp-", "compress")
        assert len(rs) >= 50
        for r in rs:
            assert r["degree"] == 1 and r["membership"] == "coboundary" and r["primitive"] is not None
            bound = 0.0 if r["scalars"] == "rational" else TOL_COMPRESS * (1 + r["cocycle_norm"])
            assert r["residual"] <= bound and r["relator_residual"] <= bound
        assert any(r["scalars"] == "float" for r in rs) and any(r["scalars"] == "rational" for r in rs)
        deg2 = results(corpus_run, "comp2-", "compress")
        assert len(deg2) >= 10
        assert all(r["degree"] == 2 and r["passed"] == r["dim_Z2"] for r in deg2)


def test_criterion_5_finite_group_vanishing(corpus_run, capsys):
    with criterion(5, capsys):
        h1s = results(corpus_run, "fin-h1-", "h1")
        assert h1s and all(r["dim_H"] == 0 for r in h1s)
        hns = results(corpus_run, "fin-hn-", "hn")
        assert hns
        for r in hns:
            assert r["dim_H"] == 0
            assert (r["dim_Z"], r["dim_B"], r["dim_H"]) == tuple(r["relator_method"][k]
                                                                 for k in ("dim_Z", "dim_B", "dim_H"))
        mems = results(corpus_run, "fin-mem-", "membership")
        assert mems
        for r in mems:
            assert r["status"] == "coboundary" and r["averaging"]["agrees"]


def test_criterion_6_product_theorem(corpus_run, capsys):
    with criterion(6, capsys):
        rot = corpus_run["by_id"]["prod-rot-iso"]
        assert rot["outcome"] == "pass"
        r = rot["result"]
        assert r["hypotheses"]["markov_norm"] == pytest.approx(0.5, abs=1e-12)
        assert all(r["hypotheses"][k] for k in ("markov_norm_lt_1", "Vmu1_eq_VG1", "Vmu2_eq_VG2"))
        assert (r["dim_H_G"], r["dim_H_G1_VG2"], r["dim_H_G2_VG1"]) == (0, 0, 0)
        isos = [t for t in tasks(corpus_run, "prod-", "product-iso") if t["id"] != "prod-rot-iso"]
        assert len(isos) >= 10
        for t in isos:
            assert t["outcome"] == "pass", t["id"]
            assert t["result"]["forward_inverse"] and t["result"]["inverse_forward"]
            assert t["result"]["dim_H_G"] == t["result"]["dim_H_G1_VG2"] + t["result"]["dim_H_G2_VG1"]
        assert any(t["result"]["dim_H_G"] > 0 for t in isos)
        embeds = results(corpus_run, "prod-", "product-embed")
        assert len(embeds) == len(isos) + 1
        assert all(r["kappa"] > 0 and r["injective"] for r in embeds)


def test_criterion_7_nilpotent_reduction(corpus_run, capsys):
    with criterion(7, capsys):
        rs = results(corpus_run, "nil-", "nilpotent-reduce")
        assert rs
        for r in rs:
            assert r["dim_H_G"] == r["dim_H_ab"]
            assert r["W_coboundaries"]
            assert r["center_restriction"]["pass"] and r["center_restriction"]["failures"] == 0
        assert any(r["dim_W"] > 0 for r in rs)


def test_criterion_8_induction(corpus_run, capsys):
    with criterion(8, capsys):
        f2 = corpus_run["by_id"]["ind-f2-check"]
        assert f2["outcome"] == "pass"
        r = f2["result"]
        assert r["index"] == 2 and r["dim_H_subgroup"] == 3 == r["dim_H_induced"]
        for t in tasks(corpus_run, "ind-", "induction-check") + tasks(corpus_run, "ind-", "transversal"):
            assert t["outcome"] == "pass", t["id"]
            assert t["result"]["chi_law"] == {"failures": 0, "triples": 1000}
        stages = corpus_run["by_id"]["ind-stages-z"]
        assert stages["outcome"] == "pass"
        s = stages["result"]
        assert (s["outer_index"], s["inner_index"]) == (2, 2)
        assert s["composite_equal"] and s["fresh_transversal_equivalent"]


def test_criterion_9_liouville_and_stationarity(corpus_run, capsys):
    with criterion(9, capsys):
        hs = results(corpus_run, "liou-harm-", "harmonic-space")
        assert hs and all(r["dim"] == r["coset_count"] for r in hs)
        assert all(r["liouville"] for r in results(corpus_run, "liou-check-", "liouville"))
        flip = corpus_run["by_id"]["liou-flip"]
        assert flip["outcome"] == "pass"
        r = flip["result"]
        assert r["unique"] and r["affine_dim"] == 0
        assert all(abs(x - 0.5) <= TOL_STATE for x in r["point"]) and len(r["point"]) == 2
        assert r["equivalence"]["pass"] and r["equivalence"]["clause"] == "equivalence"


def test_criterion_10_determinism(corpus_run, capsys):
    with criterion(10, capsys):
        assert corpus_run["codes"] == [0, 0]
        a, b = corpus_run["raw"]
        assert a == b
        assert corpus_run["report"]["summary"]["fail"] == corpus_run["report"]["summary"]["error"] == 0
        assert corpus_run["elapsed"] < 300
