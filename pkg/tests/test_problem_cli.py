import json
import math
from fractions import Fraction

import jsonschema
import numpy as np
import pytest

from cocyclelab.cli import REPORT_SCHEMA, dumps, execute, jsonable, main
from cocyclelab.errors import SchemaError
from cocyclelab.problem import parse_problem


def minimal_doc():
    return {
        "groups": {"Z": {"family": "free", "rank": 1, "generators": ["a"]}},
        "representations": {"triv": {"group": "Z", "trivial": True, "dim": 1}},
        "tasks": [{"id": "h", "type": "h1", "rep": "triv"}],
    }


def zxz_doc(images):
    return {
        "groups": {"A": {"family": "free_abelian", "rank": 1, "generators": ["a"]},
                   "B": {"family": "free_abelian", "rank": 1, "generators": ["b"]},
                   "G": {"family": "product", "factors": ["A", "B"]}},
        "measures": {"m1": {"group": "A", "atoms": {"a": "1/2", "a^-1": "1/2"}},
                     "m2": {"group": "B", "atoms": {"b": 1}}},
        "representations": {"rho": {"group": "G", "images": images}},
        "tasks": [{"id": "iso", "type": "product-iso", "group": "G", "rep": "rho", "mu1": "m1", "mu2": "m2"}],
    }


ROT = [[[-0.5, -math.sqrt(3) / 2], [math.sqrt(3) / 2, -0.5]], [[1, 0], [0, 1]]]


def write(tmp_path, doc, name="doc.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_minimal_document_parses_and_runs():
    prob = parse_problem(minimal_doc())
    assert len(prob.tasks) == 1
    rep = execute(minimal_doc())
    jsonschema.validate(rep, REPORT_SCHEMA)
    assert rep["exit_code"] == 0
    r = rep["tasks"][0]["result"]
    assert (r["dim_Z"], r["dim_B"], r["dim_H"]) == (1, 0, 1)


def test_measure_weights_must_sum_to_one():
    doc = minimal_doc()
    doc["measures"] = {"bad": {"group": "Z", "atoms": {"a": 0.5, "a^-1": 0.4}}}
    with pytest.raises(SchemaError) as ei:
        parse_problem(doc)
    assert any(p == "$.measures.bad" for p, _ in ei.value.errors)


def test_unknown_reference_is_named():
    doc = minimal_doc()
    doc["tasks"][0]["rep"] = "nosuch"
    with pytest.raises(SchemaError) as ei:
        parse_problem(doc)
    assert "nosuch" in str(ei.value)
    rep = execute(doc)
    assert rep["exit_code"] == 2 and rep["errors"]


def test_schema_violation_path():
    doc = minimal_doc()
    doc["tasks"][0]["degree"] = 7
    with pytest.raises(SchemaError) as ei:
        parse_problem(doc)
    assert ei.value.errors[0][0] == "$.tasks[0].degree"


def test_product_rotation_through_cli(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["run", write(tmp_path, zxz_doc(ROT)), "--json", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    r = rep["tasks"][0]["result"]
    assert (r["dim_H_G"], r["dim_H_G1_VG2"], r["dim_H_G2_VG1"]) == (0, 0, 0)
    assert r["hypotheses"]["markov_norm"] == pytest.approx(0.5)
    assert "PASS" in capsys.readouterr().out


def test_trivial_rep_fails_product_hypothesis(tmp_path, capsys):
    code = main(["run", write(tmp_path, zxz_doc([[[1]], [[1]]])), "--json", "-"])
    assert code == 1
    rep = json.loads(capsys.readouterr().out)
    t = rep["tasks"][0]
    assert t["outcome"] == "fail" and t["error"]["kind"] == "HypothesisFailed"
    # forcing the gate open still cannot build the harmonic projection
    assert main(["run", write(tmp_path, zxz_doc([[[1]], [[1]]])), "--force", "--json", "-"]) == 1
    t = json.loads(capsys.readouterr().out)["tasks"][0]
    assert t["error"]["kind"] == "NormPreconditionFailed"


def test_empty_task_list(tmp_path, capsys):
    doc = minimal_doc()
    doc["tasks"] = []
    assert main(["run", write(tmp_path, doc)]) == 0
    assert "0 passed" in capsys.readouterr().out


def test_validate_command(tmp_path, capsys):
    assert main(["validate", write(tmp_path, minimal_doc())]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["validate", str(bad)]) == 2
    assert main(["run", str(bad)]) == 2


def test_explain_and_schema(capsys):
    assert main(["explain", "product-iso"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("product-iso:") and "hypothesis:" in text
    assert main(["explain", "no-such-task"]) == 2
    assert main(["schema", "problem"]) == 0
    schema = json.loads(capsys.readouterr().out)
    assert "tasks" in schema["properties"]
    assert main(["schema", "report"]) == 0
    assert json.loads(capsys.readouterr().out)["properties"]["format"]


def test_fail_fast_skips_remaining(tmp_path, capsys):
    doc = zxz_doc([[[1]], [[1]]])
    doc["tasks"].append({"id": "later", "type": "validate-rep", "rep": "rho"})
    assert main(["run", write(tmp_path, doc), "--fail-fast", "--json", "-"]) == 1
    rep = json.loads(capsys.readouterr().out)
    assert [t["outcome"] for t in rep["tasks"]] == ["fail", "skipped"]
    assert rep["summary"]["skipped"] == 1


def test_jobs_give_identical_reports():
    doc = zxz_doc(ROT)
    doc["tasks"] += [{"id": f"v{i}", "type": "validate-rep", "rep": "rho"} for i in range(5)]
    assert dumps(execute(doc, jobs=1)) == dumps(execute(doc, jobs=2))


def test_jsonable():
    assert jsonable(Fraction(3, 4)) == "3/4"
    assert jsonable(float("nan")) == "nan" and jsonable(float("-inf")) == "-inf"
    assert jsonable(np.array([Fraction(1, 2), Fraction(2)], dtype=object)) == ["1/2", "2"]
    assert jsonable(np.zeros(20), elide=10) == {"elided": True, "shape": [20]}
    assert jsonable({1: np.bool_(True), "x": np.int64(3)}) == {"1": True, "x": 3}
