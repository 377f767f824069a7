import io
import json

import pytest

from degvrp.cli import main
from degvrp.instance_io import gen_reference, serialize_document, serialize_instance
from conftest import line_instance


@pytest.fixture(scope="module")
def ref_path(tmp_path_factory):
    p = tmp_path_factory.mktemp("inst") / "reference.json"
    p.write_text(serialize_document(gen_reference()))
    return p


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def test_validate_reference(ref_path):
    code, out, _ = run("validate", "--instance", ref_path)
    assert code == 0 and "8 nodes, 3 vehicles" in out


def test_gen_reference_to_file(tmp_path, ref_path):
    target = tmp_path / "r.json"
    assert run("gen-reference", "--output", target)[0] == 0
    assert target.read_text() == ref_path.read_text()


def test_base_and_quad_alpha0_agree(ref_path):
    a = json.loads(run("solve", "--instance", ref_path, "--variant", "base", "--alpha", "0", "--json")[1])
    b = json.loads(run("solve", "--instance", ref_path, "--variant", "quad", "--alpha", "0", "--json")[1])
    assert a["blocks"][0]["objective"] == b["blocks"][0]["objective"]
    assert a["blocks"][0]["cost_diff_percent"] == 0


def test_oracle_matches_solve(ref_path):
    args = ["--instance", ref_path, "--variant", "linear", "--alpha", "0.5", "--json"]
    c1, o1, _ = run("solve", *args)
    c2, o2, _ = run("oracle", *args)
    b1, b2 = json.loads(o1)["blocks"][0], json.loads(o2)["blocks"][0]
    assert c1 == c2 == 0
    assert b1["objective"] == b2["objective"] and b1["tours"] == b2["tours"]


def test_sweep_blocks(ref_path):
    code, out, _ = run("sweep", "--instance", ref_path, "--variant", "quad", "--alphas", "0,0.0625,4", "--json")
    doc = json.loads(out)
    assert code == 0 and len(doc["blocks"]) == 3
    spreads = [b["dod_spread"] for b in doc["blocks"]]
    assert spreads == sorted(spreads, reverse=True)
    first = doc["blocks"][0]
    assert first["cost_diff_percent"] == 0
    assert first["tours"][0][0] == "depot" and first["tours"][0][-1] == "depot"
    assert "indicative" in doc["cycles_note"]


def test_report_document_fields(ref_path):
    doc = json.loads(run("solve", "--instance", ref_path, "--json")[1])
    block = doc["blocks"][0]
    # document default objective is used when flags are omitted
    assert block["variant"] == "quad" and block["alpha"] == 0.125
    assert set(block) >= {
        "alpha", "variant", "cost_diff_percent", "soc_end", "dod", "worst_case_cycles",
        "tours", "objective", "proven_optimal",
    }
    for s, d in zip(block["soc_end"], block["dod"]):
        assert abs(s + d - 100) < 1e-9


def test_human_table(ref_path):
    code, out, _ = run("sweep", "--instance", ref_path, "--variant", "quad", "--alphas", "0,2")
    assert code == 0
    assert "Cost diff. [%]" in out and "DoD [%]" in out and "{71.0,19.0,32.0}" in out
    _, styled, _ = run("sweep", "--instance", ref_path, "--variant", "quad", "--alphas", "0,2", "--table1-style")
    cycles_row = next(line for line in styled.splitlines() if line.startswith("Cycles "))
    assert "<" in cycles_row


def test_node_limit_flag(ref_path):
    code, out, _ = run("solve", "--instance", ref_path, "--variant", "quad", "--alpha", "1", "--node-limit", "300", "--json")
    assert code == 0
    assert json.loads(out)["blocks"][0]["proven_optimal"] is False


def test_node_limit_without_incumbent(ref_path):
    code, _, err = run("solve", "--instance", ref_path, "--node-limit", "1")
    assert code == 1 and "node limit" in err


def test_infeasible_exit_2(tmp_path):
    p = tmp_path / "weak.json"
    p.write_text(serialize_instance(line_instance(3, soc=15.0)))
    code, _, err = run("solve", "--instance", p)
    assert code == 2 and "infeasible" in err


@pytest.mark.parametrize("content", ["{", '{"format_version": 1}', ""])
def test_bad_document_exit_3(tmp_path, content):
    p = tmp_path / "bad.json"
    p.write_text(content)
    assert run("validate", "--instance", p)[0] == 3


def test_missing_file_exit_3(tmp_path):
    assert run("validate", "--instance", tmp_path / "nope.json")[0] == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--bogus"],
        ["frobnicate"],
        [],
        ["solve", "--instance", "x", "--variant", "cubic"],
        ["sweep", "--instance", "x", "--alphas", "a,b"],
    ],
)
def test_usage_exit_64(argv):
    assert run(*argv)[0] == 64


def test_bad_alpha_values_exit_64(ref_path):
    assert run("sweep", "--instance", ref_path, "--alphas", "1,0.5")[0] == 64
    assert run("solve", "--instance", ref_path, "--alpha", "-1")[0] == 64
    assert run("solve", "--instance", ref_path, "--node-limit", "0")[0] == 64


def test_output_deterministic(ref_path):
    args = ("sweep", "--instance", ref_path, "--variant", "linear", "--alphas", "0,1", "--json")
    assert run(*args)[1] == run(*args)[1]
