import json
import subprocess
import sys

import pytest

from paramod import matrix as mx
from paramod.cli import SCHEMA, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    doc = json.loads(out)
    assert doc["schema"] == SCHEMA
    return code, doc


def write_matrix(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return "@" + str(path)


def test_divisors_example(capsys):
    code, doc = run_json(capsys, "divisors", "--pol", "1,4,24", "--vector", "6,3,1,0,0,0", "--json")
    assert code == 0 and doc["D"] == [2, 3] and doc["product"] == 6


def test_member_example(capsys):
    code, doc = run_json(
        capsys, "member", "--pol", "1,2", "--group", "tilde-pol", "--matrix", "1,0,0,1;0,1,2,0;0,0,1,0;0,0,0,1"
    )
    assert code == 0 and doc["member"] is True


def test_member_rejects(capsys):
    code, doc = run_json(capsys, "member", "--pol", "1,2", "--group", "lev", "--matrix", "1,0,0,1;0,1,1,0;0,0,1,0;0,0,0,1")
    assert code == 0 and doc["member"] is False and doc["reason"]


def test_reps_count(capsys):
    code, doc = run_json(capsys, "reps", "--pol", "1,2", "--group", "tilde-pol", "--count-only")
    assert code == 0 and doc["count"] == 2 and "representatives" not in doc


def test_reps_level_list(capsys):
    code, doc = run_json(capsys, "reps", "--pol", "1,2", "--group", "tilde-pol-lev")
    assert doc["representatives"] == [[1, 0, 0, 0], [2, 0, 0, 1], [2, 1, 0, 0], [2, 1, 0, 1]]


def test_reps_plain_streams_lines(capsys):
    code, out, _ = run(capsys, "reps", "--pol", "1,4,24", "--group", "lev", "--plain", "--limit", "3")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 4 and lines[-1] == "count: 3"
    assert all(len(line.split(",")) == 6 for line in lines[:3])


def test_canon_and_round_trip(capsys, tmp_path):
    code, doc = run_json(capsys, "canon", "--pol", "1,2", "--vector", "0,1,0,0")
    assert code == 0 and doc["canonical"] == [2, 1, 0, 0]
    path = write_matrix(tmp_path, "w.json", doc["witness"])
    _, mem = run_json(capsys, "member", "--pol", "1,2", "--group", doc["witness"]["group"], "--matrix", path)
    assert mem["member"] is True
    _, app = run_json(capsys, "apply", "--vector", "0,1,0,0", "--matrix", path, "--expect", "2,1,0,0")
    assert app["matches"] is True and app["image"] == [2, 1, 0, 0]


def test_canon_line_mode(capsys):
    _, a = run_json(capsys, "canon", "--pol", "1,2,6", "--group", "lev", "--vector", "0,0,1,0,0,0", "--line")
    _, b = run_json(capsys, "canon", "--pol", "1,2,6", "--group", "lev", "--vector", "0,0,-1,0,0,0", "--line")
    assert a["canonical"] == b["canonical"]


def test_equiv(capsys, tmp_path):
    _, doc = run_json(capsys, "equiv", "--pol", "1,4,24", "--group", "lev", "--v", "1,2,3,4,5,6", "--w", "1,2,3,4,5,6")
    assert doc["equivalent"] is True
    _, doc = run_json(capsys, "equiv", "--pol", "1,2", "--v", "1,0,0,0", "--w", "2,1,0,0")
    assert doc == {"schema": SCHEMA, "equivalent": False, "v_canonical": [1, 1, 0, 0], "w_canonical": [2, 1, 0, 0]}


def test_reduce_gspace_round_trip(capsys, tmp_path):
    basis = "1,2,1,0,0,0;0,1,0,0,0,0;0,0,1,0,0,0"
    code, doc = run_json(capsys, "reduce-gspace", "--pol", "1,2,6", "--basis", basis)
    assert code == 0 and doc["verified"] is True
    b = mx.as_matrix(doc["basis"])
    u = mx.matrix_from_json(json.dumps(doc["unimodular"]))
    gamma = mx.matrix_from_json(json.dumps(doc["gamma"]))
    assert mx.matprod(u, b, gamma) == mx.identity(6)[:3]
    _, mem = run_json(capsys, "member", "--pol", "1,2,6", "--matrix", write_matrix(tmp_path, "g.json", doc["gamma"]))
    assert mem["member"] is True


def test_word_respects_seed_env(capsys, monkeypatch):
    monkeypatch.setenv("PARAMOD_SEED", "17")
    _, a = run_json(capsys, "word", "--pol", "1,2")
    _, b = run_json(capsys, "word", "--pol", "1,2", "--seed", "17")
    assert a["seed"] == 17 and a["element"] == b["element"]


def test_sample(capsys):
    _, doc = run_json(capsys, "sample", "--pol", "1,2", "--group", "lev", "--vector", "2,1,0,0", "--walks", "10")
    assert doc["consistent"] is True and [2, 1, 0, 0] in doc["visited"]


def test_oracle_cross_validate(capsys):
    _, doc = run_json(capsys, "oracle", "cross-validate", "--pol", "1,2", "--group", "lev", "--bound", "2")
    assert doc["classes"] == 4 and doc["agree"] is True


@pytest.mark.parametrize(
    "argv,kind",
    [
        (["divisors", "--pol", "1,2", "--vector", "2,0,0,0"], "not-primitive"),
        (["reduce-gspace", "--pol", "1,2", "--basis", "1,0,0,0;0,0,1,0"], "isotropy"),
        (["reduce-gspace", "--pol", "1,4", "--basis", "1,0,0,0;0,1,0,0"], "unsupported-polarization"),
        (["canon", "--pol", "1,2", "--group", "conj-pol", "--vector", "1,0,0,0"], "invalid-input"),
    ],
)
def test_domain_errors_exit_one(capsys, argv, kind):
    code, out, _ = run(capsys, *argv)
    doc = json.loads(out)
    assert code == 1 and doc["error"]["type"] == kind and doc["schema"] == SCHEMA


def test_isotropy_error_reports_pair(capsys):
    code, out, _ = run(capsys, "reduce-gspace", "--pol", "1,2", "--basis", "1,0,0,0;0,0,1,0")
    assert json.loads(out)["error"]["pair"] == [1, 2]


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["divisors", "--pol", "1,2"],
        ["divisors", "--pol", "1,3,4", "--vector", "1,0,0,0,0,0"],
        ["canon", "--pol", "1,2", "--vector", "1,0,0,0", "--group", "nope"],
        ["divisors", "--pol", "1,2", "--vector", "1,0,0,0", "--json", "--plain"],
        [],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "usage" in err


def test_plain_output(capsys):
    code, out, _ = run(capsys, "divisors", "--pol", "1,4,24", "--vector", "6,3,1,0,0,0", "--plain")
    assert code == 0 and "D: 2,3" in out and "product: 6" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "paramod", "reps", "--pol", "1,2,6", "--count-only"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["count"] == 4
