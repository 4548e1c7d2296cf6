import json
import re

import pytest

from minmin.cli import export_dot, run_command
from minmin.lattice import all_ideals
from minmin.poset import enumerate_classes


def run(capsys, *argv):
    code = run_command(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def dot_counts(text):
    nodes = len(re.findall(r"^\s*n\d+ \[label=", text, re.M))
    edges = len(re.findall(r"->", text))
    return nodes, edges


def test_member_shortcut(capsys):
    assert run(capsys, "member", "--theta", "id", "--k", "2", "--fn", "3:e8")[:2] == (0, "true\n")
    assert run(capsys, "member", "--theta", "id", "--k", "3", "--fn", "mu")[1] == "false\n"


def test_ideal_count_k3(capsys):
    assert run(capsys, "ideals", "count", "--k", "3")[:2] == (0, "2854\n")


def test_poset_dot_k2(capsys):
    code, out, _ = run(capsys, "poset", "build", "--k", "2", "--format", "dot")
    assert code == 0
    assert dot_counts(out) == (8, 10)


def test_export_dot_shapes():
    assert dot_counts(export_dot(enumerate_classes(1))) == (4, 3)
    assert dot_counts(export_dot(all_ideals(enumerate_classes(1))))[0] == 6
    empty = export_dot([])
    assert empty.startswith("digraph") and dot_counts(empty) == (0, 0)


def test_output_is_deterministic(capsys):
    a = run(capsys, "clonoids", "covers", "--k", "2", "--format", "json")[1]
    b = run(capsys, "clonoids", "covers", "--k", "2", "--format", "json")[1]
    assert a == b
    data = json.loads(a)
    assert data["count"] == 63
    vako = [c for c in data["clonoids"] if c["names"] == ["Vako"]][0]
    assert vako["lowerCovers"] == ["Empty"]


def test_closed_ideals_json(capsys):
    code, out, _ = run(capsys, "ideals", "closed", "--k", "2", "--C", "R", "--format", "json")
    assert code == 0 and json.loads(out)["count"] == 4


def test_fn_commands(capsys):
    assert run(capsys, "fn", "eval", "mu", "110")[1] == "1\n"
    assert run(capsys, "fn", "minor", "and", "--sigma", "1,1", "--n", "1")[1] == "1:2\n"
    assert run(capsys, "fn", "compose", "and", "id,neg")[1] == "1:0\n"
    assert run(capsys, "fn", "closure", "0", "--C", "XI")[1] == "1:2\n"


def test_semibisect_commands(capsys):
    assert run(capsys, "semibisect", "check", "--fn", "plus", "--G", "id")[1] == "false\n"
    code, out, _ = run(capsys, "semibisect", "decompose", "--fn", "mu", "--G", "id", "--format", "json")
    assert code == 0 and json.loads(out)["outer"] == "3:e8"
    assert run(capsys, "semibisect", "decompose", "--fn", "plus", "--G", "id")[0] == 1


def test_stability_commands(capsys):
    code, out, _ = run(capsys, "stability", "left", "--class", "U2", "--preset", "Mi", "--format", "json")
    assert code == 0 and json.loads(out)["verdict"] == "fail"
    assert run(capsys, "stability", "right", "--class", "OX", "--preset", "OX")[1] == "pass\n"
    assert run(capsys, "stability", "theta-right", "--theta", "id", "--generators", "neg")[1].startswith("fail")


@pytest.mark.parametrize("argv,code", [
    (["bogus"], 2),
    (["fn", "eval", "3:zz", "1"], 2),
    (["poset", "build", "--k", "4"], 2),
    (["stability", "left", "--class", "U2", "--preset", "nope"], 2),
    (["stability", "left", "--class", "U2", "--preset", "U2", "--arity-cap", "5"], 2),
    (["member", "--theta", "mu", "--k", "2", "--fn", "id"], 2),
    (["member", "--theta", "0", "--meet", "OICO", "--fn", "id"], 1),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("MINMIN_OUTPUT_DIR", str(tmp_path))
    assert run(capsys, "poset", "build", "--k", "1", "--format", "json", "-o", "p1.json")[:2] == (0, "")
    data = json.loads((tmp_path / "p1.json").read_text())
    assert len(data["elements"]) == 4
