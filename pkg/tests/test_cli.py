import csv
import io
import json
import subprocess
import sys

import pytest

from dsgame.cli import REPORT_KEYS, main
from dsgame.game import parse_game


@pytest.fixture
def g1_file(tmp_path, g1_text):
    p = tmp_path / "g1.game"
    p.write_text(g1_text)
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_optimize(capsys, g1_file):
    code, out, _ = run(capsys, "optimize", g1_file)
    assert code == 0
    assert "W = 2/1" in out
    assert "iterations = 11" in out and "k_max = 11" in out


def test_optimize_json_and_rational_discount(capsys, g1_file, tmp_path):
    code, out, _ = run(capsys, "optimize", g1_file, "--json")
    rep = json.loads(out)
    assert tuple(rep) == REPORT_KEYS
    assert rep["W"] == "2/1" and rep["method"] == "VI_OPT"
    p = tmp_path / "g1b.game"
    p.write_text(g1_file.read_text().replace("discount 2 1", "discount 3 2"))
    code, out, _ = run(capsys, "optimize", p)
    assert code == 0 and "W = 3/1" in out


def test_input_errors(capsys, tmp_path, g1_text):
    code, _, err = run(capsys, "optimize", tmp_path / "missing.game")
    assert code == 3 and "cannot read" in err
    p = tmp_path / "bad.game"
    p.write_text(g1_text.replace("edge 1 0 0\nedge 1 1 -1\n", ""))
    code, _, err = run(capsys, "optimize", p)
    assert code == 3 and "state 1 has no outgoing edge" in err


def test_usage_errors(capsys, g1_file):
    assert run(capsys, "optimize")[0] == 2
    assert run(capsys, "satisfice", g1_file, "--threshold", "1.5", "--relation", "leq", "--player", "min")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_satisfice(capsys, g1_file, tmp_path):
    code, out, _ = run(capsys, "satisfice", g1_file, "--threshold", "3", "--relation", "geq",
                       "--player", "max", "--method", "comparator")
    assert code == 0 and out.splitlines()[0] == "NO"
    code, out, _ = run(capsys, "satisfice", g1_file, "--threshold", "5/2", "--relation", "leq",
                       "--player", "min", "--method", "vi")
    assert out.splitlines()[0] == "YES" and "decided_by = interval_exit" in out
    strat = tmp_path / "s.txt"
    code, out, _ = run(capsys, "satisfice", g1_file, "--threshold", "5/2", "--relation", "leq",
                       "--player", "min", "--strategy-out", strat)
    assert out.startswith("YES")
    assert all(l.startswith("move ") for l in strat.read_text().splitlines())


def test_satisfice_json_keys_stable(capsys, g1_file):
    keys = set()
    for method in ("vi", "comparator"):
        _, out, _ = run(capsys, "satisfice", g1_file, "--threshold", "2", "--relation", "lt",
                        "--player", "min", "--method", method, "--json")
        rep = json.loads(out)
        assert rep["answer"] == "NO"
        keys.add(tuple(rep))
    assert keys == {REPORT_KEYS}


def test_comparator_rejects_rational_discount(capsys, g1_file, tmp_path):
    p = tmp_path / "g1b.game"
    p.write_text(g1_file.read_text().replace("discount 2 1", "discount 3 2"))
    code, _, err = run(capsys, "satisfice", p, "--threshold", "1", "--relation", "leq",
                       "--player", "min", "--method", "comparator")
    assert code == 4 and "--method vi" in err
    code, _, _ = run(capsys, "comparator", "--mu", 1, "--discount", "3/2", "--threshold", 0, "--relation", "leq")
    assert code == 4


def test_comparator_command(capsys, tmp_path):
    dump = tmp_path / "c.txt"
    code, out, _ = run(capsys, "comparator", "--mu", 1, "--discount", 2, "--threshold", 0,
                       "--relation", "leq", "--dump", dump)
    assert code == 0 and "states = 4" in out
    assert dump.read_text().startswith("comparator mu=1 d=2 rel=leq v=0/1 kind=safety\n")
    _, out, _ = run(capsys, "comparator", "--mu", 5, "--discount", 2, "--threshold", "1/3",
                    "--relation", "leq", "--json")
    rep = json.loads(out)
    assert rep["comparator_states"] <= int(rep["size_bound"].split("/")[0])
    _, out, _ = run(capsys, "comparator", "--mu", 1, "--discount", 2, "--threshold", "1/1019",
                    "--relation", "leq")
    assert "n = 1018" in out


def test_gen(capsys, tmp_path):
    out = tmp_path / "s.game"
    assert run(capsys, "gen", "scalable", "--i", 3, "--out", out)[0] == 0
    assert parse_game(out.read_bytes()).n_states == 24
    assert run(capsys, "gen", "lowerbound", "--n", 2, "--out", out)[0] == 0
    assert parse_game(out.read_bytes()).n_states == 13
    code, text, _ = run(capsys, "gen", "random", "--states", 8, "--mu", 4, "--seed", 1)
    g = parse_game(text)
    assert g.n_states == 8 and g.mu <= 4
    assert run(capsys, "gen", "random", "--states", 0)[0] == 2


def test_temporal(capsys, g1_file, tmp_path):
    lab = tmp_path / "g1.lab"
    lab.write_text("label 0 {a}\nlabel 1 -\n")
    triv = tmp_path / "t.dpa"
    triv.write_text("ap a\ndpastates 1\ndpainit 0\ndpaprio 0 0\ndpatrans 0 - 0\ndpatrans 0 {a} 0\n")
    rej = tmp_path / "r.dpa"
    rej.write_text(triv.read_text().replace("dpaprio 0 0", "dpaprio 0 1"))
    for v in ("2", "5/2", "1"):
        sat = run(capsys, "satisfice", g1_file, "--threshold", v, "--relation", "leq", "--player", "min")[1]
        code, out, _ = run(capsys, "temporal", g1_file, "--labels", lab, "--dpa", triv,
                           "--threshold", v, "--relation", "leq", "--player", "min")
        assert code == 0 and out.splitlines()[0] == sat.splitlines()[0]
        assert "parity_states = " in out
    code, out, _ = run(capsys, "temporal", g1_file, "--labels", lab, "--dpa", rej,
                       "--threshold", "100", "--relation", "leq", "--player", "min")
    assert out.startswith("NO")
    code, _, err = run(capsys, "temporal", g1_file, "--labels", tmp_path / "nope", "--dpa", triv,
                       "--threshold", "1", "--relation", "leq", "--player", "min")
    assert code == 3


def test_bench_directory_suite(capsys, g1_file, tmp_path):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "bench", "--suite", g1_file.parent, "--csv", out, "--threshold", "5/2")
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["method"] for r in rows] == ["VI_OPT", "VI_SAT", "COMP_SAT"]
    assert rows[0]["answer"] == "2/1"
    assert rows[1]["answer"] == rows[2]["answer"] == "YES"


def test_bench_unknown_suite(capsys, tmp_path):
    assert run(capsys, "bench", "--suite", tmp_path / "nowhere")[0] == 3


def test_console_script_exit_codes(tmp_path, g1_text):
    p = tmp_path / "g1.game"
    p.write_text(g1_text)
    ok = subprocess.run([sys.executable, "-m", "dsgame.cli", "optimize", str(p)], capture_output=True, text=True)
    assert ok.returncode == 0 and "W = 2/1" in ok.stdout
    bad = subprocess.run([sys.executable, "-m", "dsgame.cli", "optimize", str(tmp_path / "x")], capture_output=True, text=True)
    assert bad.returncode == 3 and bad.stderr
