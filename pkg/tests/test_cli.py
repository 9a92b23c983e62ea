import json
import subprocess
import sys

import pytest

from latquant.cli import run


def test_catalog_list(capsys):
    assert run(["catalog", "list"]) == 0
    names = {line.split()[0] for line in capsys.readouterr().out.splitlines()}
    assert {"B13", "B14", "AppendixA", "AppendixB"} <= names


def test_theta_csv(capsys, tmp_path):
    argv = ["theta", "--lattice", "B14:a=opt", "--det1", "--rmax", "4.23", "--out", "csv", "--run-dir", str(tmp_path)]
    assert run(argv) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0].split(",")[:2] == ["r2", "count"]
    assert int(rows[1].split(",")[1]) == 25  # origin plus 24 minimal vectors


@pytest.mark.parametrize(
    "argv",
    [
        ["theta"],
        ["nsm", "--lattice", "NoSuchLattice"],
        ["exact-nsm", "--family", "B14", "--dim", "14", "--a", "1"],
        ["catalog", "show"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(argv):
    assert run(argv) == 2


def test_dim_alias_matches_family(capsys):
    assert run(["exact-nsm", "--dim", "14", "--a", "25/19", "--digits", "20"]) == 0
    by_dim = capsys.readouterr().out
    assert run(["exact-nsm", "--family", "B14", "--a", "25/19", "--digits", "20"]) == 0
    assert capsys.readouterr().out == by_dim


def test_verify_appendix(capsys):
    assert run(["verify", "appendix-b"]) == 0
    assert "false" not in capsys.readouterr().out.lower()


def test_output_and_manifest_are_reproducible(tmp_path):
    outs, manifests = [], []
    for i in range(2):
        out = tmp_path / f"run{i}.json"
        argv = ["nsm", "--lattice", "D4", "--samples", "20000", "--seed", "5", "--output", str(out)]
        assert run(argv) == 0
        outs.append(out.read_bytes())
        m = json.loads(out.with_name(out.name + ".manifest.json").read_text())
        for key in ("wall_seconds", "output", "command"):
            m.pop(key)
        manifests.append(m)
    assert outs[0] == outs[1]
    assert manifests[0] == manifests[1]
    assert manifests[0]["seed"] == 5 and manifests[0]["samples"] == 20000


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "latquant", "kissing", "--lattice", "D4"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kissing"] == 24


def test_reproduce_subset(capsys):
    code = run(["reproduce-paper", "--quick", "--only", "1,2,13"])
    table = capsys.readouterr().out.splitlines()
    assert len(table) == 4 and table[-1] == "3/3 criteria pass"
    assert code == 0
