import json
import subprocess
import sys

import pytest

MAP_DOC = {
    "source": {"sets": {"0": [0, 1]}, "actions": {"id0": {"0": 0, "1": 1}}},
    "target": {"sets": {"0": [0, 1, 2]}, "actions": {"id0": {"0": 0, "1": 1, "2": 2}}},
    "components": {"0": {"0": 1, "1": 1}},
}


def cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "nwfs.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


@pytest.fixture()
def map_file(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps(MAP_DOC))
    return p


def test_factorize_converges_and_validates_in_a_fresh_process(tmp_path, map_file):
    out = tmp_path / "cert.json"
    res = cli(
        "factorize", "--category", "terminal", "--gens", "point",
        "--map", str(map_file), "--out", str(out), "--format", "json",
    )
    assert res.returncode == 0, res.stderr
    doc = json.loads(out.read_text())
    assert doc["schema"] == "nwfs.sequence/1"
    assert doc["run"]["mode"] == "free"
    assert doc["run"]["converged_at"] == 1
    # stdout carries the same document that was written
    assert json.loads(res.stdout) == doc

    check = cli("validate", str(out))
    assert check.returncode == 0, check.stdout + check.stderr


def test_reruns_are_byte_identical(tmp_path, map_file):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        res = cli(
            "factorize", "--category", "terminal", "--gens", "point",
            "--map", str(map_file), "--out", str(out),
        )
        assert res.returncode == 0, res.stderr
    assert a.read_bytes() == b.read_bytes()


def test_plain_budget_exhaustion_signals_exit_two(tmp_path, map_file):
    out = tmp_path / "q.json"
    res = cli(
        "plain", "--category", "terminal", "--gens", "point",
        "--map", str(map_file), "--budget-successors", "3", "--out", str(out),
    )
    assert res.returncode == 2
    doc = json.loads(out.read_text())
    assert doc["run"]["exhausted"] is True
    assert doc["run"]["converged_at"] is None
    check = cli("validate", str(out))
    assert check.returncode == 0, check.stdout


def test_compare_emits_a_validating_certificate(tmp_path, map_file):
    out = tmp_path / "cmp.json"
    res = cli(
        "compare", "--category", "terminal", "--gens", "point",
        "--map", str(map_file), "--budget-successors", "3", "--out", str(out),
    )
    assert res.returncode == 0, res.stderr
    doc = json.loads(out.read_text())
    assert doc["schema"] == "nwfs.compare/1"
    assert doc["comparison"]["ok"] is True
    assert cli("validate", str(out)).returncode == 0


def test_enumerate_counts_and_validates(tmp_path, map_file):
    out = tmp_path / "enum.json"
    res = cli(
        "enumerate", "--category", "terminal", "--gens", "point",
        "--map", str(map_file), "--out", str(out),
    )
    assert res.returncode == 0, res.stderr
    doc = json.loads(out.read_text())
    assert doc["algebra_count"] == doc["table_count"] == doc["product_count"]
    assert cli("validate", str(out)).returncode == 0


def test_laws_clean_and_mutant_exit_codes(tmp_path):
    out = tmp_path / "laws.json"
    res = cli("laws", "--max-total", "3", "--out", str(out))
    assert res.returncode == 0, res.stderr
    assert json.loads(out.read_text())["ok"] is True

    res = cli("laws", "--rules", "graph,mutant3", "--max-total", "3")
    assert res.returncode == 3


def test_laws_seeded_sampling(tmp_path):
    out = tmp_path / "laws.json"
    res = cli(
        "laws", "--samples", "4", "--seed", "12", "--category", "delta<=1",
        "--out", str(out),
    )
    assert res.returncode == 0, res.stderr
    assert cli("validate", str(out)).returncode == 0


def test_fill_solves_a_recorded_square(tmp_path, map_file):
    surj = tmp_path / "s.json"
    surj.write_text(json.dumps({
        "source": {"sets": {"0": [0, 1]}, "actions": {"id0": {"0": 0, "1": 1}}},
        "target": {"sets": {"0": [0]}, "actions": {"id0": {"0": 0}}},
        "components": {"0": {"0": 0, "1": 0}},
    }))
    cert = tmp_path / "cert.json"
    res = cli(
        "factorize", "--category", "terminal", "--gens", "point",
        "--map", str(surj), "--out", str(cert),
    )
    assert res.returncode == 0, res.stderr
    filler = tmp_path / "filler.json"
    res = cli("fill", str(cert), "--square", "0", "--out", str(filler))
    assert res.returncode == 0, res.stderr
    doc = json.loads(filler.read_text())
    assert doc["schema"] == "nwfs.filler/1"
    assert cli("validate", str(filler)).returncode == 0


def test_validate_flags_a_tampered_file(tmp_path, map_file):
    out = tmp_path / "cert.json"
    cli(
        "factorize", "--category", "terminal", "--gens", "point",
        "--map", str(map_file), "--out", str(out),
    )
    doc = json.loads(out.read_text())
    doc["run"]["converged_at"] = 0
    out.write_text(json.dumps(doc))
    res = cli("validate", str(out))
    assert res.returncode == 3
    assert res.stdout.strip()


def test_input_errors_exit_four(tmp_path):
    res = cli(
        "factorize", "--category", "terminal", "--gens", "point",
        "--map", str(tmp_path / "missing.json"),
    )
    assert res.returncode == 4

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    res = cli("factorize", "--category", "terminal", "--gens", "point", "--map", str(bad))
    assert res.returncode == 4

    res = cli("validate", str(bad))
    assert res.returncode == 4


def test_text_format_prints_a_stage_table(map_file):
    res = cli(
        "factorize", "--category", "terminal", "--gens", "point",
        "--map", str(map_file), "--format", "text",
    )
    assert res.returncode == 0
    assert "converged" in res.stdout
    assert "0" in res.stdout
