import json
import subprocess
import sys

import pytest

from specdbl.fileio import read_set_file, read_trace_file


def run_cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "specdbl.cli", *argv],
        capture_output=True,
        text=True,
    )


def test_gen_example_set_is_deterministic(tmp_path):
    first = tmp_path / "one.json"
    second = tmp_path / "two.json"
    for path in (first, second):
        proc = run_cli("gen", "--kind", "example1", "--n", "2", "--out", str(path))
        assert proc.returncode == 0, proc.stderr
    assert first.read_bytes() == second.read_bytes()
    members, meta = read_set_file(first)
    assert members.size == 7
    assert meta["kind"] == "example1"


def test_gen_random_and_subgroup(tmp_path):
    out = tmp_path / "r.json"
    proc = run_cli("gen", "--kind", "random", "--group", "2,2,2,2",
                   "--size", "6", "--seed", "3", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    members, _ = read_set_file(out)
    assert members.size == 6

    out2 = tmp_path / "h.json"
    proc = run_cli("gen", "--kind", "subgroup", "--group", "2,2,2,2",
                   "--gens", "1000;0100", "--out", str(out2))
    assert proc.returncode == 0, proc.stderr
    members, _ = read_set_file(out2)
    assert members.size == 4
    assert (0, 0, 0, 0) in members

    out3 = tmp_path / "h2.json"
    proc = run_cli("gen", "--kind", "subgroup", "--group", "4,3",
                   "--gens", "2,0;0,1", "--out", str(out3))
    assert proc.returncode == 0, proc.stderr
    members, _ = read_set_file(out3)
    assert members.size == 6


@pytest.mark.parametrize("argv", [
    ("gen", "--kind", "example1", "--out", "x.json"),
    ("gen", "--kind", "example1", "--n", "2", "--group", "2,2", "--out", "x.json"),
    ("gen", "--kind", "random", "--group", "2,2", "--out", "x.json"),
    ("gen", "--kind", "subgroup", "--group", "2,2", "--out", "x.json"),
    ("gen", "--kind", "subgroup", "--group", "2,2", "--gens", "111", "--out", "x.json"),
])
def test_gen_usage_errors(tmp_path, argv):
    argv = [a if a != "x.json" else str(tmp_path / "x.json") for a in argv]
    proc = run_cli(*argv)
    assert proc.returncode == 2
    assert "error" in proc.stderr.lower()


def test_spectrum_formats(tmp_path):
    setfile = tmp_path / "a.json"
    run_cli("gen", "--kind", "example1", "--n", "2", "--out", str(setfile))

    proc = run_cli("spectrum", "--input", str(setfile), "--epsilon", "0.4")
    assert proc.returncode == 0
    assert "7 of 16 characters" in proc.stdout

    proc = run_cli("spectrum", "--input", str(setfile), "--epsilon", "0.4",
                   "--format", "json")
    doc = json.loads(proc.stdout)
    assert doc["spectrum_size"] == 7
    assert len(doc["members"]) == 7

    proc = run_cli("spectrum", "--input", str(setfile), "--epsilon", "0.4",
                   "--format", "csv")
    rows = [line for line in proc.stdout.splitlines() if line]
    assert len(rows) == 7
    assert all(len(row.split(",")) == 4 for row in rows)

    out = tmp_path / "spec.json"
    proc = run_cli("spectrum", "--input", str(setfile), "--epsilon", "0.4",
                   "--out", str(out))
    assert proc.returncode == 0
    members, meta = read_set_file(out)
    assert members.size == 7
    assert meta["kind"] == "spectrum"


def test_refine_and_report_round_trip(tmp_path):
    setfile = tmp_path / "a.json"
    run_cli("gen", "--kind", "example1", "--n", "3", "--out", str(setfile))
    trace = tmp_path / "trace.json"
    proc = run_cli("refine", "--input", str(setfile), "--epsilon", "0.4",
                   "--delta", "0.3", "--seed", "1", "--out", str(trace))
    assert proc.returncode == 0, proc.stderr
    assert "finished" in proc.stdout
    assert "audit=ok" in proc.stdout

    result, original, _ = read_trace_file(trace)
    assert result.terminated == "finished"
    assert original.size == 15

    proc = run_cli("report", "--trace", str(trace))
    assert proc.returncode == 0, proc.stderr
    assert "audit: ok" in proc.stdout
    assert "holds" in proc.stdout

    proc = run_cli("report", "--trace", str(trace), "--format", "json")
    doc = json.loads(proc.stdout)
    assert doc["ok"] is True
    assert doc["audit"]["ok"] is True
    assert doc["bound_report"]["certified_doubling_holds"] is True


def test_report_rejects_a_tampered_trace(tmp_path):
    setfile = tmp_path / "a.json"
    run_cli("gen", "--kind", "example1", "--n", "2", "--out", str(setfile))
    trace = tmp_path / "trace.json"
    run_cli("refine", "--input", str(setfile), "--epsilon", "0.4",
            "--delta", "0.3", "--seed", "1", "--out", str(trace))

    doc = json.loads(trace.read_text())
    doc["rho_star"] = 0.001
    trace.write_text(json.dumps(doc))

    proc = run_cli("report", "--trace", str(trace))
    assert proc.returncode == 1
    assert "FAIL" in proc.stdout or "differs" in proc.stdout


def test_verify_checks_pass_on_a_subgroup(tmp_path):
    setfile = tmp_path / "h.json"
    run_cli("gen", "--kind", "subgroup", "--group", "2,2,2,2",
            "--gens", "1000;0100", "--out", str(setfile))
    proc = run_cli("verify", "--input", str(setfile),
                   "--statistical-doubling", "0.5",
                   "--closure", "0.9",
                   "--parseval", "0.5")
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert proc.stdout.count("ok") == 3
    assert "FAIL" not in proc.stdout


def test_verify_without_checks_is_a_usage_error(tmp_path):
    setfile = tmp_path / "h.json"
    run_cli("gen", "--kind", "example1", "--n", "2", "--out", str(setfile))
    proc = run_cli("verify", "--input", str(setfile))
    assert proc.returncode == 2


def test_file_errors_exit_2(tmp_path):
    proc = run_cli("spectrum", "--input", str(tmp_path / "missing.json"),
                   "--epsilon", "0.4")
    assert proc.returncode == 2
    assert "cannot read" in proc.stderr

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    proc = run_cli("spectrum", "--input", str(bad), "--epsilon", "0.4")
    assert proc.returncode == 2
    assert "invalid JSON" in proc.stderr

    proc = run_cli("refine", "--input", str(bad), "--epsilon", "0.4",
                   "--delta", "0.3", "--out", str(tmp_path / "t.json"))
    assert proc.returncode == 2


def test_bad_parameters_exit_2(tmp_path):
    setfile = tmp_path / "a.json"
    run_cli("gen", "--kind", "example1", "--n", "2", "--out", str(setfile))
    proc = run_cli("refine", "--input", str(setfile), "--epsilon", "1.5",
                   "--delta", "0.3", "--out", str(tmp_path / "t.json"))
    assert proc.returncode == 2
    assert "epsilon" in proc.stderr
