"""End-to-end checks of the command-line surface."""

from __future__ import annotations

import json

import pytest

from f2spectra import __version__, get_spec
from f2spectra.cli import main
from f2spectra.gf2poly import parse_minpoly
from f2spectra.zeroland import parse_seed_text


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_manifest(out_path) -> dict:
    return json.loads((out_path.parent / (out_path.name + ".manifest.json")).read_text())


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_unknown_spec_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["matrix", "--spec", "nosuch"])
    assert excinfo.value.code == 2
    assert "invalid choice" in capsys.readouterr().err


def test_matrix_to_file_with_manifest(tmp_path, capsys):
    out = tmp_path / "b607.txt"
    code, stdout, _ = run(capsys, "matrix", "--spec", "well607b", "--out", str(out))
    assert code == 0
    assert out.read_text().count("\n") == 607
    manifest = read_manifest(out)
    assert manifest["command"] == "matrix"
    assert manifest["specs"] == ["well607b"]
    assert manifest["outputs"] == [str(out)]
    assert manifest["version"] == __version__
    assert manifest["wall_time_s"] >= 0
    assert "607x607" in stdout


def test_matrix_to_stdout(capsys):
    code, stdout, _ = run(capsys, "matrix", "--spec", "well607b")
    assert code == 0
    lines = stdout.strip("\n").split("\n")
    assert len(lines) == 607 and set(lines[0]) <= {"0", "1"}


def test_matrix_json_needs_out(capsys):
    code, _, stderr = run(capsys, "matrix", "--spec", "well607b", "--json")
    assert code == 1
    assert "needs --out" in stderr


def test_entropy_json_and_csv(tmp_path, capsys):
    out = tmp_path / "spec.csv"
    code, stdout, _ = run(
        capsys, "entropy", "--spec", "well607b", "--json", "--out", str(out)
    )
    assert code == 0
    payload = json.loads(stdout)
    assert payload["name"] == "well607b"
    assert payload["k"] == 607
    assert payload["h"] == pytest.approx(26.66, abs=0.05)
    assert payload["manifest"]["parameters"]["power"] == 1
    csv_lines = out.read_text().strip().split("\n")
    assert csv_lines[0] == "re,im,modulus" and len(csv_lines) == 608


def test_entropy_power_flag(capsys):
    code, stdout, _ = run(capsys, "entropy", "--spec", "well607b", "--json", "--power", "3")
    base_code, base_out, _ = run(capsys, "entropy", "--spec", "well607b", "--json")
    assert code == base_code == 0
    powered = json.loads(stdout)
    base = json.loads(base_out)
    assert powered["power"] == 3
    assert powered["h"] == pytest.approx(3 * base["h"], rel=1e-9)


def test_entropy_cap_requires_extended_flag(capsys):
    code, _, stderr = run(capsys, "entropy", "--spec", "well19937a")
    assert code == 1
    assert "--extended" in stderr


def test_minpoly_file_and_report(tmp_path, capsys):
    out = tmp_path / "mp.hex"
    code, stdout, _ = run(
        capsys, "minpoly", "--spec", "well607b", "--json", "--out", str(out)
    )
    assert code == 0
    payload = json.loads(stdout)
    assert payload["degree"] == 607 and payload["n1"] == 313
    header, poly = parse_minpoly(out.read_text())
    assert header["generator"] == "well607b"
    assert poly.degree == 607
    assert read_manifest(out)["command"] == "minpoly"


@pytest.mark.parametrize(
    "check", ["verify-appendix-a", "verify-appendix-b", "mt19937-mod2"]
)
def test_charpoly_checks_pass(check, capsys):
    code, stdout, _ = run(capsys, "charpoly", check, "--trials", "4")
    assert code == 0
    assert "FAIL" not in stdout
    assert "all checks passed" in stdout


def test_charpoly_json_payload(capsys):
    code, stdout, _ = run(
        capsys, "charpoly", "verify-appendix-b", "--trials", "3", "--json"
    )
    assert code == 0
    payload = json.loads(stdout)
    assert payload["all_pass"] is True
    assert len(payload["results"]) == 3
    assert payload["manifest"]["parameters"]["check"] == "verify-appendix-b"


def test_zeroland_sweep_reports_balance(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    code, stdout, _ = run(
        capsys,
        "zeroland", "--spec", "well607b", "--max-n", "400", "--out", str(out), "--json",
    )
    assert code == 0
    payload = json.loads(stdout)
    assert payload["mode"] == "sweep"
    assert payload["balanced_time"] == 44
    assert out.read_text().startswith("n,gamma,")
    assert read_manifest(out)["parameters"]["max_n"] == 400


def test_badseed_roundtrips_through_zeroland_replay(tmp_path, capsys):
    seed_file = tmp_path / "bad.seed"
    code, _, _ = run(
        capsys, "badseed", "--spec", "well607b", "--d", "150", "--out", str(seed_file)
    )
    assert code == 0
    parse_seed_text(seed_file.read_text(), get_spec("well607b"))  # well-formed
    code, stdout, _ = run(
        capsys,
        "zeroland", "--spec", "well607b", "--seed-file", str(seed_file),
        "--p", "32", "--max-n", "600", "--json",
    )
    assert code == 0
    payload = json.loads(stdout)
    assert payload["mode"] == "replay"
    assert payload["min_gamma"] < 0.15
    assert abs(payload["min_at"] - 150) <= 35


def test_badseed_stdout_is_a_seed_file(capsys):
    code, stdout, _ = run(capsys, "badseed", "--spec", "melg607", "--d", "9")
    assert code == 0
    state = parse_seed_text(stdout, get_spec("melg607"))
    assert state.lung is not None


def test_zeroland_missing_seed_file_fails(capsys):
    code, _, stderr = run(
        capsys, "zeroland", "--spec", "well607b", "--seed-file", "/nosuch/file"
    )
    assert code == 1 and stderr.startswith("error:")


def test_jump_verify(capsys):
    code, stdout, _ = run(
        capsys, "jump", "--spec", "well1024a", "--steps", "12345", "--verify", "--json"
    )
    assert code == 0
    payload = json.loads(stdout)
    assert payload["verified"] is True
    assert len(payload["outputs"]) == 5


def test_jump_verify_refuses_huge_step_counts(capsys):
    code, _, stderr = run(
        capsys, "jump", "--spec", "well607b", "--steps", "2**31", "--verify"
    )
    assert code == 2  # argparse rejects the malformed integer
    code, _, stderr = run(
        capsys, "jump", "--spec", "well607b", "--steps", "5000000", "--verify"
    )
    assert code == 1
    assert "--verify" in stderr


def test_jump_accepts_huge_steps_without_verify(capsys):
    code, stdout, _ = run(
        capsys, "jump", "--spec", "well607b", "--steps", "0x10_0000_0000_0000", "--json"
    )
    assert code == 0
    assert json.loads(stdout)["steps"] == 0x10_0000_0000_0000


def test_bench_contract(capsys):
    code, stdout, _ = run(
        capsys,
        "bench", "--specs", "well607b", "--doubles", "2000", "--warmup", "200", "--json",
    )
    assert code == 0
    payload = json.loads(stdout)
    names = [row["name"] for row in payload["results"]]
    assert names[0] == "mt19937" and "well607b" in names
    assert all(row["ns_per_double"] > 0 for row in payload["results"])
    mt_row = next(row for row in payload["results"] if row["name"] == "mt19937")
    assert mt_row["throughput_vs_mt19937"] == pytest.approx(1.0)
    assert payload["hardware"]


def test_threads_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("F2SPECTRA_THREADS", "2")
    code, stdout, _ = run(
        capsys, "zeroland", "--spec", "well607b", "--max-n", "400", "--json"
    )
    assert code == 0
    assert json.loads(stdout)["balanced_time"] == 44  # deterministic across threads


def test_threads_env_garbage_is_an_error(capsys, monkeypatch):
    monkeypatch.setenv("F2SPECTRA_THREADS", "lots")
    code, _, stderr = run(capsys, "zeroland", "--spec", "well607b", "--max-n", "400")
    assert code == 1
    assert "F2SPECTRA_THREADS" in stderr
