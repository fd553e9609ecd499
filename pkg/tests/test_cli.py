import subprocess
import sys

import pytest

from pivotc.cli import main

from conftest import FIXTURES


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "pivotc.cli", *args],
        capture_output=True,
        text=True,
    )
    return proc


def test_compile_golfers_clp(tmp_path):
    out = tmp_path / "golfers.ecl"
    proc = run_cli(
        "compile",
        "-m", str(FIXTURES / "golfers.som"),
        "-d", str(FIXTURES / "golfers.dat"),
        "--target", "clp",
        "-o", str(out),
    )
    assert proc.returncode == 0
    assert "intsets(WEEKSCHED_GROUPSCHED_PLAYERS,12,1,9)" in out.read_text()
    # pass reports go to stderr, payload only to the file
    assert "objectFlatten" in proc.stderr
    assert proc.stdout == ""


def test_compile_missing_model_flag_is_usage_error():
    proc = run_cli("compile", "--target", "clp", "-o", "x.ecl")
    assert proc.returncode == 2


def test_compile_flat_requires_unroll(tmp_path):
    proc = run_cli(
        "compile",
        "-m", str(FIXTURES / "queens4.som"),
        "--target", "flat",
        "--passes", "objectFlatten,enumRemove,foldConstants",
        "-o", str(tmp_path / "q.flat"),
    )
    assert proc.returncode == 2
    assert "unroll" in proc.stderr


def test_compile_flat_queens(tmp_path):
    out = tmp_path / "q.flat"
    proc = run_cli(
        "compile",
        "-m", str(FIXTURES / "queens4.som"),
        "--target", "flat",
        "--unroll",
        "-o", str(out),
    )
    assert proc.returncode == 0
    text = out.read_text()
    assert text.count("var int") == 4
    assert "constraint" in text


def test_compile_pivot_target(tmp_path):
    out = tmp_path / "m.som"
    proc = run_cli(
        "compile",
        "-m", str(FIXTURES / "golfers.som"),
        "-d", str(FIXTURES / "golfers.dat"),
        "--target", "pivot",
        "-o", str(out),
    )
    assert proc.returncode == 0
    assert out.read_text().startswith("model SocialGolfers;")


def test_byte_identical_reruns(tmp_path):
    args = (
        "compile",
        "-m", str(FIXTURES / "golfers.som"),
        "-d", str(FIXTURES / "golfers.dat"),
        "--target", "clp",
    )
    a, b = tmp_path / "a.ecl", tmp_path / "b.ecl"
    assert run_cli(*args, "-o", str(a)).returncode == 0
    assert run_cli(*args, "-o", str(b)).returncode == 0
    assert a.read_bytes() == b.read_bytes()


def test_diagnostics_exit_code_and_format(tmp_path):
    bad = tmp_path / "bad.som"
    bad.write_text("main class M {\n  int x in ;\n}\n")
    proc = run_cli("compile", "-m", str(bad), "--target", "clp", "-o", str(tmp_path / "o"))
    assert proc.returncode == 1
    assert f"{bad}:2:" in proc.stderr


def test_type_error_is_reported(tmp_path):
    bad = tmp_path / "bad.som"
    bad.write_text("model M;\nconstraint c { 1 + 2; }\n")
    proc = run_cli("compile", "-m", str(bad), "--target", "clp", "-o", str(tmp_path / "o"))
    assert proc.returncode == 1
    assert "must be boolean" in proc.stderr


def test_check_relaxation_superset():
    proc = run_cli("check", "-m", str(FIXTURES / "queens4.som"), "--alldiff", "relaxation")
    assert proc.returncode == 0
    assert proc.stdout.startswith("SUPERSET")


def test_check_boolean_equal():
    proc = run_cli("check", "-m", str(FIXTURES / "queens4.som"), "--alldiff", "boolean")
    assert proc.returncode == 0
    assert proc.stdout.startswith("EQUAL baseline=2 transformed=2")


def test_check_default_passes_equal():
    proc = run_cli(
        "check",
        "-m", str(FIXTURES / "golfers.som"),
        "-d", str(FIXTURES / "golfers_small.dat"),
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("EQUAL")


def test_eval_folds():
    proc = run_cli("eval", "-e", "1+2*3")
    assert proc.returncode == 0
    assert proc.stdout.strip() == "7"


def test_eval_identity():
    proc = run_cli("eval", "-e", "x+0")
    assert proc.stdout.strip() == "x"


def test_eval_parse_error():
    proc = run_cli("eval", "-e", "1 +")
    assert proc.returncode == 1


def test_verify_against(tmp_path):
    out1 = tmp_path / "a.ecl"
    base_args = (
        "compile",
        "-m", str(FIXTURES / "queens4.som"),
        "--target", "clp",
    )
    assert run_cli(*base_args, "-o", str(out1)).returncode == 0
    ok = run_cli(*base_args, "-o", str(tmp_path / "b.ecl"), "--verify-against", str(out1))
    assert ok.returncode == 0
    (tmp_path / "other").write_text("different\n")
    bad = run_cli(
        *base_args, "-o", str(tmp_path / "c.ecl"), "--verify-against", str(tmp_path / "other")
    )
    assert bad.returncode == 1


def test_missing_file_reports_and_fails(tmp_path):
    proc = run_cli(
        "compile", "-m", str(tmp_path / "nope.som"), "--target", "clp",
        "-o", str(tmp_path / "o"),
    )
    assert proc.returncode == 1
    assert proc.stderr.strip() != ""


def test_main_callable_in_process(tmp_path):
    out = tmp_path / "q.ecl"
    code = main([
        "compile", "-m", str(FIXTURES / "queens4.som"), "--target", "clp", "-o", str(out)
    ])
    assert code == 0
    assert out.exists()


@pytest.mark.parametrize("args", [["bogus"], ["compile", "--target", "nope"]])
def test_usage_errors(args):
    proc = run_cli(*args)
    assert proc.returncode == 2


def test_check_oracle_limit_exit_code(tmp_path):
    huge = tmp_path / "huge.som"
    huge.write_text("model H;\nint x[5] in 1..1024;\nconstraint c { x[1] = 1; }\n")
    proc = run_cli("check", "-m", str(huge))
    assert proc.returncode == 3
    assert proc.stderr.strip() != ""
