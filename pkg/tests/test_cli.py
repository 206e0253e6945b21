import io
import json
import os
import subprocess
import sys
from importlib.resources import files

import jsonschema
import pytest

from coarsegroups import _kernels
from coarsegroups.cli import run

from cli_corpus import CASES, INT, LAT, load_strict


def schema(command):
    return json.loads(files("coarsegroups").joinpath("schemas", f"{command}.json").read_text())


def validator(command):
    s = schema(command)
    jsonschema.Draft202012Validator.check_schema(s)
    return jsonschema.Draft202012Validator(s)


@pytest.fixture(scope="module")
def outputs():
    return {cid: run(argv) for cid, argv, _ in CASES}


def test_corpus_is_large_enough():
    assert len(CASES) >= 20
    assert {c for _, _, c in CASES} == {0, 1, 2, 3}


@pytest.mark.parametrize("cid, argv, code", CASES, ids=[c[0] for c in CASES])
def test_exit_code_and_schema(outputs, cid, argv, code):
    got, text = outputs[cid]
    assert got == code, text
    data = load_strict(text)
    command = argv[0]
    if command == "solve" and "--emit-instance" in argv:
        assert set(data) == {"points", "dist", "k", "d"}
    else:
        validator(command).validate(data)
    if code in (1, 2):
        assert data["error"] == ("domain" if code == 1 else "parse")
    assert text == json.dumps(data, separators=(",", ":"), ensure_ascii=False)


def test_reported_values(outputs):
    val = lambda cid: json.loads(outputs[cid][1])
    assert val("norm") == {"norm": "7"}
    assert val("norm-capped") == {"exceeds_cap": "5"}
    assert val("norm-skew")["norm"] == "7/2"
    assert val("norm-heisenberg")["norm"] == "4"
    assert val("rank") == {"rank": 2, "torsion": [2], "asdim": 2}
    assert val("snf")["diagonal"] == [2, 4]
    assert val("solve")["r_star"] == "1" and val("solve")["exact"] is True
    assert val("solve-plane")["r_star"] == "4"
    assert val("solve-budget")["exact"] is False
    assert (val("bounds")["lower"], val("bounds")["upper"]) == (3, 3)
    assert val("bounds-sup")["upper"] == "inf"
    assert val("cover-extend")["ok"] is True and val("cover-extend")["R"] == "5"
    assert val("cover-verify-tampered")["ok"] is False


def test_emitted_instance_solves_identically(outputs):
    inst = outputs["solve-emit"][1]
    code, direct = run(["solve", "--file", INT, "--weights", "z13", "--radius", "2", "--k", "2", "--d", "1"])
    code2, via = run(["solve", "--instance", inst])
    assert code == code2 == 0
    a, b = json.loads(direct), json.loads(via)
    assert {k: a[k] for k in ("r_star", "exact", "coloring")} == {k: b[k] for k in ("r_star", "exact", "coloring")}


def test_jobs_and_backends_give_identical_bytes():
    base = ["solve", "--file", LAT, "--weights", "w1", "--radius", "2", "--k", "3", "--d", "1"]
    outs = {run(base + ["--jobs", str(j), "--backend", b])[1] for j in (1, 4) for b in _kernels.BACKENDS}
    assert len(outs) == 1


def _subprocess(argv, env=None):
    return subprocess.run(
        [sys.executable, "-m", "coarsegroups", *argv],
        capture_output=True,
        text=True,
        env={**os.environ, **(env or {})},
        check=False,
    )


@pytest.mark.parametrize("cid, argv, code", CASES[::4], ids=[c[0] for c in CASES[::4]])
def test_subprocess_matches_in_process(outputs, cid, argv, code):
    p = _subprocess(argv)
    assert p.returncode == code
    assert p.stdout == outputs[cid][1] + "\n"


class _Tty(io.StringIO):
    def isatty(self):
        return True


def test_summary_color_and_no_color(monkeypatch):
    argv = ["--summary", "snf", "--matrix", "[[1]]"]
    monkeypatch.delenv("NO_COLOR", raising=False)
    monkeypatch.setattr(sys, "stderr", _Tty())
    run(argv)
    assert "\033[" in sys.stderr.getvalue()
    monkeypatch.setenv("NO_COLOR", "1")
    monkeypatch.setattr(sys, "stderr", _Tty())
    run(argv)
    assert "\033[" not in sys.stderr.getvalue() and "ok: snf exited 0" in sys.stderr.getvalue()


def test_summary_goes_to_stderr_only():
    p = _subprocess(["--summary", "cover-verify", "--file", INT, "--cover", "tampered", "--radius", "20"], {"NO_COLOR": "1"})
    assert p.returncode == 3
    assert p.stderr.strip() == "FAIL: cover-verify exited 3"
    json.loads(p.stdout)


def test_argparse_usage_errors_exit_two():
    assert _subprocess(["frobnicate"]).returncode == 2
    assert _subprocess(["norm"]).returncode == 2
