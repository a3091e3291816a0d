import io
import json
import subprocess
import sys
import time

import pytest

from scrollforge import cli
from scrollforge.idealkit import BudgetError


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_lattice_stage_fast(capsys):
    t = time.perf_counter()
    code, out, _ = run(["construct", "--stages", "lattice"], capsys)
    assert code == 0 and time.perf_counter() - t < 1.0
    assert "FAIL" not in out and out.count("PASS") == 10


def test_not_prime(capsys):
    code, _, err = run(["construct", "--prime", "6"], capsys)
    assert code == 64 and "prime" in err


def test_usage_errors(capsys):
    assert run(["construct", "--stages", "bogus"], capsys)[0] == 64
    assert run(["census", "--min", "10", "--max", "5"], capsys)[0] == 64
    with pytest.raises(SystemExit) as exc:
        cli.main(["construct", "--output", "xml"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 64


def test_genericity_exit(capsys):
    code, _, err = run(["construct", "--seed", "1", "--stages", "octic", "--retry-budget", "0"], capsys)
    assert code == 2 and "genericity" in err


def test_budget_exit(monkeypatch):
    def boom(*args, **kwargs):
        raise BudgetError("too big")
    monkeypatch.setattr(cli, "run_pipeline", boom)
    assert cli.cmd_construct(cli.RunConfig(stages=["scroll"]), io.StringIO()) == 3


def test_check_failure_exit(monkeypatch):
    from scrollforge.k3pipeline import VerificationReport

    def failing(seed, prime, *args):
        rep = VerificationReport(seed, prime)
        rep.record("x", 1, 2)
        return None, rep
    monkeypatch.setattr(cli, "run_pipeline", failing)
    out = io.StringIO()
    assert cli.cmd_construct(cli.RunConfig(stages=["lattice"], output="json"), out) == 1
    assert json.loads(out.getvalue())["checks"][0]["pass"] is False


def test_env_overrides_cache_dir(monkeypatch, tmp_path):
    seen = {}
    monkeypatch.setattr(cli, "cmd_construct", lambda cfg, timings=True: seen.setdefault("cfg", cfg) and 0)
    monkeypatch.setenv("SCROLLFORGE_CACHE", str(tmp_path))
    cli.main(["construct", "--stages", "lattice", "--cache-dir", "/elsewhere"])
    assert seen["cfg"].cache_dir == str(tmp_path)
    assert seen["cfg"].stages == ["lattice"]


def test_stage_prerequisites_added():
    cfg = cli.RunConfig(stages=["quadrics"])
    assert cfg.stages == ["scroll", "octic", "embed", "quadrics"]


def test_json_report_deterministic(capsys):
    a = run(["construct", "--stages", "lattice", "--output", "json", "--no-timings"], capsys)[1]
    b = run(["construct", "--stages", "lattice", "--output", "json", "--no-timings"], capsys)[1]
    assert a == b
    data = json.loads(a)
    assert set(data) == {"seed", "prime", "checks", "retries"}


def test_census_json(capsys):
    code, out, _ = run(["census", "--output", "json"], capsys)
    data = json.loads(out)
    assert code == 0
    rows = {r["d"]: r for r in data["discriminants"]}
    assert all(rows[d]["divisorial"] and rows[d]["k3_associated"] for d in (14, 26, 42))
    assert [c["class"] for c in data["degree9_classes"] if c["accepted"]] == ["δ_p", "6f_p-55δ_p"]
    assert data["double_points"]["D"] == "8"


def test_census_text(capsys):
    code, out, _ = run(["census"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "discriminants"
    row42 = next(ln for ln in lines if ln.split()[:1] == ["42"])
    assert row42.split() == ["42", "True", "True"]
    assert "double points D(R)      8" in out
    assert all(ln == ln.rstrip() for ln in lines)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "scrollforge.cli", "construct", "--prime", "6"],
                          capture_output=True, text=True)
    assert proc.returncode == 64
