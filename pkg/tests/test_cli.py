import subprocess
import sys

import pytest
import yaml

from cycleguess.cli import main
from cycleguess.config import RunConfig
from cycleguess.core import UsageError


def run(capsys, *argv, env=None):
    code = main(list(argv), environ=env or {})
    out, err = capsys.readouterr()
    return code, out, err


def test_fcp_text(capsys):
    code, out, _ = run(capsys, "fcp", "--n", "5", "--s", "6")
    assert code == 0
    assert "fix=72" in out and "formula_check=PASS" in out


def test_fcp_structured_and_files(capsys, tmp_path):
    prot, fixed = tmp_path / "p.txt", tmp_path / "fix.txt"
    code, out, _ = run(capsys, "fcp", "--n", "7", "--s", "4", "--format", "structured",
                       "--out", str(prot), "--fixed-out", str(fixed))
    doc = yaml.safe_load(out)
    assert code == 0
    assert doc["schema"] == "cycleguess/v1" and doc["command"] == "fcp"
    assert doc["fix"] == 128 and "note" in doc
    assert len(fixed.read_text().splitlines()) == 128

    code, out, _ = run(capsys, "entropy", str(prot), "--summary-only", "--format", "structured")
    doc = yaml.safe_load(out)
    assert code == 0 and doc["verdict"] == "PASS" and "inequalities" not in doc


def test_fcp_budget_refusal(capsys):
    code, _, err = run(capsys, "fcp", "--n", "9", "--s", "6", "--budget", "1e6")
    assert code == 3 and "1000000" in err


def test_usage_errors(capsys):
    assert run(capsys, "fcp", "--n", "4", "--s", "2")[0] == 2
    assert run(capsys, "fcp", "--n", "5")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "fcp", "--n", "5", "--s", "2", "--tolerance", "0.5")[0] == 2
    assert run(capsys, "entropy", "/nonexistent/protocol.txt")[0] == 2
    assert run(capsys, "classify", "--builtin", "xor")[0] == 2


def test_rounddown(capsys):
    code, out, _ = run(capsys, "rounddown", "--m", "3", "--t", "1", "--n", "7", "--format", "structured")
    doc = yaml.safe_load(out)
    assert code == 0
    assert doc["fix"] == 1136 and doc["bound_ceiling"] == 182 and doc["check"] == "PASS"


def test_classify(capsys, tmp_path):
    code, out, _ = run(capsys, "classify", "--builtin", "pi", "--s", "6", "--z", "5")
    assert code == 0 and "class=perfect" in out and "preimage_is_product=True" in out
    f = tmp_path / "f.txt"
    f.write_text("0 1\n1 0\n")
    code, out, _ = run(capsys, "classify", "--file", str(f))
    assert "class=flat" in out and "cond_mi=1.0" in out
    code, out, _ = run(capsys, "classify", "--exhaustive", "--format", "structured")
    doc = yaml.safe_load(out)
    assert (doc["total"], doc["flat"], doc["flat_not_semi_perfect"], doc["delta1"]) == (16, 6, 2, 0.5)
    assert run(capsys, "classify", "--exhaustive", "--s", "3")[0] == 4


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "--s", "2", "--format", "structured")
    doc = yaml.safe_load(out)
    assert code == 0 and doc["delta1"] == 0.5 and doc["N"] == 1907910
    code, _, err = run(capsys, "constants", "--s", "4")
    assert code == 4 and "4^16" in err


def test_confusion(capsys, tmp_path):
    w = tmp_path / "w.txt"
    code, out, _ = run(capsys, "confusion", "--cycle", "5", "--s", "2", "--witness-out", str(w), "--format", "structured")
    doc = yaml.safe_load(out)
    assert code == 0
    assert (doc["alpha"], doc["chi"], doc["fcp_fix"]) == (5, 8, 4)
    assert len(w.read_text().splitlines()) == 5
    g = tmp_path / "k2.txt"
    g.write_text("2\n1 2\n")
    code, out, _ = run(capsys, "confusion", "--graph", str(g), "--s", "2", "--alpha")
    assert code == 0 and "alpha=2" in out and "chi" not in out


def test_confusion_budget_and_timeout(capsys):
    assert run(capsys, "confusion", "--cycle", "15", "--s", "2")[0] == 3
    # the time budget is a whole number of seconds
    assert run(capsys, "confusion", "--cycle", "5", "--s", "2", "--chi", "--timeout", "1e-9")[0] == 2


def test_index(capsys):
    code, out, _ = run(capsys, "index", "encode", "--n", "5", "--s", "6", "--colouring", "5,0,0,0,0", "--packed")
    assert code == 0 and "packed=73" in out
    code, out, _ = run(capsys, "index", "decode", "--n", "5", "--s", "6", "--message", "73",
                       "--vertex", "1", "--left", "0", "--right", "0")
    assert code == 0 and "colour=5" in out
    code, out, _ = run(capsys, "index", "decode", "--n", "5", "--s", "6", "--message", "1,0,0,0,2",
                       "--vertex", "1", "--left", "0", "--right", "0")
    assert "colour=5" in out
    code, out, _ = run(capsys, "index", "roundtrip", "--n", "5", "--s", "6")
    assert code == 0 and "summary=6^5 = 7776 colourings, 0 failures, 108 distinct messages" in out
    code, out, _ = run(capsys, "index", "size", "--n", "7", "--s", "2")
    assert "messages=16" in out
    assert run(capsys, "index", "decode", "--n", "5", "--s", "6")[0] == 2


def test_env_precedence(capsys):
    env = {"CYCLEGUESS_OUTPUT_FORMAT": "structured", "CYCLEGUESS_ENUMERATION_BUDGET": "1000"}
    code, _, _ = run(capsys, "fcp", "--n", "5", "--s", "6", env=env)
    assert code == 3
    code, out, _ = run(capsys, "fcp", "--n", "5", "--s", "6", "--budget", "1e4", env=env)
    assert code == 0 and out.startswith("schema: cycleguess/v1")
    cfg = RunConfig.resolve({"seed": "7"}, {"CYCLEGUESS_SEED": "3", "CYCLEGUESS_THREADS": "2"})
    assert (cfg.seed, cfg.threads) == (7, 2)
    with pytest.raises(UsageError):
        RunConfig.resolve({}, {"CYCLEGUESS_THREADS": "many"})


def test_output_is_deterministic(capsys):
    a = run(capsys, "fcp", "--n", "7", "--s", "6", "--threads", "1", "--format", "structured")[1]
    b = run(capsys, "fcp", "--n", "7", "--s", "6", "--threads", "4", "--format", "structured")[1]
    assert a == b


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "cycleguess", "index", "size", "--n", "5", "--s", "6"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "messages=108" in r.stdout


def test_confusion_interval_exit_code(capsys):
    code, out, _ = run(capsys, "confusion", "--cycle", "9", "--s", "2", "--format", "structured")
    doc = yaml.safe_load(out)
    assert code == 4
    assert doc["alpha"] == 16 and doc["alpha_status"] == "exact"
    assert doc["chi_status"] == "interval" and doc["chi_interval"][0] <= doc["chi_interval"][1]
