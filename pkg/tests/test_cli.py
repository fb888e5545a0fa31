import io
import subprocess
import sys
from pathlib import Path

import pytest

from spinecalc.canon import canonical_code, is_isomorphic
from spinecalc.cli import main
from spinecalc.textio import parse

DATA = Path(__file__).parent / "data"
MOBIUS = str(DATA / "mobius.spine")


def run(*argv, stdin=None, monkeypatch=None):
    out = io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(list(argv), out=out)
    return code, out.getvalue()


def records(text):
    return [dict(tok.split("=", 1) for tok in line.split() if "=" in tok)
            for line in text.splitlines() if line and not line.startswith(("graph", "vertex", "edge", "#"))]


def test_validate_ok():
    assert run("validate", MOBIUS) == (0, "ok=1\n")


def test_validate_reports_violations(tmp_path):
    p = tmp_path / "bad.graph"
    p.write_text("graph b layer=curve\nvertex x cross h=1\nedge e x.a x.b w=1\n")
    code, out = run("validate", str(p))
    assert code == 1
    assert out.startswith("ok=0") and "law=cross-law" in out


def test_invariants_moebius():
    assert run("invariants", MOBIUS) == (0, "chi=0 orientable=0 boundary=1 genus=1\n")


def test_trace(tmp_path):
    p = tmp_path / "c.graph"
    p.write_text("graph c layer=curve\ncircle w=3\n")
    code, out = run("trace", str(p))
    assert code == 0
    assert out == "components=3 closed=3 arcs=0 endpoints=0 doubles=0\n"
    assert run("trace", MOBIUS)[0] == 1


def test_equiv_nonstable_pair():
    code, out = run("equiv", str(DATA / "nonstable_a.spine"), str(DATA / "nonstable_b.spine"),
                    "--ruleset", "flows", "--budget", "10000")
    assert code == 0
    assert out.startswith("equivalent=yes path_len=2")
    assert sum(line.startswith("move ") for line in out.splitlines()) == 2


def test_sites_apply_and_replay(tmp_path):
    code, out = run("sites", MOBIUS)
    assert code == 0
    sites = [r for r in records(out) if "rule" in r]
    assert int(records(out)[-1]["sites"]) == len(sites) > 0
    s = sites[0]
    line = f"{s['rule']} {s['variant']} {s['direction']} {s['key']}"
    code, applied = run("apply", MOBIUS, "--move", line)
    assert code == 0
    log = tmp_path / "moves.log"
    log.write_text(line + "\n")
    code, replayed = run("replay", MOBIUS, str(log))
    assert code == 0
    assert canonical_code(parse(applied)) == canonical_code(parse(replayed))


def test_stale_move_is_domain_error():
    assert run("apply", MOBIUS, "--move", "s3 0 rl nowhere")[0] == 1


def test_bad_log_line_is_usage_error():
    assert run("apply", MOBIUS, "--move", "s3 x rl e0")[0] == 2


def test_canonicalize_is_lossless_and_stable(monkeypatch):
    code, out = run("canonicalize", MOBIUS)
    assert code == 0
    assert is_isomorphic(parse(out), parse(Path(MOBIUS).read_text()))
    code2, out2 = run("canonicalize", "-", stdin=out, monkeypatch=monkeypatch)
    assert code2 == 0 and out2 == out


def test_reduce_and_orbit():
    code, out = run("reduce", str(DATA / "nonstable_a.spine"))
    assert code == 0 and out.startswith("normal_form=annulus_k=0")
    code, out = run("orbit", MOBIUS, "--budget", "5")
    assert code == 0 and records(out)[0]["expansions"] == "5"


def test_scramble_is_seeded(tmp_path):
    log = tmp_path / "s.log"
    a = run("scramble", MOBIUS, "--steps", "8", "--seed", "3", "--log", str(log))
    b = run("scramble", MOBIUS, "--steps", "8", "--seed", "3")
    assert a == b and a[0] == 0
    assert len(log.read_text().splitlines()) == 8
    code, out = run("replay", MOBIUS, str(log))
    assert canonical_code(parse(out)) == canonical_code(parse(a[1]))


def test_random_is_seeded_and_valid(monkeypatch):
    a = run("random", "--seed", "5", "--layer", "curve")
    assert a == run("random", "--seed", "5", "--layer", "curve")
    assert run("validate", "-", stdin=a[1], monkeypatch=monkeypatch)[0] == 0


def test_export_dot():
    code, out = run("export-dot", MOBIUS)
    assert code == 0 and out.startswith("graph ") and "triangle" in out


@pytest.mark.parametrize("argv", [
    ["nosuch", MOBIUS],
    ["validate"],
    ["equiv", MOBIUS],
    ["validate", "/nonexistent/file"],
    ["orbit", MOBIUS, "--budget", "0"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_parse_error_exit_code(tmp_path):
    p = tmp_path / "x.graph"
    p.write_text("graph x layer=flow\nvertex v1 trivalent\nedge e v1.T v1.T\n")
    assert run("validate", str(p))[0] == 2


def test_invalid_graph_is_domain_error(tmp_path):
    p = tmp_path / "x.graph"
    p.write_text("graph x layer=curve\nvertex a univalent\nvertex b univalent\nedge e a.0 b.0 w=1\n")
    assert run("invariants", str(p))[0] == 1


def test_ruleset_layer_mismatch():
    assert run("sites", MOBIUS, "--ruleset", "curves")[0] == 1


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spinecalc.cli", "validate", MOBIUS],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "ok=1\n"
