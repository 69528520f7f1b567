"""Exit codes and output formats of the command-line front end."""

import json
import subprocess
import sys

from lanprove.cli import main

from conftest import corpus_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


FIXED4 = str(corpus_path("fixed4"))
FIXED2 = str(corpus_path("fixed2"))
FAULTY = str(corpus_path("faulty"))
STLC = str(corpus_path("stlc"))


# ------------------------------------------------------------------ check

def test_check_ok(capsys):
    code, out, err = run(capsys, "check", FIXED4)
    assert code == 0
    assert out == ""


def test_check_finding(capsys, tmp_path):
    bad = tmp_path / "bad.lan"
    bad.write_text("Expr e ::= (f e) | (f e e)\n")
    code, out, err = run(capsys, "check", str(bad))
    assert code == 1
    assert "arity-mismatch" in out


def test_check_parse_error(capsys, tmp_path):
    bad = tmp_path / "broken.lan"
    bad.write_text("Expr e ::= ??\n")
    code, out, err = run(capsys, "check", str(bad))
    assert code == 2
    assert "broken.lan" in err


def test_check_missing_file(capsys):
    code, out, err = run(capsys, "check", "does-not-exist.lan")
    assert code == 2
    assert "cannot read" in err


def test_check_json(capsys, tmp_path):
    bad = tmp_path / "bad.lan"
    bad.write_text("Expr e ::= (f e) | (f e e)\n")
    code, out, err = run(capsys, "check", str(bad), "--format", "json")
    assert code == 1
    data = json.loads(out)
    assert data["findings"][0]["code"] == "arity-mismatch"


# ----------------------------------------------------------------- derive

def test_derive_deterministic(capsys):
    code1, out1, _ = run(capsys, "derive", FAULTY)
    code2, out2, _ = run(capsys, "derive", FAULTY)
    assert code1 == code2 == 0
    assert out1 == out2
    lines = out1.splitlines()
    # sorted by atom kind first, then the atom's own fields
    heads = [line.split("(")[0] for line in lines]
    assert heads == sorted(heads)
    assert "contravariant(arrow, {1})" in lines
    assert "effectful(1)" in lines
    assert "contra-resp([T-APP-BAD], arrow)" not in lines


def test_derive_stlc(capsys):
    code, out, _ = run(capsys, "derive", STLC)
    assert code == 0
    assert "ctx(C, app, {1,2})" in out.splitlines()


def test_derive_json(capsys):
    code, out, _ = run(capsys, "derive", STLC, "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert {"constructor": "app", "kind": "ctx", "metavar": "C",
            "negated": False, "positions": [1, 2]} in data["atoms"]
    assert out == json.dumps(data, sort_keys=True, indent=2) + "\n"


def test_derive_with_pre(capsys):
    code, out, _ = run(capsys, "derive", STLC, "--pre", "effectful(4)")
    assert code == 0
    assert "effectful(4)" in out.splitlines()


def test_derive_rejects_goal_flag(capsys):
    code, out, err = run(capsys, "derive", STLC, "--goal", "true")
    assert code == 2


def test_derive_validation_exit(capsys, tmp_path):
    bad = tmp_path / "bad.lan"
    bad.write_text("Expr e ::= (f e) | (f e e)\n")
    code, out, err = run(capsys, "derive", str(bad))
    assert code == 1
    assert "arity-mismatch" in err


# ------------------------------------------------------------------ prove

def test_prove_success(capsys):
    code, out, _ = run(capsys, "prove", FIXED2, "--goal", "ctx-compliant([BETA])")
    assert code == 0
    assert "(consequence)" in out
    assert "ctx-compliant([BETA])" in out


def test_prove_failure(capsys):
    code, out, _ = run(capsys, "prove", FIXED2, "--goal", "error-handler(try, 1)")
    assert code == 3
    assert "no proof found" in out
    assert "1 ∈ {1}" in out


def test_prove_requires_goal(capsys):
    code, out, err = run(capsys, "prove", FIXED2)
    assert code == 2


def test_prove_bad_goal_text(capsys):
    code, out, err = run(capsys, "prove", FIXED2, "--goal", "wibble(")
    assert code == 2
    assert "--goal" in err


def test_prove_json_tree(capsys):
    code, out, _ = run(capsys, "prove", FIXED2, "--goal", "effectful(1)",
                       "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["rule"] == "consequence"
    assert data["post"] == [{"kind": "effectful", "negated": False,
                             "state_pos": 1}]


def test_prove_json_failure(capsys):
    code, out, _ = run(capsys, "prove", FAULTY, "--goal",
                       "no-dupli-ef([CBN-BETA])", "--format", "json")
    assert code == 3
    data = json.loads(out)
    assert data["missing"] == [{"kind": "no-dupli-ef", "negated": False,
                                "rule_name": "CBN-BETA"}]
    assert any("substitution" in m["reason"] for m in data["nearest_misses"])


def test_prove_ineffectual_override(capsys):
    code, _, _ = run(capsys, "prove", FAULTY, "--goal",
                     "no-dupli-ef([CBN-BETA])")
    assert code == 3
    code, _, _ = run(capsys, "prove", FAULTY, "--goal",
                     "no-dupli-ef([CBN-BETA])", "--ineffectual", "v,er,e")
    assert code == 0


def test_unknown_ineffectual_name(capsys):
    code, out, err = run(capsys, "derive", FAULTY, "--ineffectual", "zz")
    assert code == 1
    assert "unknown-metavariable" in err


def test_max_passes_limits_saturation(capsys):
    fixed1 = str(corpus_path("fixed1"))
    code, out, _ = run(capsys, "derive", fixed1, "--max-passes", "1")
    assert code == 0
    assert "no-dupli-ef([BETA])" not in out.splitlines()
    code, out, _ = run(capsys, "derive", fixed1)
    assert "no-dupli-ef([BETA])" in out.splitlines()


def test_max_passes_must_be_positive(capsys):
    code, out, err = run(capsys, "derive", FIXED2, "--max-passes", "0")
    assert code == 2


# ------------------------------------------------------------------ render

def test_render_round_trips(capsys):
    code, out, _ = run(capsys, "render", FIXED4)
    assert code == 0
    from lanprove import parse_language
    assert parse_language(out) == parse_language(corpus_path("fixed4").read_text())


# -------------------------------------------------------------- subprocess

def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lanprove", "prove", FIXED4,
         "--goal", "error-handler(try, 1)"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "(consequence)" in proc.stdout


def test_non_flat_assertion_exits_cleanly(capsys):
    code, out, err = run(capsys, "prove", FIXED2, "--goal",
                         "~(effectful(1) /\\ effectful(2))")
    assert code == 2
    assert "flat" in err
