"""Command-line interface: subcommands, exit codes, witness files."""

import json

import pytest

from latspi.cli import main, parse_bounds


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- bounds parsing --------------------------------------------------------


def test_parse_bounds_spec_format():
    b = parse_bounds("depth=2,unfold=3,game=9")
    assert (b.recipe_depth, b.static_depth, b.repl_unfold, b.game_depth) == (2, 2, 3, 9)


def test_parse_bounds_static_override():
    b = parse_bounds("depth=1,static=2")
    assert b.recipe_depth == 1 and b.static_depth == 2


def test_parse_bounds_rejects_unknown():
    from latspi.cli import CliError

    with pytest.raises(CliError):
        parse_bounds("depht=2")


def test_state_budget_env(monkeypatch):
    monkeypatch.setenv("LATSPI_STATE_BUDGET", "7")
    assert parse_bounds(None).state_budget == 7
    assert parse_bounds("budget=9").state_budget == 9


# --- parse / lts / indep ---------------------------------------------------


def test_parse_roundtrip(files, capsys):
    f = files("p.pi", "new x . ( out(a,x) | out(b, h(x)) )")
    code, out, _ = run(capsys, "parse", f)
    assert code == 0
    assert out.strip() == "new x.(out(a, x) | out(b, h(x)))"


def test_parse_error_exit_code(files, capsys):
    f = files("bad.pi", "out(a")
    code, _, err = run(capsys, "parse", f)
    assert code == 2 and "error:" in err


def test_missing_file_exit_code(capsys):
    code, _, err = run(capsys, "parse", "/nonexistent/x.pi")
    assert code == 2


def test_lts_json(files, capsys):
    f = files("p.pi", "new x.(out(a,x) | out(b,h(x)))")
    code, out, _ = run(capsys, "lts", f, "--bounds", "depth=0", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data["states"]) == 4 and len(data["edges"]) == 4
    assert not data["tainted"]


def test_indep_reports_pairs(files, capsys):
    f = files("p.pi", "new x.(out(a,x) | out(b,h(x)))")
    code, out, _ = run(capsys, "indep", f, "--bounds", "depth=0", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["events"] == ["(^a(0l), 0[])", "(^b(1l), 1[])"]
    assert data["pairs"][0]["indep_loc"] and data["pairs"][0]["indep_event"]


# --- static-equiv ----------------------------------------------------------


def test_static_equiv_frames(files, capsys):
    f1 = files("f1.frame", "new x\n0l = x\n1l = h(x)\n")
    f2 = files("f2.frame", "new x, y\n0l = x\n1l = y\n")
    code, out, _ = run(capsys, "static-equiv", f1, f2, "--bounds", "static=2")
    assert code == 1
    data = json.loads(out)
    assert not data["equivalent"]
    assert {data["witness"]["m"], data["witness"]["n"]} == {"h(0l)", "1l"}


def test_static_equiv_test_flag(files, capsys):
    f1 = files("f1.frame", "new x\n0l = x\n1l = h(x)\n")
    code, out, _ = run(capsys, "static-equiv", f1, f1, "--test", "h(0l) = 1l")
    assert code == 0
    assert json.loads(out) == {"test": "h(0l) = 1l", "holds_left": True, "holds_right": True}


def test_static_equiv_public_vs_private(files, capsys):
    public = files("pub.frame", "l = x\n")
    private = files("priv.frame", "new y\nl = y\n")
    code, out, _ = run(capsys, "static-equiv", public, private, "--test", "l = x")
    assert code == 1
    assert json.loads(out) == {"test": "l = x", "holds_left": True, "holds_right": False}


# --- check -----------------------------------------------------------------


def test_check_related_exit_zero(files, capsys):
    l = files("l.pi", "new x,y,z.out(a,x).(out(b,y) | out(c,z))")
    r = files("r.pi", "new x,y,z.(out(a,x).out(b,y) | out(c,z))")
    code, out, _ = run(capsys, "check", "sim-st", l, r, "--bounds", "depth=1")
    assert code == 0 and "RELATED_EXACT" in out


def test_check_distinguished_exit_one_and_witness(files, capsys, tmp_path):
    l = files("l.pi", "new x.out(a,x) | new x.out(a,x)")
    r = files("r.pi", "new x.out(a,x).new x.out(a,x)")
    wit = str(tmp_path / "w.json")
    code, out, _ = run(capsys, "check", "sim-st", l, r, "--bounds", "depth=1", "--witness", wit)
    assert code == 1 and "DISTINGUISHED" in out and "replay ok" in out
    data = json.loads(open(wit).read())
    assert data["relation"] == "sim-st" and data["witness"]["kind"] == "lead"

    code, out, _ = run(capsys, "explain", wit)
    assert code == 0 and "leads with" in out


def test_check_json_format(files, capsys):
    l = files("l.pi", "out(a, m)")
    r = files("r.pi", "0")
    code, out, _ = run(capsys, "check", "bisim-i", l, r, "--bounds", "depth=0", "--format", "json")
    assert code == 1
    data = json.loads(out)
    assert data["verdict_class"] == "DISTINGUISHED" and data["witness_replay"] is True


def test_check_theory_preset(files, capsys):
    l = files("l.pi", "new k,m.out(a, enc(m, k)).out(a, k)")
    code, out, _ = run(capsys, "check", "sim-i", l, l, "--theory", "dolev-yao", "--bounds", "depth=0,static=1")
    assert code == 0


def test_check_theory_file(files, capsys):
    t = files("t.rw", "unwrap(wrap(x)) -> x\n")
    l = files("l.pi", "new m.out(a, wrap(m))")
    code, out, _ = run(capsys, "check", "sim-i", l, l, "--theory", t, "--bounds", "depth=1")
    assert code == 0


def test_check_st_exhaustive_flag(files, capsys):
    l = files("l.pi", "new x.out(a,x) | new x.out(a,x)")
    r = files("r.pi", "new x.out(a,x).new x.out(a,x)")
    code, _, _ = run(capsys, "check", "sim-st", l, r, "--bounds", "depth=1", "--st-exhaustive")
    assert code == 1


# --- diamonds / corpus -----------------------------------------------------


def test_diamonds_clean(files, capsys):
    f = files("p.pi", "new x,y.(out(a,x) | out(b,y))")
    code, out, _ = run(capsys, "diamonds", f, "--bounds", "depth=0")
    assert code == 0 and "0 diamond violations" in out


def test_corpus_subset_deterministic(files, capsys):
    sub = files(
        "sub.json",
        json.dumps(
            {
                "cases": [
                    {
                        "name": "two-outputs-sim-st",
                        "relation": "sim-st",
                        "expected": "DISTINGUISHED",
                        "left": "new x.out(a,x) | new x.out(a,x)",
                        "right": "new x.out(a,x).new x.out(a,x)",
                        "bounds": {"recipe_depth": 1, "static_depth": 1},
                    }
                ]
            }
        ),
    )
    code1, out1, _ = run(capsys, "corpus", "--path", sub, "--format", "json")
    code2, out2, _ = run(capsys, "corpus", "--path", sub, "--format", "json")
    assert code1 == code2 == 0
    assert out1 == out2  # byte-identical without timings
    assert json.loads(out1)["passed"] == 1


def test_corpus_failure_is_reported_not_crash(files, capsys):
    sub = files(
        "bad.json",
        json.dumps(
            {
                "cases": [
                    {
                        "name": "broken",
                        "relation": "sim-i",
                        "expected": "RELATED_EXACT",
                        "left": "out(a",
                        "right": "0",
                    }
                ]
            }
        ),
    )
    code, out, _ = run(capsys, "corpus", "--path", sub)
    assert code == 1 and "FAIL broken" in out
