"""Command-line interface: exit codes, JSON schema, determinism."""

import json
import os

import pytest

from medbounds.cli import main

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
S1 = os.path.join(FIXTURES, "setting1_example.csv")
S2 = os.path.join(FIXTURES, "setting2_example.csv")
DET = os.path.join(FIXTURES, "setting1_deterministic.csv")

JSON_KEYS = [
    "schema_version",
    "setting",
    "estimand",
    "family",
    "assumptions",
    "point",
    "lower",
    "upper",
    "provenance",
]


def run(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_bounds_json_schema_and_determinism(capsys):
    argv = ["bounds", "--setting", "1", "--counts", S1,
            "--estimand", "sde", "--arm", "1", "--json"]
    rc, out1, _ = run(capsys, argv)
    assert rc == 0
    rc, out2, _ = run(capsys, argv)
    assert rc == 0
    assert out1 == out2  # byte-identical repeat runs
    report = json.loads(out1)
    assert list(report) == JSON_KEYS
    assert report["schema_version"] == "1"
    assert report["setting"] == 1
    assert report["estimand"] == "SDE(1)"
    assert report["family"] == "sjolander-sde"
    assert report["assumptions"] == "randomization"
    assert report["provenance"] == "paper-form"
    assert report["lower"] <= report["point"] <= report["upper"]


def test_bounds_deterministic_table(capsys):
    rc, out, _ = run(capsys, ["bounds", "--setting", "1", "--counts", DET,
                              "--estimand", "sde", "--arm", "1"])
    assert rc == 0
    report = json.loads(out)
    assert report["lower"] == 1.0
    assert report["upper"] == 1.0
    assert report["point"] == 1.0


def test_bounds_text_matches_json(capsys):
    base = ["bounds", "--setting", "2", "--counts", S2,
            "--estimand", "sie", "--arm", "0"]
    rc, out_json, _ = run(capsys, base + ["--json"])
    assert rc == 0
    rc, out_text, _ = run(capsys, base + ["--text"])
    assert rc == 0
    report = json.loads(out_json)
    lines = dict(
        line.split(":", 1) for line in out_text.strip().splitlines()
    )
    lo, hi = lines["bounds"].strip().strip("[]").split(",")
    assert float(lo) == report["lower"]
    assert float(hi) == report["upper"]
    assert lines["family"].strip() == report["family"] == "gabriel-sie"


def test_bounds_lp_family(capsys):
    base = ["bounds", "--setting", "1", "--counts", S1, "--estimand", "sde",
            "--arm", "0"]
    rc, out_auto, _ = run(capsys, base)
    rc2, out_lp, _ = run(capsys, base + ["--family", "lp"])
    assert rc == rc2 == 0
    auto = json.loads(out_auto)
    lp = json.loads(out_lp)
    assert lp["family"] == "lp" and lp["provenance"] == "lp"
    # the closed family is the exact LP envelope
    assert lp["lower"] == auto["lower"] and lp["upper"] == auto["upper"]


def test_bounds_provenance_by_arm(capsys):
    for arm, want in (("0", "paper-form"), ("1", "arm-symmetry")):
        rc, out, _ = run(capsys, ["bounds", "--setting", "1", "--counts", S1,
                                  "--estimand", "nde-frechet", "--arm", arm])
        assert rc == 0
        assert json.loads(out)["provenance"] == want
    rc, out, _ = run(capsys, ["bounds", "--setting", "2", "--counts", S2,
                              "--estimand", "nde-tchetgen", "--arm", "1"])
    assert json.loads(out)["provenance"] == "paper-form"
    rc, out, _ = run(capsys, ["bounds", "--setting", "2", "--counts", S2,
                              "--estimand", "nde-tchetgen", "--arm", "0"])
    assert json.loads(out)["provenance"] == "arm-symmetry"


def test_bounds_estimand_unavailable(capsys):
    rc, _, err = run(capsys, ["bounds", "--setting", "1", "--counts", S1,
                              "--estimand", "nde-tchetgen", "--arm", "1"])
    assert rc == 1
    assert "not available" in err


def test_bounds_widen_undefined(capsys, tmp_path):
    path = tmp_path / "lopsided.csv"
    path.write_text("a,m,y,n\n0,0,0,15\n0,1,0,15\n1,0,0,30\n")
    base = ["bounds", "--setting", "1", "--counts", str(path),
            "--estimand", "nde-frechet", "--arm", "0"]
    rc, _, err = run(capsys, base)
    assert rc == 1
    assert err  # the reason is reported
    rc, out, _ = run(capsys, base + ["--widen-undefined"])
    assert rc == 0
    report = json.loads(out)
    assert report["point"] is None
    assert (report["lower"], report["upper"]) == (0.0, 0.5)


def test_derive_term_counts(capsys):
    for arm in ("0", "1"):
        rc, out, _ = run(capsys, ["derive", "--setting", "1",
                                  "--estimand", "sde", "--arm", arm])
        assert rc == 0
        assert "terms: 3 lower, 3 upper" in out
        assert f"SDE({arm})" in out


def test_derive_te_identified(capsys):
    rc, out, _ = run(capsys, ["derive", "--setting", "1", "--estimand", "te"])
    assert rc == 0
    assert "TE = " in out
    assert "terms: 1 lower, 1 upper" in out


def test_derive_latex(capsys):
    rc, out, _ = run(capsys, ["derive", "--setting", "1", "--estimand", "sie",
                              "--arm", "0", "--format", "latex"])
    assert rc == 0
    assert "p_{" in out


def test_derive_budget_exhausted(capsys):
    rc, _, err = run(capsys, ["derive", "--setting", "1", "--estimand", "sde",
                              "--arm", "1", "--budget", "1"])
    assert rc == 3
    assert "budget exceeded" in err
    assert "constraints_processed" in err


def test_simulate_deterministic(capsys, tmp_path):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    rc, out, _ = run(capsys, ["simulate", "--setting", "2", "--n", "25",
                              "--seed", "3", "--out", str(p1)])
    assert rc == 0
    assert out.splitlines()[0].startswith("records written: ")
    assert "lower_frechet_tighter:" in out
    rc, _, _ = run(capsys, ["simulate", "--setting", "2", "--n", "25",
                            "--seed", "3", "--out", str(p2)])
    assert rc == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_simulate_rejects_setting1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--setting", "1", "--n", "5", "--seed", "0",
              "--out", "/tmp/never.csv"])
    assert exc.value.code == 1


def test_validate_ok(capsys):
    rc, out, _ = run(capsys, ["validate", "--setting", "1", "--n", "25",
                              "--seed", "0", "--suite", "validity"])
    assert rc == 0
    assert "-> ok" in out


def test_ci_json_deterministic(capsys):
    argv = ["ci", "--setting", "1", "--counts", S1, "--estimand", "sde",
            "--arm", "1", "--replicates", "150", "--alpha", "0.1", "--seed", "5"]
    rc, out1, _ = run(capsys, argv)
    assert rc == 0
    rc, out2, _ = run(capsys, argv)
    assert out1 == out2
    report = json.loads(out1)
    assert report["schema_version"] == "1"
    assert report["family"] == "sjolander-sde"
    assert report["replicates"] == 150
    assert report["n_undefined"] == 0
    lo, hi = report["point"]
    assert report["lower_ci"][0] <= lo <= report["lower_ci"][1]
    assert report["upper_ci"][0] <= hi <= report["upper_ci"][1]


def test_missing_counts_file(capsys):
    rc, _, err = run(capsys, ["bounds", "--setting", "1", "--counts",
                              "/nonexistent/zzz.csv", "--estimand", "sde",
                              "--arm", "0"])
    assert rc == 1
    assert err


def test_bad_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bounds", "--setting", "3", "--counts", S1,
              "--estimand", "sde", "--arm", "0"])
    assert exc.value.code == 1
