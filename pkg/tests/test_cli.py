import json

import pytest

from qline.cli import main, pi_label


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("expr, q, expected", [
    ("x*L", "3/2", "3/2*L^1*x^1"),
    ("e1(L)", "3/2", "0"),
    ("star(star(x))", "3/2", "x"),
    ("e1(x^3)", "2", "14*L^1*x^3"),
])
def test_eval(capsys, expr, q, expected):
    code, out, _ = run(capsys, "eval", expr, "--q", q)
    assert code == 0 and out.strip() == expected


@pytest.mark.parametrize("argv", [("eval", "x*("), ("eval", "x", "--q", "1/2"), ("verify", "bogus"),
                                  ("nosuch",), ("distance", "flat")])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_parse_error_position(capsys):
    _, _, err = run(capsys, "eval", "x*(")
    assert "1:4" in err


def test_verify_starbar(capsys):
    code, out, _ = run(capsys, "verify", "starbar", "--beta", "1", "--betabar", "-1")
    assert code == 0
    assert "PASS  starbar  c1=1" in out


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "lambdax", "--format", "json")
    assert code == 0 and json.loads(out)["passed"] is True


def test_verify_all_reports_each_suite(capsys):
    code, out, _ = run(capsys, "verify", "all")
    lines = out.strip().splitlines()
    assert lines[-1].endswith("passed")
    # the non-local continuity suite is the only failing group
    failing = [l for l in lines if l.startswith("FAIL")]
    assert failing and all("nonlocal continuity" in l for l in failing)
    assert code == 1


def test_dispersion_summary(capsys, tmp_path):
    path = tmp_path / "d.csv"
    code, out, _ = run(capsys, "dispersion", "--m", "0", "--samples", "100", "--out", str(path))
    assert code == 0
    assert out.strip() == "max E = 1.000000 at k = π/2"
    assert path.read_text().splitlines()[0] == "k,E,E_phonon"


def test_dispersion_single_row(capsys):
    code, out, err = run(capsys, "dispersion", "--m", "0.5", "--samples", "3", "--kmax", "0")
    rows = out.strip().splitlines()
    assert code == 0 and len(rows) == 2
    assert rows[1].split(",")[1] == "5.000000000000e-01"


@pytest.mark.parametrize("metric, units, value", [("local", "planck", "1.000000000000e+00"),
                                                  ("local", "laboratory", "3.333333333333e-01"),
                                                  ("nonlocal", "planck", None)])
def test_distance_table(capsys, metric, units, value):
    code, out, _ = run(capsys, "distance", metric, "--units", units, "--window", "-6..6",
                       "--format", "csv")
    rows = out.strip().splitlines()
    assert code == 0 and rows[0] == "k,ds"
    if value:
        assert all(r.split(",")[1] == value for r in rows[1:])


def test_rep_export(capsys):
    code, out, _ = run(capsys, "rep", "L", "--window", "-4..4", "--format", "csv")
    assert code == 0 and out.splitlines()[1] == "-3,-4,1.000000000000e+00,0.000000000000e+00"


def test_oscillator_json(capsys, tmp_path):
    path = tmp_path / "o.json"
    code, _, err = run(capsys, "oscillator", "--z", "0.25", "--z", "0.2", "--z", "0.15",
                       "--include-cr", "--out", str(path))
    data = json.loads(path.read_text())
    assert data["z"] == [0.25, 0.2, 0.15]
    assert data["include_cr"] is True
    assert data["laplacian_constants"] == [0.0, 0.0, 0.0]
    assert code == (0 if all(data["passed"].values()) else 1)
    assert "identities=PASS" in err


def test_oscillator_halfwidth_check(capsys):
    code, _, err = run(capsys, "oscillator", "--z", "0.1", "--halfwidth", "10")
    assert code == 2 and "halfwidth" in err


@pytest.mark.parametrize("k, text", [(0.0, "0"), (1.5707963267948966, "π/2"), (3.141592653589793, "π"),
                                     (0.3, "0.300000")])
def test_pi_label(k, text):
    assert pi_label(k) == text


def test_output_deterministic(capsys):
    a = run(capsys, "verify", "connections", "--format", "json")[1]
    b = run(capsys, "verify", "connections", "--format", "json")[1]
    assert a == b
