import json
import math

import numpy as np
import pytest

from pdmsusy.cli import fmt_float, main, parse_sweep

pytestmark = pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, (json.loads(out) if out else None), err


def test_float_format():
    assert fmt_float(1.5) == "1.50000000000000e+00"
    assert fmt_float(-0.0) == "0.00000000000000e+00"
    assert fmt_float(math.inf) == "inf"
    assert fmt_float(1 / 3) == "3.33333333333333e-01"


def test_parse_sweep_forms():
    assert parse_sweep("alpha=0.1,0.2") == ("alpha", (0.1, 0.2))
    assert parse_sweep("alpha=0:1:3") == ("alpha", (0.0, 0.5, 1.0))


def test_list_json(capsys):
    code, doc, _ = run_json(capsys, "list")
    assert code == 0
    assert len(doc["rows"]) == 13 and sum(r["active"] for r in doc["rows"]) == 10


def test_list_plain_shows_exclusion_reasons(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    for reason in ("no_positive_f", "no_bound_states"):
        assert reason in out


def test_unknown_format_is_a_usage_error(capsys):
    code, out, err = run(capsys, "list", "--format", "xml")
    assert code == 2 and out == "" and "usage" in err


@pytest.mark.parametrize("argv", [
    ("spectrum",),
    ("wavefunction", "--model", "box"),
    ("sweep", "--model", "box"),
    ("spectrum", "--model", "box", "--param", "alpha"),
    ("spectrum", "--model", "box", "--levels", "0"),
    ("bogus",),
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_spectrum_box(capsys):
    code, doc, _ = run_json(capsys, "spectrum", "--model", "box", "--param", "alpha=0.5", "--levels", "3")
    assert code == 0
    assert [(r["n"], r["E"]) for r in doc["rows"]] == [(0, 1.5), (1, 6.0), (2, 13.5)]
    assert doc["meta"]["model"] == "box" and doc["meta"]["params"] == {"alpha": 0.5}


def test_spectrum_carries_derived_quantities(capsys):
    _, doc, _ = run_json(capsys, "spectrum", "--model", "trig_pt")
    assert "derived" in doc["meta"]


def test_spectrum_coulomb_footer(capsys):
    code, out, _ = run(capsys, "spectrum", "--model", "coulomb", "--param", "e2=1", "--param", "l=0",
                       "--param", "alpha=0.1", "--levels", "5", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    header = lines.index("n,E")
    assert len([ln for ln in lines[header + 1:] if not ln.startswith("#")]) == 3
    assert lines[-1] == "# count=3"


def test_window_violation_exits_3(capsys):
    code, out, err = run(capsys, "spectrum", "--model", "shifted_osc", "--param", "alpha=0.04", "--param", "beta=0.2")
    assert code == 3 and out == ""
    assert "α > β² ≥ 0" in err


def test_unknown_parameter_is_rejected(capsys):
    assert run(capsys, "spectrum", "--model", "box", "--param", "gamma=1")[0] == 3


def test_excluded_model_exits_3(capsys):
    assert run(capsys, "spectrum", "--model", "scarf2")[0] == 3


def test_wavefunction_hyperbolic_trailer(capsys):
    code, doc, _ = run_json(capsys, "wavefunction", "--model", "hyperbolic_pt", "--n", "0")
    assert code == 0
    meta = doc["meta"]
    assert meta["hermiticity_ok"] is False and meta["l2_ok"] is True
    assert max(meta["boundary_limit_lo"], meta["boundary_limit_hi"]) > 0


def test_wavefunction_box_first_excited_has_one_node(capsys):
    code, doc, _ = run_json(capsys, "wavefunction", "--model", "box", "--n", "1")
    assert code == 0
    psi = np.array([r["psi"] for r in doc["rows"]])
    assert int(np.sum(np.diff(np.sign(psi[psi != 0])) != 0)) == 1
    assert doc["meta"]["nodes"] == 1


def test_wavefunction_undeformed_box_is_cosine(capsys):
    _, doc, _ = run_json(capsys, "wavefunction", "--model", "box", "--param", "alpha=0", "--n", "0")
    x = np.array([r["x"] for r in doc["rows"]])
    psi = np.array([r["psi"] for r in doc["rows"]])
    scale = psi @ np.cos(x) / (np.cos(x) @ np.cos(x))
    assert np.max(np.abs(psi - scale * np.cos(x))) <= 1e-8 * np.max(np.abs(psi))


@pytest.mark.parametrize("argv", [
    ("--model", "box", "--param", "alpha=0.5", "--levels", "3"),
    ("--model", "trig_pt", "--param", "A=2", "--param", "alpha=0.3", "--levels", "4"),
])
def test_verify_passes(capsys, argv):
    code, doc, _ = run_json(capsys, "verify", *argv, "--grid", "4096")
    assert code == 0 and doc["meta"]["passed"] is True
    assert doc["meta"]["max_rel_error"] < 1e-6


def test_corrupted_spectrum_exits_4(capsys):
    code, doc, err = run_json(capsys, "verify", "--model", "box", "--corrupt-spectrum", "1.01")
    assert code == 4 and doc["meta"]["passed"] is False and "verification failed" in err


def test_sweep_coulomb_counts(capsys):
    code, doc, _ = run_json(capsys, "sweep", "--model", "coulomb", "--param", "e2=1", "--param", "l=0",
                            "--sweep", "alpha=0.05,0.1,0.2,0.5")
    assert code == 0
    # the strict inequality (n+1)^2 < e2/alpha enumerates 4 levels at alpha = 0.05
    assert [r["count"] for r in doc["rows"]] == [4, 3, 2, 1]


def test_sweep_eckart_infinite(capsys):
    _, doc, _ = run_json(capsys, "sweep", "--model", "eckart", "--sweep", "alpha=-2,0.5")
    assert doc["rows"][0]["count"] == "inf" and doc["rows"][1]["count"] == 1


def test_sweep_outside_window_emits_nothing(capsys):
    code, out, _ = run(capsys, "sweep", "--model", "coulomb", "--sweep", "alpha=0.1,-0.5")
    assert code == 3 and out == ""


def test_width_one_sweep_equals_spectrum(capsys):
    _, sweep, _ = run_json(capsys, "sweep", "--model", "box", "--sweep", "alpha=0.5", "--levels", "3")
    _, spec, _ = run_json(capsys, "spectrum", "--model", "box", "--param", "alpha=0.5", "--levels", "3")
    row = sweep["rows"][0]
    assert [row[f"E{k}"] for k in range(3)] == [r["E"] for r in spec["rows"]]
    assert row["count"] == spec["meta"]["count"]


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# box run\nmodel=box\nalpha=0.25\nlevels=2\nformat=csv\n", encoding="utf-8")
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg))
    assert code == 0 and "1.25000000000000e+00" in out
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--param", "alpha=0.5", "--format", "json")
    doc = json.loads(out)
    assert doc["rows"][0]["E"] == 1.5 and len(doc["rows"]) == 2


def test_bad_config_file_is_usage_error(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("model box\n", encoding="utf-8")
    assert run(capsys, "spectrum", "--config", str(cfg))[0] == 2
    assert run(capsys, "spectrum", "--config", str(tmp_path / "missing.cfg"))[0] == 2


@pytest.mark.parametrize("fmt", ["csv", "json", "plain"])
def test_output_is_byte_identical(capsys, fmt):
    argv = ("wavefunction", "--model", "morse", "--n", "1", "--format", fmt)
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second and first


def test_out_file_uses_lf(capsys, tmp_path):
    target = tmp_path / "spec.csv"
    assert run(capsys, "spectrum", "--model", "box", "--format", "csv", "--out", str(target))[0] == 0
    data = target.read_bytes()
    assert b"\r\n" not in data and data.endswith(b"\n")
    assert b"n,E\n" in data
