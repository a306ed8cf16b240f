"""Black-box command-line tests: exit codes, CSV schemas, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from fracbvp.cli import bundled_config_path, main

E41 = str(bundled_config_path("example41"))
E42 = str(bundled_config_path("example42"))


def read_csv(path):
    rows = []
    header = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line
                continue
            rows.append([float(p) for p in line.split(",")])
    return header, np.asarray(rows)


def test_check_example41_exists_positive(capsys):
    code = main(["check", E41, "--grid", "256"])
    out = capsys.readouterr().out
    assert code == 0
    assert "exists-positive" in out


def test_check_example42_unique(capsys):
    code = main(["check", E42, "--grid", "256"])
    out = capsys.readouterr().out
    assert code == 0
    assert "unique-solution" in out


def test_check_json_structure(capsys):
    code = main(["check", E42, "--grid", "256", "--json"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["certificate"]["verdict"] == "unique-solution"
    assert payload["kernel"]["positivity_ok"] is True


def test_check_beta_above_bound_exits_2(tmp_path, capsys):
    text = open(E42).read().replace("beta = 4", "beta = 6")
    cfg = tmp_path / "beta6.cfg"
    cfg.write_text(text)
    code = main(["check", str(cfg), "--grid", "256"])
    out = capsys.readouterr().out
    assert code == 2
    assert "no-certificate" in out
    assert "beta_below_bound" in out


def test_check_solve_only_mode_rejected(tmp_path, capsys):
    cfg = tmp_path / "so.cfg"
    cfg.write_text("alpha = 2.5\nbeta = 1\neta = 0.5\nphi = identity\nf = zero\nmode = solve-only\n")
    assert main(["check", str(cfg)]) == 1


def test_malformed_config_exits_1(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("alpha = 2.5\nbogus_key = 1\n")
    code = main(["check", str(cfg)])
    err = capsys.readouterr().err
    assert code == 1
    assert "bogus_key" in err


def test_missing_config_exits_1(capsys):
    assert main(["check", "/nonexistent/x.cfg"]) == 1


def test_solve_zero_f_writes_zero_csv(tmp_path, capsys):
    cfg = tmp_path / "zero.cfg"
    cfg.write_text("alpha = 2.5\nbeta = 1\neta = 0.5\nphi = identity\nf = zero\n"
                   "mode = solve-only\ngrid_size = 128\n")
    out = tmp_path / "zero.csv"
    code = main(["solve", str(cfg), "-o", str(out)])
    capsys.readouterr()
    assert code == 0
    header, data = read_csv(out)
    assert header == "t,u"
    assert data.shape == (256, 2)
    assert np.all(data[:, 1] == 0.0)
    assert (tmp_path / "zero.report.txt").exists()


def test_solve_example42_and_roundtrip(tmp_path, capsys):
    out = tmp_path / "e42.csv"
    code = main(["solve", E42, "-o", str(out), "--grid", "256"])
    capsys.readouterr()
    assert code == 0
    header, data = read_csv(out)
    assert header == "t,u"
    # written floats parse back to the exact in-memory values
    again = tmp_path / "again.csv"
    assert main(["solve", E42, "-o", str(again), "--grid", "256"]) == 0
    capsys.readouterr()
    assert open(out).read() == open(again).read()
    report = (tmp_path / "e42.report.txt").read_text()
    assert "certified:unique-solution" in report


def test_solve_mu_zero_exits_1(tmp_path, capsys):
    cfg = tmp_path / "mu0.cfg"
    cfg.write_text("alpha = 3\nbeta = 2\neta = 1\nphi = identity\nf = zero\nmode = solve-only\n")
    code = main(["solve", str(cfg), "-o", str(tmp_path / "x.csv")])
    err = capsys.readouterr().err
    assert code == 1
    assert "mu != 0" in err


def test_solve_nonconvergence_exits_3_with_partial_output(tmp_path, capsys):
    cfg = tmp_path / "div.cfg"
    cfg.write_text("alpha = 2.5\nbeta = 4\neta = 0.3333333333333333\nphi = sqrt_half\n"
                   "f = custom-expression\nf.expr = 200*u + 1\nmode = solve-only\n"
                   "grid_size = 128\nmax_iter = 10\n")
    out = tmp_path / "div.csv"
    code = main(["solve", str(cfg), "-o", str(out)])
    capsys.readouterr()
    assert code == 3
    assert out.exists()
    report = (tmp_path / "div.report.txt").read_text()
    assert "converged             False" in report
    assert "best-effort" in report


def test_table_phi_identity_reproduces_builtin(tmp_path, capsys):
    ts = np.linspace(0.0, 1.0, 33)
    table = tmp_path / "ident.csv"
    table.write_text("\n".join(f"{float(t)!r},{float(t)!r}" for t in ts) + "\n")
    base = ("alpha = 2.5\nbeta = 0.5\neta = 0.5\nf = custom-expression\n"
            "f.expr = t + 1\nmode = solve-only\ngrid_size = 128\n")
    cfg_a = tmp_path / "builtin.cfg"
    cfg_a.write_text(base + "phi = identity\n")
    cfg_b = tmp_path / "table.cfg"
    cfg_b.write_text(base + "phi = table\nphi.table = ident.csv\n")
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["solve", str(cfg_a), "-o", str(out_a)]) == 0
    assert main(["solve", str(cfg_b), "-o", str(out_b)]) == 0
    capsys.readouterr()
    _, data_a = read_csv(out_a)
    _, data_b = read_csv(out_b)
    assert np.array_equal(data_a, data_b)


def test_green_small_resolution(tmp_path, capsys):
    out = tmp_path / "g.csv"
    code = main(["green", E41, "-o", str(out), "--resolution", "3"])
    capsys.readouterr()
    assert code == 0
    header, data = read_csv(out)
    assert header == "t,s,G"
    assert data.shape == (9, 3)
    t0_rows = data[data[:, 0] == 0.0]
    assert np.all(t0_rows[:, 2] == 0.0)
    text = open(out).read()
    assert "# mu:" in text and "# beta_bound:" in text


def test_green_classical_spot_value(tmp_path, capsys):
    cfg = tmp_path / "cls.cfg"
    cfg.write_text("alpha = 3\nbeta = 0\neta = 0.5\nphi = identity\nf = zero\nmode = solve-only\n")
    out = tmp_path / "g.csv"
    assert main(["green", str(cfg), "-o", str(out), "--resolution", "5"]) == 0
    capsys.readouterr()
    _, data = read_csv(out)
    row = data[(data[:, 0] == 0.5) & (data[:, 1] == 0.25)]
    assert row.shape == (1, 3)
    assert row[0, 2] == pytest.approx(0.0625, abs=1e-12)


def test_green_interior_positive_example42(tmp_path, capsys):
    out = tmp_path / "g200.csv"
    assert main(["green", E42, "-o", str(out), "--resolution", "200"]) == 0
    capsys.readouterr()
    _, data = read_csv(out)
    interior = data[(data[:, 0] > 0) & (data[:, 0] < 1) & (data[:, 1] > 0) & (data[:, 1] < 1)]
    assert np.all(interior[:, 2] > 0.0)


def test_green_bad_resolution(tmp_path, capsys):
    assert main(["green", E41, "-o", str(tmp_path / "g.csv"), "--resolution", "1"]) == 1


def test_green_json_payload(tmp_path, capsys):
    out = tmp_path / "g.csv"
    assert main(["green", E41, "-o", str(out), "--resolution", "4", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["resolution"] == 4
    assert payload["mu"] == pytest.approx(0.22703, abs=1e-4)
    assert out.exists()


def test_solve_json_payload(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["solve", E42, "-o", str(out), "--grid", "128", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["converged"] is True
    assert payload["certificate"]["verdict"] == "unique-solution"
    assert payload["fixed_point_residual"] <= 1e-6


def test_verify_paper_passes_and_is_deterministic(capsys):
    assert main(["verify-paper"]) == 0
    first = capsys.readouterr().out
    assert main(["verify-paper"]) == 0
    second = capsys.readouterr().out
    assert first == second
    for token in ("2.95903", "0.22703", "5.60946", "0.0346236", "0.895984", "1.95333"):
        assert token in first


def test_verify_paper_json(capsys):
    assert main(["verify-paper", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["all_within_tolerance"] is True
    assert payload["tolerance"] == 1e-4
    assert len(payload["rows"]) == 6
    assert all(row["abs_diff"] <= 1e-4 for row in payload["rows"])


def test_seed_env_var_accepted(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("FRACBVP_SEED", "777")
    assert main(["check", E41, "--grid", "256"]) == 0
    out = capsys.readouterr().out
    assert "seed: 777" in out
    monkeypatch.setenv("FRACBVP_SEED", "not-a-number")
    assert main(["check", E41, "--grid", "256"]) == 1


def test_usage_error_exits_1(capsys):
    assert main(["frobnicate"]) == 1


def test_console_entrypoint_subprocess():
    proc = subprocess.run([sys.executable, "-m", "fracbvp", "verify-paper"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "all within" in proc.stdout
