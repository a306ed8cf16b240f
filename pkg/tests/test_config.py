"""Configuration parsing, the expression grammar, and problem building."""

import math

import numpy as np
import pytest

import fracbvp as fb
from fracbvp.config import build_problem, load_phi_table, parse_config
from fracbvp.errors import ConfigurationError
from fracbvp.expressions import compile_expression

BASE = """\
alpha = 2.5
beta = 4
eta = 0.3333333333333333
phi = sqrt_half
f = example42
mode = uniqueness
"""


def test_parse_defaults():
    cfg = parse_config(BASE)
    assert cfg.alpha == 2.5
    assert cfg.grid_size == 1024
    assert cfg.tol == 1e-16
    assert cfg.max_iter == 100
    assert cfg.mode == "uniqueness"
    assert cfg.items[0] == ("alpha", "2.5")


@pytest.mark.parametrize("line,fragment", [
    ("bogus = 1", "unknown key"),
    ("alpha = fast", "'alpha'"),
    ("grid_size = 32", "'grid_size'"),
    ("grid_size = 129", "'grid_size'"),
    ("tol = 0", "'tol'"),
    ("max_iter = 0", "'max_iter'"),
    ("mode = sideways", "'mode'"),
    ("alpha = 2.5", "duplicate"),
])
def test_parse_diagnostics_name_the_key(line, fragment):
    with pytest.raises(ConfigurationError, match=fragment):
        parse_config(BASE + line + "\n")


def test_parse_missing_required():
    with pytest.raises(ConfigurationError, match="'alpha'"):
        parse_config("beta = 1\neta = 0.5\nphi = identity\nf = zero\n")
    with pytest.raises(ConfigurationError, match="'phi'"):
        parse_config("alpha = 2.5\nbeta = 1\neta = 0.5\nf = zero\n")
    with pytest.raises(ConfigurationError, match="'f'"):
        parse_config("alpha = 2.5\nbeta = 1\neta = 0.5\nphi = identity\n")


def test_parse_expression_requirements():
    with pytest.raises(ConfigurationError, match="f.expr"):
        parse_config("alpha = 2.5\nbeta = 1\neta = 0.5\nphi = identity\nf = custom-expression\n")
    with pytest.raises(ConfigurationError, match="phi.table"):
        parse_config("alpha = 2.5\nbeta = 1\neta = 0.5\nphi = table\nf = zero\n")


def test_parse_not_key_value():
    with pytest.raises(ConfigurationError, match="key = value"):
        parse_config("alpha: 2.5\n")


def test_expression_example42_form():
    expr = compile_expression(
        "0.1*tan(pi/3*t)*cos(u)^2 - (1/3)*exp(t/2)*abs(u)/(1+abs(u))")
    ts = np.linspace(0.0, 1.0, 17)
    us = np.linspace(-2.0, 2.0, 17)
    expected = (0.1 * np.tan(np.pi / 3 * ts) * np.cos(us) ** 2
                - np.exp(0.5 * ts) / 3.0 * np.abs(us) / (1 + np.abs(us)))
    assert np.max(np.abs(expr(ts, us) - expected)) <= 1e-15


def test_expression_operators():
    expr = compile_expression("-t^2 + pow(u, 3) - 2*t*u + +1")
    assert float(expr(2.0, 3.0)) == pytest.approx(-4.0 + 27.0 - 12.0 + 1.0, abs=1e-14)
    assert float(compile_expression("2**3")(0.0, 0.0)) == 8.0
    assert float(compile_expression("sin(pi/2)")(0.0, 0.0)) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("text", [
    "", "t +", "sin()", "sin(t, u)", "pow(t)", "t ? u", "q + 1", "log(t)", "(t",
    "1 2",
])
def test_expression_rejections(text):
    with pytest.raises(ConfigurationError):
        compile_expression(text)


def test_build_problem_example41_slope(problem41):
    # linear in the state with a slope fixed by the kernel constants
    k = problem41.kernel
    p = k.params
    slope = k.mu * fb.gamma(p.alpha) / (
        16.0 * math.sqrt(2.0) * k.deriv_one * k.shifted_one ** (p.alpha - 1.0))
    us = np.linspace(0.0, 3.0, 7)
    assert np.max(np.abs(problem41.spec.f(0.3, us) - slope * us)) <= 1e-15
    assert float(problem41.spec.f(0.5, 0.0)) == 0.0
    assert problem41.spec.f_domain == "nonnegative"
    assert float(problem41.spec.g(0.2)) == pytest.approx(slope, rel=1e-14)


def test_build_problem_example42_envelope(problem42):
    ts = np.linspace(0.0, 1.0, 11)
    expected = 0.2 * np.tan(np.pi / 3 * ts) + np.exp(0.5 * ts) / 3.0
    assert np.max(np.abs(problem42.spec.g(ts) - expected)) <= 1e-15
    assert problem42.spec.f_domain == "real"


def test_build_problem_zero_and_custom():
    cfg = parse_config("alpha = 2.5\nbeta = 0.5\neta = 0.5\nphi = identity\nf = zero\n")
    prob = build_problem(cfg)
    assert float(prob.spec.f(0.3, 4.0)) == 0.0
    cfg = parse_config(
        "alpha = 2.5\nbeta = 0.5\neta = 0.5\nphi = identity\n"
        "f = custom-expression\nf.expr = t + u\n"
        "g = custom-expression\ng.expr = 1 + 0*t\nf.domain = nonnegative\n")
    prob = build_problem(cfg)
    assert float(prob.spec.f(0.25, 0.5)) == 0.75
    assert float(prob.spec.g(0.9)) == 1.0
    assert prob.spec.f_domain == "nonnegative"


def test_load_phi_table(tmp_path):
    path = tmp_path / "tab.csv"
    path.write_text("# comment\n0,0\n0.25,0.3\n0.75,0.8\n1,1\n")
    table = load_phi_table(path)
    assert table.shape == (4, 2)
    with pytest.raises(ConfigurationError, match="two columns"):
        bad = tmp_path / "bad.csv"
        bad.write_text("0,0,0\n")
        load_phi_table(bad)
    with pytest.raises(ConfigurationError, match="cannot read"):
        load_phi_table(tmp_path / "absent.csv")


def test_table_config_resolves_relative_path(tmp_path):
    table = tmp_path / "ident.csv"
    ts = np.linspace(0.0, 1.0, 9)
    table.write_text("\n".join(f"{float(t)!r},{float(t)!r}" for t in ts) + "\n")
    cfg_path = tmp_path / "prob.cfg"
    cfg_path.write_text(
        "alpha = 2.5\nbeta = 0.5\neta = 0.5\nphi = table\nphi.table = ident.csv\nf = zero\n")
    from fracbvp.config import load_config
    prob = build_problem(load_config(cfg_path))
    assert float(prob.params.phi(0.5)) == 0.5
