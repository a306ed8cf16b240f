"""Shared fixtures: the two bundled example problems and small grids."""

from __future__ import annotations

import numpy as np
import pytest

import fracbvp as fb
from fracbvp.cli import bundled_config_path
from fracbvp.config import build_problem, load_config


def gamma_quadrature_oracle(x: float) -> float:
    """Independent gamma via trapezoid quadrature of the defining integral.

    Substituting t = exp(z) turns the integral into one of
    exp(x*z - exp(z)) over the real line, whose double-exponential decay
    makes the trapezoid rule accurate to rounding on a wide window.
    """
    lo, hi, n = -90.0, 8.0, 400001
    z = np.linspace(lo, hi, n)
    h = (hi - lo) / (n - 1)
    vals = np.exp(x * z - np.exp(z))
    return float((vals.sum() - 0.5 * (vals[0] + vals[-1])) * h)


@pytest.fixture(scope="session")
def phi_identity():
    return fb.phi_catalog("identity")


@pytest.fixture(scope="session")
def phi_sin():
    return fb.phi_catalog("sin_quarter_pi")


@pytest.fixture(scope="session")
def phi_sqrt():
    return fb.phi_catalog("sqrt_half")


@pytest.fixture(scope="session")
def problem41():
    return build_problem(load_config(bundled_config_path("example41")))


@pytest.fixture(scope="session")
def problem42():
    return build_problem(load_config(bundled_config_path("example42")))


@pytest.fixture(scope="session")
def kernel41(problem41):
    return problem41.kernel


@pytest.fixture(scope="session")
def kernel42(problem42):
    return problem42.kernel


@pytest.fixture(scope="session")
def grid256_41(problem41):
    return problem41.grid(256)


@pytest.fixture(scope="session")
def grid256_42(problem42):
    return problem42.grid(256)


@pytest.fixture(scope="session")
def matrix256_41(kernel41, grid256_41):
    return fb.operator_matrix(kernel41, grid256_41)


@pytest.fixture(scope="session")
def matrix256_42(kernel42, grid256_42):
    return fb.operator_matrix(kernel42, grid256_42)


@pytest.fixture(scope="session")
def classical_kernel():
    params = fb.BvpParams(alpha=3.0, beta=0.0, eta=0.5, phi=fb.phi_catalog("identity"))
    return fb.build_kernel(params)
