import numpy as np
import pytest

from telefid.qubit import pauli, unitary_from_axis_angle
from telefid.teleportation import ProtocolConfig, pauli_set

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_bloch(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def uniform_x_config(X):
    """Pauli measurement with V_a = X U_a, so every composite X_a equals X."""
    U = pauli_set()
    return ProtocolConfig(U, [X @ u for u in U])


def sphere_quadrature(n_z=8, n_az=16):
    """Product rule on the unit sphere, exact for polynomials up to degree 2*n_z - 1 in z
    and trigonometric degree n_az - 1 in the azimuth. Weights sum to 1."""
    z, wz = np.polynomial.legendre.leggauss(n_z)
    az = 2 * np.pi * np.arange(n_az) / n_az
    Z, A = np.meshgrid(z, az, indexing="ij")
    rho = np.sqrt(1 - Z ** 2)
    pts = np.stack([rho * np.cos(A), rho * np.sin(A), Z], axis=-1).reshape(-1, 3)
    w = (np.repeat(wz, n_az) / 2 / n_az)
    return pts, w


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def sigma_x_config():
    return uniform_x_config(pauli(1))


@pytest.fixture
def axis_angle():
    return unitary_from_axis_angle
