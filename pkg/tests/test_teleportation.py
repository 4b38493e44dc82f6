import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from telefid.qubit import bell_basis, bloch_to_ket, is_density, pauli, random_su2, su2_to_so3, unitary_from_axis_angle
from telefid.teleportation import (
    ConfigError,
    ProtocolConfig,
    WernerChannel,
    pauli_set,
    random_config,
    state_fidelity,
    teleport_closed,
    teleport_dense,
    werner_state,
    xi,
)

from conftest import random_bloch, uniform_x_config


def teleport_by_projectors(v, config, p):
    """Second dense route: 8x8 projector sandwich, then partial trace over qubits 1, 2."""
    rho = np.kron(np.outer(bloch_to_ket(v), bloch_to_ket(v).conj()), werner_state(p))
    out = np.zeros((2, 2), dtype=complex)
    for psi, V in zip(bell_basis(config.U), config.V):
        proj = np.kron(np.outer(psi, psi.conj()), np.eye(2))
        corr = np.kron(np.eye(4), V)
        full = corr @ proj @ rho @ proj @ corr.conj().T
        out += np.einsum("ijaijb->ab", full.reshape((2,) * 6))
    return out


def test_werner_examples():
    bell = np.zeros((4, 4))
    bell[np.ix_([0, 3], [0, 3])] = 0.5
    assert np.allclose(werner_state(1.0), bell, atol=1e-15)
    assert np.allclose(werner_state(0.0), np.eye(4) / 4, atol=1e-15)
    ev = np.sort(np.linalg.eigvalsh(werner_state(1 / 3)))
    assert np.allclose(ev, [1 / 6, 1 / 6, 1 / 6, 1 / 2], atol=1e-12)


@pytest.mark.parametrize("p", [-0.1, 1.01, float("nan")])
def test_werner_rejects_bad_p(p):
    with pytest.raises(ValueError):
        werner_state(p)
    with pytest.raises(ValueError):
        WernerChannel(p)


def test_werner_is_density(rng):
    for p in rng.uniform(size=20):
        assert is_density(werner_state(p))


def test_dense_perfect_teleportation():
    out = teleport_dense([0, 0, 1], ProtocolConfig.optimal(), 1.0)
    assert np.allclose(out, [[1, 0], [0, 0]], atol=1e-12)


def test_dense_pure_noise_erases_input(rng):
    for _ in range(10):
        out = teleport_dense(random_bloch(rng), random_config(rng), 0.0)
        assert np.allclose(out, np.eye(2) / 2, atol=1e-12)


def test_dense_sigma_x_flip(sigma_x_config):
    out = teleport_dense([0, 0, 1], sigma_x_config, 1.0)
    assert np.allclose(out, [[0, 0], [0, 1]], atol=1e-12)


def test_closed_examples(sigma_x_config):
    assert np.allclose(teleport_closed([1, 0, 0], sigma_x_config, 1.0), 0.5 * np.ones((2, 2)), atol=1e-12)
    out = teleport_closed([0, 0, 1], ProtocolConfig.optimal(), 0.5)
    assert np.allclose(out, np.diag([0.75, 0.25]), atol=1e-12)
    assert np.allclose(teleport_dense([0, 0, 1], ProtocolConfig.optimal(), 0.5), out, atol=1e-12)


def test_dense_matches_closed_on_examples(sigma_x_config):
    cases = [([0, 0, 1], ProtocolConfig.optimal(), 1.0), ([0, 0, 1], sigma_x_config, 1.0),
             ([1, 0, 0], sigma_x_config, 1.0), ([0, 0, 1], ProtocolConfig.optimal(), 0.5)]
    for v, cfg, p in cases:
        assert np.max(np.abs(teleport_dense(v, cfg, p) - teleport_closed(v, cfg, p))) <= 1e-12


def test_dense_matches_closed_random(rng):
    for _ in range(100):
        v, cfg, p = random_bloch(rng), random_config(rng), rng.uniform()
        assert np.max(np.abs(teleport_dense(v, cfg, p) - teleport_closed(v, cfg, p))) <= 1e-10


def test_partial_inner_product_equals_projector_route(rng):
    for _ in range(10):
        v, cfg, p = random_bloch(rng), random_config(rng), rng.uniform()
        assert np.max(np.abs(teleport_dense(v, cfg, p) - teleport_by_projectors(v, cfg, p))) <= 1e-12


def test_output_is_density(rng):
    for _ in range(50):
        v, cfg, p = random_bloch(rng), random_config(rng), rng.uniform()
        assert is_density(teleport_dense(v, cfg, p))
        assert is_density(teleport_closed(v, cfg, p))


def test_invalid_measurement_rejected():
    P = pauli_set()
    with pytest.raises(ConfigError):
        ProtocolConfig([P[0], P[0], P[1], P[2]], P)
    with pytest.raises(ConfigError):
        ProtocolConfig(P, [P[0], P[1], P[2], np.array([[1, 1], [0, 1]])])
    with pytest.raises(ConfigError):
        teleport_dense([0, 0, 1], "not a config", 0.5)
    with pytest.raises(ConfigError):
        ProtocolConfig.permuted([0, 0, 1, 2])


def test_xi_examples(rng):
    for _ in range(5):
        assert xi(random_bloch(rng), np.eye(2)) == pytest.approx(1, abs=1e-12)
    assert xi([0, 0, 1], pauli(1)) == pytest.approx(0, abs=1e-15)
    X = unitary_from_axis_angle([1, 0, 0], math.pi / 2)  # exp(-i pi/4 sigma_x)
    assert xi([0, 0, 1], X) == pytest.approx(math.cos(math.pi / 4) ** 2, abs=1e-12)


def test_xi_bloch_form(rng):
    for _ in range(200):
        v, X = random_bloch(rng), random_su2(rng)
        R = su2_to_so3(X).matrix
        assert xi(v, X) == pytest.approx(0.5 * (1 + v @ R @ v), abs=1e-12)


def test_state_fidelity_examples(sigma_x_config):
    assert state_fidelity([0, 0, 1], ProtocolConfig.optimal(), 0.5) == pytest.approx(0.75, abs=1e-12)
    assert state_fidelity([0, 0, 1], sigma_x_config, 1.0) == pytest.approx(0, abs=1e-12)
    assert state_fidelity([1, 0, 0], sigma_x_config, 1.0) == pytest.approx(1, abs=1e-12)


def test_state_fidelity_is_overlap_with_dense_output(rng):
    for _ in range(50):
        v, cfg, p = random_bloch(rng), random_config(rng), rng.uniform()
        ket = bloch_to_ket(v)
        overlap = np.real(ket.conj() @ teleport_dense(v, cfg, p) @ ket)
        assert state_fidelity(v, cfg, p) == pytest.approx(overlap, abs=1e-12)


def test_state_fidelity_range(rng):
    for _ in range(200):
        v, cfg, p = random_bloch(rng), random_config(rng), rng.uniform()
        f = state_fidelity(v, cfg, p)
        assert (1 - p) / 2 - 1e-12 <= f <= (1 + p) / 2 + 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.lists(st.floats(0, 2 * math.pi), min_size=8, max_size=8))
def test_phase_invariance(seed, phases):
    rng = np.random.default_rng(seed)
    cfg = random_config(rng)
    v, p = random_bloch(rng), rng.uniform()
    shifted = ProtocolConfig([np.exp(1j * c) * u for c, u in zip(phases[:4], cfg.U)],
                             [np.exp(1j * c) * w for c, w in zip(phases[4:], cfg.V)])
    assert np.max(np.abs(teleport_closed(v, cfg, p) - teleport_closed(v, shifted, p))) <= 1e-12


def test_config_derived_quantities():
    cfg = ProtocolConfig.permuted([1, 0, 3, 2])
    for X in cfg.X:
        R = su2_to_so3(X)
        assert R.trace == pytest.approx(-1, abs=1e-12)
        assert np.allclose(np.abs(R.matrix), np.diag([1, 1, 1]), atol=1e-12)
        assert R.matrix[0, 0] == pytest.approx(1)
    assert ProtocolConfig.optimal() == ProtocolConfig(pauli_set(), pauli_set())
