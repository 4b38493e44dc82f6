"""Qubit teleportation through a Werner channel.

Qubit layout is 1 (input) x 2 (Alice's half of the pair) x 3 (Bob's half),
with Kronecker products taken in that order. Alice measures qubits 1 and 2 in
the basis (U_a x I)|Psi_0>; on outcome a Bob applies V_a to qubit 3. Outcome
branches are summed unnormalized, which gives the outcome-averaged state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .qubit import (
    PSI0,
    Rotation3,
    as_bloch,
    bell_basis,
    bloch_to_density,
    bloch_to_ket,
    is_unitary,
    pauli,
    random_su2,
    su2_to_so3,
    validate_measurement,
)


class ConfigError(ValueError):
    """Raised for a protocol configuration that does not define a valid measurement."""


@dataclass(frozen=True)
class WernerChannel:
    p: float

    def __post_init__(self):
        p = float(self.p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"Werner parameter p must lie in [0, 1], got {self.p!r}")
        object.__setattr__(self, "p", p)


ChannelLike = Union[WernerChannel, float]


def as_channel(channel: ChannelLike) -> WernerChannel:
    return channel if isinstance(channel, WernerChannel) else WernerChannel(channel)


@dataclass(frozen=True, eq=False)
class ProtocolConfig:
    """Measurement unitaries ``U`` and correction unitaries ``V`` (four each).

    Derived quantities: ``X[a] = V[a] @ U[a]^dag`` and ``R[a] = su2_to_so3(X[a])``.
    """

    U: tuple = field()
    V: tuple = field()

    def __post_init__(self):
        U = tuple(np.array(u, dtype=complex) for u in self.U)
        V = tuple(np.array(v, dtype=complex) for v in self.V)
        if len(U) != 4 or len(V) != 4:
            raise ConfigError("a protocol needs exactly four U and four V unitaries")
        for name, ops in (("U", U), ("V", V)):
            for a, m in enumerate(ops):
                if m.shape != (2, 2) or not is_unitary(m):
                    raise ConfigError(f"{name}[{a}] is not a 2x2 unitary")
                m.setflags(write=False)
        if not validate_measurement(U):
            raise ConfigError("measurement unitaries U do not form an orthonormal Bell-type basis")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "V", V)

    @cached_property
    def X(self) -> tuple:
        return tuple(v @ u.conj().T for u, v in zip(self.U, self.V))

    @cached_property
    def R(self) -> tuple[Rotation3, ...]:
        return tuple(su2_to_so3(x) for x in self.X)

    @classmethod
    def optimal(cls, U: Sequence[np.ndarray] | None = None) -> "ProtocolConfig":
        """V = U, so every X is the identity. Defaults to the Pauli measurement."""
        U = pauli_set() if U is None else list(U)
        return cls(tuple(U), tuple(U))

    @classmethod
    def permuted(cls, perm: Sequence[int], U: Sequence[np.ndarray] | None = None) -> "ProtocolConfig":
        """Outcome a triggers the correction meant for outcome perm[a]."""
        perm = tuple(int(k) for k in perm)
        if sorted(perm) != [0, 1, 2, 3]:
            raise ConfigError(f"{perm} is not a permutation of 0..3")
        U = pauli_set() if U is None else list(U)
        return cls(tuple(U), tuple(U[k] for k in perm))

    def __eq__(self, other):
        if not isinstance(other, ProtocolConfig):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.U + self.V, other.U + other.V))

    __hash__ = None


def pauli_set() -> list[np.ndarray]:
    return [pauli(k) for k in range(4)]


def random_config(rng: np.random.Generator) -> ProtocolConfig:
    """Random valid configuration: U_a = A sigma_a B with Haar A, B; Haar V_a."""
    A, B = random_su2(rng), random_su2(rng)
    U = tuple(A @ pauli(k) @ B for k in range(4))
    V = tuple(random_su2(rng) for _ in range(4))
    return ProtocolConfig(U, V)


def werner_state(channel: ChannelLike) -> np.ndarray:
    p = as_channel(channel).p
    bell = np.outer(PSI0, PSI0.conj())
    return p * bell + (1 - p) * np.eye(4) / 4


def _check_config(config) -> ProtocolConfig:
    if not isinstance(config, ProtocolConfig):
        raise ConfigError(f"expected a ProtocolConfig, got {type(config).__name__}")
    return config


def teleport_dense(input_state: Sequence[float], config: ProtocolConfig,
                   channel: ChannelLike) -> np.ndarray:
    """Simulate the protocol on the full three-qubit state.

    Each branch <Psi_a| rho |Psi_a> is a partial inner product over qubits 1
    and 2, leaving an operator on qubit 3; Bob's correction is applied and the
    branches are summed.
    """
    config = _check_config(config)
    rho = np.kron(bloch_to_density(input_state), werner_state(channel))
    # indices: (a1, a2, a3, b1, b2, b3)
    rho = rho.reshape((2,) * 6)
    out = np.zeros((2, 2), dtype=complex)
    for psi, V in zip(bell_basis(config.U), config.V):
        psi = psi.reshape(2, 2)
        branch = np.einsum("ij,ijaklb,kl->ab", psi.conj(), rho, psi)
        out += V @ branch @ V.conj().T
    return out


def teleport_closed(input_state: Sequence[float], config: ProtocolConfig,
                    channel: ChannelLike) -> np.ndarray:
    config = _check_config(config)
    p = as_channel(channel).p
    target = bloch_to_density(input_state)
    mixed = sum(X @ target @ X.conj().T for X in config.X)
    return p / 4 * mixed + (1 - p) / 2 * np.eye(2)


def xi(input_state: Sequence[float], X: np.ndarray) -> float:
    """|<phi|X|phi>|^2 for the pure state with Bloch vector ``input_state``."""
    if not is_unitary(X):
        raise ValueError("X is not unitary")
    ket = bloch_to_ket(input_state)
    return float(abs(ket.conj() @ np.asarray(X) @ ket) ** 2)


def state_fidelity(input_state: Sequence[float], config: ProtocolConfig,
                   channel: ChannelLike) -> float:
    """Overlap <phi|rho_phi|phi> of the teleported state with the input."""
    config = _check_config(config)
    p = as_channel(channel).p
    as_bloch(input_state)
    return p / 4 * sum(xi(input_state, X) for X in config.X) + (1 - p) / 2
