"""Single-qubit linear algebra and the SU(2) -> SO(3) rotation map.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Global phases of
unitaries are left untouched; everything built on top is phase invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

STRUCT_TOL = 1e-10
BLOCH_TOL = 1e-12
AXIS_SIN_CUTOFF = 1e-6

_PAULIS = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
for _m in _PAULIS:
    _m.setflags(write=False)

# |Psi_0> = (|00> + |11>)/sqrt(2)
PSI0 = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
PSI0.setflags(write=False)


def pauli(index: int) -> np.ndarray:
    """Return the Pauli operator for ``index`` (0 -> identity, 1..3 -> x, y, z)."""
    if isinstance(index, bool) or not isinstance(index, (int, np.integer)) or not 0 <= index <= 3:
        raise ValueError(f"Pauli index must be 0, 1, 2 or 3, got {index!r}")
    return _PAULIS[int(index)].copy()


def sigma_vector() -> np.ndarray:
    """Stack of (sigma_x, sigma_y, sigma_z), shape (3, 2, 2)."""
    return np.array(_PAULIS[1:])


def is_unitary(X: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        return False
    return bool(np.max(np.abs(X.conj().T @ X - np.eye(X.shape[0]))) <= tol)


def is_density(rho: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if abs(np.trace(rho) - 1) > tol:
        return False
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        return False
    return bool(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)) >= -tol)


def _require_unitary(X: np.ndarray, what: str = "matrix") -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if not is_unitary(X):
        raise ValueError(f"{what} is not unitary")
    return X


def as_bloch(v: Sequence[float]) -> np.ndarray:
    """Validate and return a unit Bloch vector as a float array of shape (3,)."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"Bloch vector must have 3 components, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1) > BLOCH_TOL:
        raise ValueError(f"Bloch vector must be unit norm, got |v| = {np.linalg.norm(v)!r}")
    return v


def bloch_to_density(v: Sequence[float]) -> np.ndarray:
    v = as_bloch(v)
    return 0.5 * (_PAULIS[0] + np.einsum("k,kij->ij", v, sigma_vector()))


def density_to_bloch(rho: np.ndarray) -> np.ndarray:
    """Bloch vector Tr(rho sigma_k) of a qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    return np.real(np.einsum("ij,kji->k", rho, sigma_vector()))


def bloch_to_ket(v: Sequence[float]) -> np.ndarray:
    """A state vector |phi> with |phi><phi| = bloch_to_density(v), up to phase."""
    x, y, z = as_bloch(v)
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def unitary_from_axis_angle(axis: Sequence[float], angle: float) -> np.ndarray:
    """cos(angle/2) I - i sin(angle/2) (n . sigma), with n the normalized axis.

    Axes that are not unit length are normalized; a zero axis is rejected.
    """
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,):
        raise ValueError(f"axis must have 3 components, got shape {n.shape}")
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        raise ValueError("rotation axis must be nonzero")
    n = n / norm
    return (np.cos(angle / 2) * _PAULIS[0]
            - 1j * np.sin(angle / 2) * np.einsum("k,kij->ij", n, sigma_vector()))


def axis_angle_from_unitary(X: np.ndarray) -> tuple[np.ndarray, float]:
    """Inverse of :func:`unitary_from_axis_angle` modulo global phase.

    Returns ``(axis, angle)`` with ``angle`` in [0, pi]. When the angle is zero
    the axis is arbitrary and (0, 0, 1) is returned.
    """
    X = _require_unitary(X, "X")
    W = X / np.sqrt(np.linalg.det(X))
    a = 0.5 * np.real(np.trace(W))
    b = np.array([0.5 * np.real(1j * np.trace(W @ s)) for s in _PAULIS[1:]])
    if a < 0:
        a, b = -a, -b
    nb = np.linalg.norm(b)
    angle = 2.0 * np.arctan2(nb, a)
    if nb < 1e-15:
        return np.array([0.0, 0.0, 1.0]), 0.0
    return b / nb, float(angle)


@dataclass(frozen=True)
class Rotation3:
    """A proper rotation of R^3 with trace, angle and (optional) axis accessors."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"rotation matrix must be 3x3, got {m.shape}")
        if np.max(np.abs(m.T @ m - np.eye(3))) > STRUCT_TOL:
            raise ValueError("matrix is not orthogonal")
        if abs(np.linalg.det(m) - 1) > STRUCT_TOL:
            raise ValueError("matrix is not a proper rotation (det != 1)")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    @property
    def angle(self) -> float:
        return float(np.arccos(np.clip((self.trace - 1) / 2, -1.0, 1.0)))

    @property
    def axis(self) -> Optional[np.ndarray]:
        """Unit rotation axis, or ``None`` when |sin(angle)| is too small to resolve it."""
        if abs(np.sin(self.angle)) < AXIS_SIN_CUTOFF:
            return None
        m = self.matrix
        w = np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
        return w / np.linalg.norm(w)

    def __matmul__(self, other: "Rotation3") -> "Rotation3":
        return Rotation3(self.matrix @ other.matrix)


def su2_to_so3(X: np.ndarray) -> Rotation3:
    """Rotation R with X (v . s) X^dag = (R v) . s, i.e. R_jk = Tr(s_j X s_k X^dag) / 2.

    This orientation makes the map a homomorphism and sends
    exp(-i theta/2 n.s) to the right-handed rotation by theta about n. The
    transposed convention Tr(X s_j X^dag s_k) / 2 gives the same traces and
    quadratic forms phi^T R phi.
    """
    X = _require_unitary(X, "X")
    s = sigma_vector()
    conj = np.einsum("ab,kbc,dc->kad", X, s, X.conj())
    R = 0.5 * np.real(np.einsum("jda,kad->jk", s, conj))
    return Rotation3(R)


def bell_basis(U: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Measurement states (U_a x I)|Psi_0> for the four unitaries in ``U``."""
    if len(U) != 4:
        raise ValueError(f"need four measurement unitaries, got {len(U)}")
    out = []
    for a, u in enumerate(U):
        u = _require_unitary(u, f"U[{a}]")
        out.append(np.kron(u, _PAULIS[0]) @ PSI0)
    return out


def validate_measurement(U: Sequence[np.ndarray], tol: float = STRUCT_TOL) -> bool:
    """True iff Tr(U_a^dag U_b)/2 = delta_ab, i.e. the Bell-type states are orthonormal."""
    if len(U) != 4:
        return False
    U = [np.asarray(u, dtype=complex) for u in U]
    if not all(is_unitary(u) for u in U):
        return False
    gram = np.array([[0.5 * np.trace(a.conj().T @ b) for b in U] for a in U])
    return bool(np.max(np.abs(gram - np.eye(4))) <= tol)


def random_su2(rng: np.random.Generator) -> np.ndarray:
    """Haar-random SU(2) element from a uniformly random unit quaternion."""
    q = rng.normal(size=4)
    a, b, c, d = q / np.linalg.norm(q)
    return np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])
