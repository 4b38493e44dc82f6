"""Closed-form average fidelity and fidelity deviation with their bounds.

Every Haar integral over input states is reduced to traces of the composite
rotations R_a through Schur's lemma on R^3 and on R^3 x R^3.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .qubit import Rotation3
from .teleportation import ChannelLike, ConfigError, ProtocolConfig, as_channel

SQRT5 = math.sqrt(5.0)
RADICAND_CLAMP = 1e-12

P_SEPARABLE = 1 / 3
P_CHSH = 1 / math.sqrt(2)
P_LHV_LOWER = 0.6829
P_LHV_UPPER = 0.6964
F_CLASSICAL = 2 / 3


class ConsistencyError(ArithmeticError):
    """A quantity that is nonnegative in exact arithmetic came out clearly negative."""


class ChannelClass(str, enum.Enum):
    SEPARABLE = "separable"
    ENTANGLED_LHV_BAND_BELOW = "entangled_LHV_band_below"
    LHV_UNKNOWN_BAND = "LHV_unknown_band"
    CHSH_VIOLATING = "CHSH_violating"


@dataclass(frozen=True)
class ThresholdConstants:
    p_separability: float = P_SEPARABLE
    p_CHSH: float = P_CHSH
    p_LHV_lower: float = P_LHV_LOWER
    p_LHV_upper: float = P_LHV_UPPER
    F_classical: float = F_CLASSICAL


THRESHOLDS = ThresholdConstants()


@dataclass(frozen=True)
class PerformancePoint:
    F: float
    D: float

    def __post_init__(self):
        if not 0.0 <= self.F <= 1.0:
            raise ValueError(f"F must lie in [0, 1], got {self.F}")
        if not 0.0 <= self.D <= 0.5:
            raise ValueError(f"D must lie in [0, 1/2], got {self.D}")
        if self.D ** 2 > self.F * (1 - self.F) + 1e-12:
            raise ValueError(f"D^2 = {self.D ** 2} exceeds F(1-F) = {self.F * (1 - self.F)}")


@dataclass(frozen=True)
class RegionTriangle:
    """Attainable (F, D) region for one Werner parameter."""

    p: float
    F_min: float
    F_max: float
    D_max: float

    @property
    def vertices(self) -> tuple[tuple[float, float], ...]:
        return ((self.F_max, 0.0), (self.F_min, 0.0), (self.F_min, self.D_max))

    def contains(self, F: float, D: float, slack: float = 1e-9) -> bool:
        if F < self.F_min - slack or F > self.F_max + slack or D < -slack:
            return False
        return D <= (self.F_max - F) / SQRT5 + slack


def _check_config(config) -> ProtocolConfig:
    if not isinstance(config, ProtocolConfig):
        raise ConfigError(f"expected a ProtocolConfig, got {type(config).__name__}")
    return config


def _matrix(R) -> np.ndarray:
    return R.matrix if isinstance(R, Rotation3) else np.asarray(R, dtype=float)


def average_fidelity(config: ProtocolConfig, channel: ChannelLike) -> float:
    config = _check_config(config)
    p = as_channel(channel).p
    return 0.5 + p / 24 * sum(R.trace for R in config.R)


def f_bounds(channel: ChannelLike) -> tuple[float, float]:
    """(F_min, F_max) over all protocols for the given channel."""
    p = as_channel(channel).p
    return (1 - p / 3) / 2, (1 + p) / 2


def delta(R: Rotation3) -> float:
    """Standard deviation of xi over Haar inputs for composite rotation R."""
    return (3 - float(np.trace(_matrix(R)))) / (6 * SQRT5)


@lru_cache(maxsize=None)
def swap_and_bell_projectors(r: int) -> tuple[np.ndarray, np.ndarray]:
    """The matrices D = |Omega><Omega| (Omega = sum_i x_i x x_i) and the swap P on R^r x R^r."""
    eye = np.eye(r)
    omega = sum(np.kron(eye[i], eye[i]) for i in range(r))
    D = np.outer(omega, omega)
    P = np.zeros((r * r, r * r))
    for i in range(r):
        for j in range(r):
            P += np.outer(np.kron(eye[j], eye[i]), np.kron(eye[i], eye[j]))
    D.setflags(write=False)
    P.setflags(write=False)
    return D, P


def schur_twirl_coefficients(X: np.ndarray, r: int = 3) -> tuple[float, float, float]:
    """Coefficients (a, b, c) with  int dO (O^T x O^T) X (O x O) = a I + b D + c P."""
    D, P = swap_and_bell_projectors(r)
    t, td, tp = np.trace(X), np.trace(X @ D), np.trace(X @ P)
    norm = r * (r - 1) * (r + 2)
    a = ((r + 1) * t - td - tp) / norm
    b = (-t + (r + 1) * td - tp) / norm
    c = (-t - td + (r + 1) * tp) / norm
    return float(a), float(b), float(c)


def haar_fourth_moment(R_a: Rotation3, R_b: Rotation3) -> float:
    """int dphi (phi^T R_a phi)(phi^T R_b phi) over the unit sphere.

    Writing phi = O e for a fixed unit e, the integrand is
    (e x e)^T (O x O)^T (R_a x R_b) (O x O) (e x e); after twirling only
    <e x e|(a I + b D + c P)|e x e> = a + b + c survives.
    """
    a, b, c = schur_twirl_coefficients(np.kron(_matrix(R_a), _matrix(R_b)), 3)
    return a + b + c


def covariance_element(R_a: Rotation3, R_b: Rotation3) -> float:
    """Haar covariance of xi_a and xi_b.

    Plain 3x3 arrays are accepted as well since the formula is bilinear.
    Equals [Tr A Tr B + Tr(A B^T) + Tr(A B)]/60 - Tr A Tr B / 36.
    """
    A, B = _matrix(R_a), _matrix(R_b)
    # canonical argument order makes the result bitwise symmetric
    if A.tobytes() > B.tobytes():
        A, B = B, A
    ta, tb = np.trace(A), np.trace(B)
    return float(0.25 * (haar_fourth_moment(A, B) - ta * tb / 9))


def covariance_matrix(rotations: Sequence[Rotation3],
                      covariance: Callable[[Rotation3, Rotation3], float] = covariance_element
                      ) -> np.ndarray:
    n = len(rotations)
    C = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            C[i, j] = C[j, i] = covariance(rotations[i], rotations[j])
    return C


def _sqrt_clamped(x: float) -> float:
    if x < 0:
        if x < -RADICAND_CLAMP:
            raise ConsistencyError(f"negative radicand {x!r}")
        return 0.0
    return math.sqrt(x)


def fidelity_deviation(config: ProtocolConfig, channel: ChannelLike,
                       covariance: Callable[[Rotation3, Rotation3], float] = covariance_element
                       ) -> float:
    """(p/4) sqrt(sum_ab c_ab).

    The covariance is bilinear and vanishes when either argument is the
    identity, so it is evaluated on R_a - I; this keeps D free of rounding
    noise near the universal (D = 0) configurations.
    """
    config = _check_config(config)
    p = as_channel(channel).p
    shifted = [R.matrix - np.eye(3) for R in config.R]
    return p / 4 * _sqrt_clamped(float(covariance_matrix(shifted, covariance).sum()))


def d_bounds(config: ProtocolConfig, channel: ChannelLike) -> tuple[float, float]:
    """(D_lower, D_upper) from the covariance bounds -d_a d_b / 2 <= c_ab <= d_a d_b."""
    config = _check_config(config)
    p = as_channel(channel).p
    d = np.array([delta(R) for R in config.R])
    off = d.sum() ** 2 - np.sum(d ** 2)
    radicand = float(np.sum(d ** 2) - 0.5 * off)
    lower = p / 4 * math.sqrt(max(radicand, 0.0))
    upper = p / 4 * float(d.sum())
    return lower, upper


def performance_point(config: ProtocolConfig, channel: ChannelLike) -> PerformancePoint:
    return PerformancePoint(average_fidelity(config, channel), fidelity_deviation(config, channel))


def region_triangle(channel: ChannelLike) -> RegionTriangle:
    p = as_channel(channel).p
    F_min, F_max = f_bounds(p)
    return RegionTriangle(p=p, F_min=F_min, F_max=F_max, D_max=2 * p / (3 * SQRT5))


def half_circle_bound(F: float) -> float:
    """sqrt(F(1-F)): no fidelity distribution with mean F has a larger deviation."""
    F = float(F)
    if not 0.0 <= F <= 1.0:
        raise ValueError(f"F must lie in [0, 1], got {F!r}")
    return math.sqrt(F * (1 - F))


def classify_channel(channel: ChannelLike) -> ChannelClass:
    p = as_channel(channel).p
    if p <= P_SEPARABLE:
        return ChannelClass.SEPARABLE
    if p > P_CHSH:
        return ChannelClass.CHSH_VIOLATING
    if P_LHV_LOWER <= p <= P_LHV_UPPER:
        return ChannelClass.LHV_UNKNOWN_BAND
    return ChannelClass.ENTANGLED_LHV_BAND_BELOW
