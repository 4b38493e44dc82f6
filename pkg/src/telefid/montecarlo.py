"""Brute-force Haar-average oracle for the closed forms in :mod:`telefid.measures`.

Inputs are drawn uniformly on the Bloch sphere by inverse transform (z uniform
on [-1, 1], azimuth uniform on [0, 2 pi)). Sampling is split into fixed-size
chunks, each with its own generator keyed by ``(seed, chunk_index)``, and the
per-chunk moments are merged in chunk order. Estimates therefore do not depend
on how many worker threads evaluated the chunks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .qubit import Rotation3
from .teleportation import ChannelLike, ConfigError, ProtocolConfig, as_channel

DEFAULT_CHUNK = 65536
MIN_SAMPLES = 100
THREADS_ENV = "TELEFID_THREADS"


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    n_samples: int
    chunk_size: int = DEFAULT_CHUNK

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if int(self.n_samples) < MIN_SAMPLES:
            raise ValueError(f"n_samples must be at least {MIN_SAMPLES}, got {self.n_samples!r}")
        if int(self.chunk_size) <= 0:
            raise ValueError(f"chunk_size must be positive, got {self.chunk_size!r}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "n_samples", int(self.n_samples))
        object.__setattr__(self, "chunk_size", min(int(self.chunk_size), int(self.n_samples)))

    @property
    def n_chunks(self) -> int:
        return -(-self.n_samples // self.chunk_size)

    def chunk_rng(self, index: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(index,)))

    def chunk_len(self, index: int) -> int:
        return min(self.chunk_size, self.n_samples - index * self.chunk_size)


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    n: int

    def agrees_with(self, target: float, n_sigma: float = 3.0) -> bool:
        return abs(self.mean - target) <= n_sigma * self.std_error + 1e-12


@dataclass(frozen=True)
class Moments:
    """Count, mean and central sums M2, M3, M4 of a sample (mergeable)."""

    n: int
    mean: float
    m2: float
    m3: float
    m4: float

    @classmethod
    def from_values(cls, x: np.ndarray) -> "Moments":
        x = np.asarray(x, dtype=float)
        # shift by the first value so a constant sample gives exact zeros
        shift = x[0]
        d = x - shift
        mean = shift + d.mean()
        c = d - d.mean()
        c2 = c * c
        return cls(len(x), float(mean), float(c2.sum()), float((c2 * c).sum()), float((c2 * c2).sum()))

    def merge(self, other: "Moments") -> "Moments":
        na, nb = self.n, other.n
        n = na + nb
        delta = other.mean - self.mean
        d_n = delta / n
        mean = self.mean + nb * d_n
        m2 = self.m2 + other.m2 + delta * d_n * na * nb
        m3 = (self.m3 + other.m3 + delta * d_n * d_n * na * nb * (na - nb)
              + 3 * d_n * (na * other.m2 - nb * self.m2))
        m4 = (self.m4 + other.m4
              + delta * d_n ** 3 * na * nb * (na * na - na * nb + nb * nb)
              + 6 * d_n * d_n * (na * na * other.m2 + nb * nb * self.m2)
              + 4 * d_n * (na * other.m3 - nb * self.m3))
        return Moments(n, mean, m2, m3, m4)

    @property
    def variance(self) -> float:
        """Population variance (divisor n)."""
        return max(self.m2, 0.0) / self.n

    @property
    def raw_moment2(self) -> float:
        return self.variance + self.mean ** 2

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def mean_estimate(self) -> Estimate:
        sd = math.sqrt(max(self.m2, 0.0) / (self.n - 1))
        return Estimate(self.mean, sd / math.sqrt(self.n), self.n)

    def std_estimate(self) -> Estimate:
        """Sample deviation with a delta-method standard error.

        Var(m2) ~ (mu4 - mu2^2)/n and d sqrt(v) = dv / (2 sqrt(v)).
        """
        s = self.std
        if s == 0.0:
            return Estimate(0.0, 0.0, self.n)
        mu2 = self.variance
        mu4 = self.m4 / self.n
        var_m2 = max(mu4 - mu2 * mu2, 0.0) / self.n
        return Estimate(s, math.sqrt(var_m2) / (2 * s), self.n)


def worker_count() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def _chunk_angles(sampler: SamplerConfig, index: int) -> tuple[np.ndarray, np.ndarray]:
    rng = sampler.chunk_rng(index)
    m = sampler.chunk_len(index)
    z = rng.uniform(-1.0, 1.0, size=m)
    azimuth = rng.uniform(0.0, 2 * np.pi, size=m)
    return z, azimuth


def _bloch_from_angles(z: np.ndarray, azimuth: np.ndarray) -> np.ndarray:
    rho = np.sqrt(np.clip(1 - z * z, 0.0, None))
    return np.stack([rho * np.cos(azimuth), rho * np.sin(azimuth), z], axis=1)


def _ket_products(z: np.ndarray, azimuth: np.ndarray):
    """|k0|^2, |k1|^2 and conj(k0) k1 for |phi> = (cos(t/2), e^{i azimuth} sin(t/2))."""
    half_sin = 0.5 * np.sqrt(np.clip(1 - z * z, 0.0, None))
    cross = half_sin * np.cos(azimuth) + 1j * (half_sin * np.sin(azimuth))
    return (1 + z) / 2, (1 - z) / 2, cross


def sample_bloch(sampler: SamplerConfig) -> np.ndarray:
    """All sampled Bloch vectors, shape (n_samples, 3), in chunk order."""
    parts = [_bloch_from_angles(*_chunk_angles(sampler, i)) for i in range(sampler.n_chunks)]
    return np.concatenate(parts, axis=0)


def accumulate(sampler: SamplerConfig, integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
               workers: Optional[int] = None) -> Moments:
    """Moments of ``integrand(z, azimuth)`` over the sampled inputs."""
    workers = worker_count() if workers is None else workers

    def run(i: int) -> Moments:
        return Moments.from_values(integrand(*_chunk_angles(sampler, i)))

    indices = range(sampler.n_chunks)
    if workers <= 1 or sampler.n_chunks == 1:
        parts = [run(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, indices))
    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    return total


def _fidelity_integrand(config: ProtocolConfig, channel: ChannelLike):
    if not isinstance(config, ProtocolConfig):
        raise ConfigError(f"expected a ProtocolConfig, got {type(config).__name__}")
    p = as_channel(channel).p
    X = np.array(config.X)[:, :, :, None]

    def f(z, azimuth):
        w0, w1, cross = _ket_products(z, azimuth)
        # <phi|X_a|phi> for every sample, shape (4, n)
        overlaps = w0 * X[:, 0, 0] + w1 * X[:, 1, 1] + cross * X[:, 0, 1] + cross.conj() * X[:, 1, 0]
        xi = overlaps.real ** 2 + overlaps.imag ** 2
        return p / 4 * xi.sum(axis=0) + (1 - p) / 2

    return f


def mc_fidelity_moments(config: ProtocolConfig, channel: ChannelLike, sampler: SamplerConfig,
                        workers: Optional[int] = None) -> Moments:
    return accumulate(sampler, _fidelity_integrand(config, channel), workers)


def mc_average_fidelity(config: ProtocolConfig, channel: ChannelLike, sampler: SamplerConfig,
                        workers: Optional[int] = None) -> Estimate:
    return mc_fidelity_moments(config, channel, sampler, workers).mean_estimate()


def mc_fidelity_deviation(config: ProtocolConfig, channel: ChannelLike, sampler: SamplerConfig,
                          workers: Optional[int] = None) -> Estimate:
    return mc_fidelity_moments(config, channel, sampler, workers).std_estimate()


def _quadratic_form(R, phi: np.ndarray) -> np.ndarray:
    M = R.matrix if isinstance(R, Rotation3) else np.asarray(R, dtype=float)
    return np.einsum("ni,ij,nj->n", phi, M, phi)


def mc_moment2(R: Rotation3, sampler: SamplerConfig, workers: Optional[int] = None) -> Estimate:
    """Estimate of the sphere average of phi^T R phi."""
    def g(z, azimuth):
        return _quadratic_form(R, _bloch_from_angles(z, azimuth))

    return accumulate(sampler, g, workers).mean_estimate()


def mc_moment4(R_a: Rotation3, R_b: Rotation3, sampler: SamplerConfig,
               workers: Optional[int] = None) -> Estimate:
    """Estimate of the sphere average of (phi^T R_a phi)(phi^T R_b phi)."""
    def g(z, azimuth):
        phi = _bloch_from_angles(z, azimuth)
        return _quadratic_form(R_a, phi) * _quadratic_form(R_b, phi)

    return accumulate(sampler, g, workers).mean_estimate()
