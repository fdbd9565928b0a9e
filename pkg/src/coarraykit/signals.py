"""Narrowband snapshot simulation and coarray pseudo snapshots.

Conventions, stated once:

* Bearings are degrees in the open interval (-90, 90), measured from
  broadside; with d = lambda/2 the steering phase at position p is
  exp(1j*pi*p*sin(theta)).
* Sources are uncorrelated circular complex Gaussians with per-source
  powers (default 1); noise is circular complex Gaussian with power
  mean(source powers) / 10^(snr_db/10).
* Randomness comes from numpy's PCG64 via ``default_rng(seed)``; a
  scenario seed fully determines the snapshot matrix, bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .coupling import CouplingModel, coupling_matrix
from .geometry import ArrayGeometry
from ._validation import check_bearings

__all__ = [
    "SourceScenario",
    "SnapshotMatrix",
    "steering_matrix",
    "simulate_snapshots",
    "sample_covariance",
    "analytic_covariance",
    "coarray_pseudo_snapshot",
]


@dataclass(frozen=True)
class SourceScenario:
    """Bearings, powers, SNR, snapshot count, and RNG seed for one trial."""

    bearings_deg: tuple[float, ...]
    snr_db: float
    snapshots: int
    seed: int = 0
    powers: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        bearings = check_bearings(self.bearings_deg)
        if any(x >= y for x, y in zip(bearings, bearings[1:])):
            raise ValueError("bearings must be strictly increasing")
        if int(self.snapshots) < 1:
            raise ValueError(f"snapshots must be >= 1, got {self.snapshots}")
        if self.powers is not None:
            powers = tuple(float(p) for p in self.powers)
            if len(powers) != len(bearings):
                raise ValueError("powers and bearings must have the same length")
            if any(p <= 0 for p in powers):
                raise ValueError("source powers must be positive")
            object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "bearings_deg", bearings)
        object.__setattr__(self, "snapshots", int(self.snapshots))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def num_sources(self) -> int:
        return len(self.bearings_deg)

    @property
    def source_powers(self) -> np.ndarray:
        if self.powers is None:
            return np.ones(self.num_sources)
        return np.asarray(self.powers)

    @property
    def noise_power(self) -> float:
        """Noise variance implied by the SNR: mean source power / 10^(snr/10)."""
        if math.isinf(self.snr_db) and self.snr_db > 0:
            return 0.0
        return float(np.mean(self.source_powers) / 10.0 ** (self.snr_db / 10.0))


@dataclass(frozen=True)
class SnapshotMatrix:
    """K x T received snapshots together with their provenance."""

    data: np.ndarray
    geometry: ArrayGeometry
    scenario: SourceScenario

    def __post_init__(self):
        K, T = self.data.shape
        if K != self.geometry.element_count or T != self.scenario.snapshots:
            raise ValueError(
                f"snapshot matrix is {K}x{T}, expected "
                f"{self.geometry.element_count}x{self.scenario.snapshots}"
            )


def steering_matrix(geometry: ArrayGeometry, bearings_deg: Sequence[float]) -> np.ndarray:
    """K x N array manifold: column i is exp(1j*pi*p*sin(theta_i))."""
    bearings = check_bearings(bearings_deg)
    pos = np.asarray(geometry.positions, dtype=float)
    sines = np.sin(np.deg2rad(np.asarray(bearings)))
    return np.exp(1j * np.pi * pos[:, None] * sines[None, :])


def simulate_snapshots(
    geometry: ArrayGeometry,
    scenario: SourceScenario,
    coupling: Optional[CouplingModel] = None,
) -> SnapshotMatrix:
    """Draw x_t = U A s_t + n_t for t = 1..T; U = I without a coupling model.

    Source amplitudes are drawn first, noise second, from a single PCG64
    stream seeded with ``scenario.seed``, so (geometry, scenario, coupling)
    determine the output exactly.
    """
    rng = np.random.default_rng(scenario.seed)
    K = geometry.element_count
    N, T = scenario.num_sources, scenario.snapshots
    A = steering_matrix(geometry, scenario.bearings_deg)
    if coupling is not None:
        A = coupling_matrix(geometry, coupling) @ A
    amplitudes = np.sqrt(scenario.source_powers / 2.0)[:, None]
    s = amplitudes * (rng.standard_normal((N, T)) + 1j * rng.standard_normal((N, T)))
    x = A @ s
    noise_power = scenario.noise_power
    if noise_power > 0.0:
        sigma = math.sqrt(noise_power / 2.0)
        x = x + sigma * (rng.standard_normal((K, T)) + 1j * rng.standard_normal((K, T)))
    return SnapshotMatrix(data=x, geometry=geometry, scenario=scenario)


def sample_covariance(snapshots: SnapshotMatrix) -> np.ndarray:
    """Sample covariance (1/T) X X^H, symmetrized so R == R^H exactly."""
    X = snapshots.data
    R = X @ X.conj().T / X.shape[1]
    return (R + R.conj().T) / 2.0


def analytic_covariance(
    geometry: ArrayGeometry,
    scenario: SourceScenario,
    coupling: Optional[CouplingModel] = None,
) -> np.ndarray:
    """Infinite-snapshot covariance U A diag(powers) A^H U^H + noise * I."""
    A = steering_matrix(geometry, scenario.bearings_deg)
    if coupling is not None:
        A = coupling_matrix(geometry, coupling) @ A
    R = (A * scenario.source_powers[None, :]) @ A.conj().T
    R = R + scenario.noise_power * np.eye(geometry.element_count)
    return (R + R.conj().T) / 2.0


def coarray_pseudo_snapshot(R: np.ndarray, geometry: ArrayGeometry) -> dict[int, complex]:
    """Lag-averaged vectorized covariance over the difference coarray.

    For each non-negative lag l the value is the mean of R[a, b] over all
    ordered pairs with p_a - p_b = l (redundancy averaging); negative lags
    are filled by conjugation, which coincides with the defining average
    whenever R is Hermitian and keeps the symmetry exact in floating point.
    """
    pos = np.asarray(geometry.positions, dtype=np.int64)
    K = len(pos)
    R = np.asarray(R)
    if R.shape != (K, K):
        raise ValueError(f"covariance must be {K}x{K} to match the geometry, got {R.shape}")
    lags = pos[:, None] - pos[None, :]
    values, inverse = np.unique(lags.ravel(), return_inverse=True)
    sums = np.zeros(len(values), dtype=complex)
    np.add.at(sums, inverse, R.ravel())
    means = sums / np.bincount(inverse)
    pseudo: dict[int, complex] = {}
    for lag, value in zip(values.tolist(), means.tolist()):
        if lag >= 0:
            pseudo[lag] = value
    for lag in list(pseudo):
        if lag > 0:
            pseudo[-lag] = pseudo[lag].conjugate()
    return pseudo
