"""Banded mutual-coupling model and the coupling-leakage metric.

Coupling between two sensors depends only on their separation on the
integer grid: coefficient u_0 = 1 on the diagonal and, for 1 <= k <= G,
u_k = u1 * exp(-1j*(k-1)*phase_decay) / k, so |u_i/u_j| = j/i.
Separations beyond the band limit G do not couple.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .geometry import ArrayGeometry

__all__ = ["CouplingModel", "coupling_coefficients", "coupling_matrix", "coupling_leakage"]

DEFAULT_PHASE_DECAY = cmath.pi / 8
DEFAULT_BAND_LIMIT = 100


@dataclass(frozen=True)
class CouplingModel:
    """Parameters of the banded coupling law.

    ``u1`` is the first coefficient (|u1| < 1 so the diagonal dominates),
    ``band_limit`` is the largest coupled separation G, and ``phase_decay``
    is the phase step per separation index in radians.
    """

    u1: complex
    band_limit: int = DEFAULT_BAND_LIMIT
    phase_decay: float = DEFAULT_PHASE_DECAY

    def __post_init__(self):
        if abs(self.u1) >= 1.0:
            raise ValueError(f"|u1| must be < 1, got |{self.u1}| = {abs(self.u1)}")
        if int(self.band_limit) < 1:
            raise ValueError(f"band_limit must be >= 1, got {self.band_limit}")
        object.__setattr__(self, "u1", complex(self.u1))
        object.__setattr__(self, "band_limit", int(self.band_limit))
        object.__setattr__(self, "phase_decay", float(self.phase_decay))


def coupling_coefficients(model: CouplingModel, max_separation: int) -> np.ndarray:
    """Coefficients u_0 .. u_max_separation (zero beyond the band limit)."""
    u = np.zeros(max_separation + 1, dtype=complex)
    u[0] = 1.0
    top = min(max_separation, model.band_limit)
    for k in range(1, top + 1):
        u[k] = model.u1 * cmath.exp(-1j * (k - 1) * model.phase_decay) / k
    return u


def coupling_matrix(geometry: ArrayGeometry, model: CouplingModel) -> np.ndarray:
    """K x K coupling matrix: entry (b, c) = u_{|p_b - p_c|}.

    The matrix is complex-symmetric (not Hermitian) because the coefficient
    depends only on the separation magnitude.
    """
    pos = np.asarray(geometry.positions, dtype=np.int64)
    separation = np.abs(pos[:, None] - pos[None, :])
    u = coupling_coefficients(model, int(separation.max()))
    return u[separation]


def coupling_leakage(matrix: np.ndarray) -> float:
    """Off-diagonal Frobenius mass ratio ||U - diag(U)||_F / ||U||_F."""
    U = np.asarray(matrix)
    total = np.linalg.norm(U)
    if total == 0.0:
        raise ValueError("coupling leakage is undefined for an all-zero matrix")
    off = U - np.diag(np.diag(U))
    return float(np.linalg.norm(off) / total)
