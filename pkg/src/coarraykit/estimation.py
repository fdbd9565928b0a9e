"""Spatial-smoothing MUSIC on the central consecutive coarray segment.

The lag-averaged pseudo snapshot over [-Lc, Lc] is treated as one snapshot
of a virtual ULA with 2Lc+1 elements.  Averaging the outer products of its
Lc+1 overlapping windows of length Lc+1 restores a full-rank Hermitian
matrix whose signal subspace spans the virtual steering vectors, so MUSIC
can resolve up to Lc sources from K physical sensors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional, Sequence

import numpy as np

from .geometry import ArrayGeometry
from .signals import coarray_pseudo_snapshot
from .coarray import difference_coarray
from ._validation import check_snapshot_array

__all__ = [
    "MusicConfig",
    "EstimationResult",
    "smoothed_matrix",
    "music_spectrum",
    "estimate_doas",
    "rmse",
    "spectrum_csv_lines",
    "CoarrayMusic",
]

DEFAULT_GRID_POINTS = 18001


@dataclass(frozen=True)
class MusicConfig:
    """Estimator knobs: source count, angle grid density, peak refinement."""

    num_sources: int
    grid_points: int = DEFAULT_GRID_POINTS
    refine_peaks: bool = True

    def __post_init__(self):
        if int(self.num_sources) < 1:
            raise ValueError(f"num_sources must be >= 1, got {self.num_sources}")
        if int(self.grid_points) < 3:
            raise ValueError(f"grid_points must be >= 3, got {self.grid_points}")
        object.__setattr__(self, "num_sources", int(self.num_sources))
        object.__setattr__(self, "grid_points", int(self.grid_points))


@dataclass(frozen=True)
class EstimationResult:
    """Sorted bearing estimates from one trial.

    ``under_detection`` marks trials where the pseudo spectrum offered
    fewer local maxima than requested; ``estimates_deg`` then holds only
    the peaks that were found.
    """

    estimates_deg: tuple[float, ...]
    trial_seed: int = 0
    under_detection: bool = False
    spectrum: Optional[np.ndarray] = None  # (grid, 2): angle_deg, pseudo-spectrum


def smoothed_matrix(pseudo: Mapping[int, complex], halfwidth: int) -> np.ndarray:
    """Average the outer products of the virtual ULA's overlapping windows.

    Requires every lag in [-halfwidth, halfwidth] to be present.  Output is
    (halfwidth+1) x (halfwidth+1), Hermitian and positive semi-definite.
    """
    Lc = int(halfwidth)
    if Lc < 0:
        raise ValueError("halfwidth must be non-negative")
    missing = [l for l in range(-Lc, Lc + 1) if l not in pseudo]
    if missing:
        raise ValueError(
            f"pseudo snapshot is missing lags {missing[:5]} inside [-{Lc}, {Lc}]"
        )
    z = np.array([pseudo[l] for l in range(-Lc, Lc + 1)], dtype=complex)
    windows = np.lib.stride_tricks.sliding_window_view(z, Lc + 1)
    M = windows.T @ windows.conj() / (Lc + 1)
    return (M + M.conj().T) / 2.0


def music_spectrum(
    matrix: np.ndarray,
    num_sources: int,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> tuple[np.ndarray, np.ndarray]:
    """MUSIC pseudo spectrum P(theta) = 1 / ||E_n^H a(theta)||^2 on a degree grid.

    Eigenvectors of the ``size - num_sources`` smallest eigenvalues form the
    noise subspace E_n.  Because the virtual steering vectors have unit-
    modulus entries, ||E_n^H a||^2 = size - ||E_s^H a||^2, and the smaller
    of the two projections is used.
    """
    M = np.asarray(matrix)
    size = M.shape[0]
    if num_sources >= size:
        raise ValueError(
            f"num_sources ({num_sources}) must be below the matrix dimension ({size})"
        )
    _, vectors = np.linalg.eigh(M)  # ascending eigenvalues
    angles, steering = _steering_grid(size, int(grid_points))
    if 2 * num_sources < size:
        projection = vectors[:, size - num_sources:].conj().T @ steering
        denom = size - np.sum(np.abs(projection) ** 2, axis=0)
        denom = np.maximum(denom, 1e-300)
    else:
        projection = vectors[:, : size - num_sources].conj().T @ steering
        denom = np.sum(np.abs(projection) ** 2, axis=0)
    with np.errstate(divide="ignore"):
        power = 1.0 / denom
    return angles, power


def estimate_doas(
    matrix: np.ndarray,
    config: MusicConfig,
    trial_seed: int = 0,
    keep_spectrum: bool = False,
) -> EstimationResult:
    """Run MUSIC on a smoothed coarray matrix and pick the N largest peaks.

    Peaks are strict interior local maxima of the pseudo spectrum, ranked
    by height with ties broken toward the lower angle, then optionally
    refined by parabolic interpolation of the log spectrum.  Fewer maxima
    than requested yields an under-detection flag instead of made-up peaks,
    as does a degenerate matrix whose eigenvalues are all equal (no signal
    subspace to separate).
    """
    size = np.asarray(matrix).shape[0]
    if config.num_sources >= size:
        raise ValueError(
            f"num_sources ({config.num_sources}) must be below the matrix dimension ({size})"
        )
    eigenvalues = np.linalg.eigvalsh(np.asarray(matrix))
    spread = eigenvalues[-1] - eigenvalues[0]
    if spread <= 1e-12 * max(abs(eigenvalues[-1]), 1e-300):
        return EstimationResult(
            estimates_deg=(), trial_seed=int(trial_seed), under_detection=True
        )
    angles, power = music_spectrum(matrix, config.num_sources, config.grid_points)
    peaks = _local_maxima(power)
    order = np.lexsort((angles[peaks], -power[peaks]))
    chosen = peaks[order][: config.num_sources]
    under = len(chosen) < config.num_sources
    estimates = []
    step = angles[1] - angles[0]
    for idx in chosen:
        theta = angles[idx]
        if config.refine_peaks:
            theta += step * _parabolic_offset(power, idx)
        estimates.append(float(theta))
    spectrum = np.column_stack([angles, power]) if keep_spectrum else None
    return EstimationResult(
        estimates_deg=tuple(sorted(estimates)),
        trial_seed=int(trial_seed),
        under_detection=under,
        spectrum=spectrum,
    )


def rmse(results: Sequence[EstimationResult], truth_bearings_deg: Sequence[float]) -> float:
    """Root-mean-square bearing error over trials and sources, in degrees.

    Sorted estimates are paired with sorted true bearings index by index.
    Every result must carry a full set of estimates; filter and count
    under-detections before calling.
    """
    truth = np.sort(np.asarray(truth_bearings_deg, dtype=float))
    if len(results) == 0:
        raise ValueError("rmse needs at least one estimation result")
    squared = []
    for result in results:
        if result.under_detection or len(result.estimates_deg) != len(truth):
            raise ValueError(
                "rmse requires complete results; exclude under-detections first"
            )
        err = np.asarray(result.estimates_deg) - truth
        squared.append(err**2)
    return float(np.sqrt(np.mean(squared)))


def spectrum_csv_lines(result: EstimationResult) -> list[str]:
    """``angle_deg,pseudo_spectrum`` rows for a result that kept its spectrum."""
    if result.spectrum is None:
        raise ValueError("estimation result was produced without keep_spectrum")
    return [f"{angle:.6g},{value:.6g}" for angle, value in result.spectrum]


class CoarrayMusic:
    """Coarray MUSIC as a scikit-learn style estimator.

    Composes with the wider ecosystem: ``get_params``/``set_params`` follow
    the sklearn protocol, so ``sklearn.base.clone`` and grid-search wrappers
    treat it like any other estimator.

    Parameters
    ----------
    geometry : ArrayGeometry
        Physical sensor positions; fixes the virtual array via its coarray.
    num_sources : int
        Number of bearings to estimate (model order is assumed known).
    grid_points : int
        Resolution of the angle grid over [-90, 90] degrees.
    refine_peaks : bool
        Parabolic refinement of peak locations on the log spectrum.

    Attributes (after ``fit``)
    --------------------------
    estimates_deg_ : ndarray, sorted bearing estimates in degrees.
    under_detection_ : bool, True when fewer peaks than sources were found.
    spectrum_angles_deg_, spectrum_ : the pseudo spectrum samples.
    coarray_halfwidth_ : Lc of the geometry's difference coarray.
    """

    def __init__(
        self,
        geometry: ArrayGeometry,
        num_sources: int,
        grid_points: int = DEFAULT_GRID_POINTS,
        refine_peaks: bool = True,
    ):
        self.geometry = geometry
        self.num_sources = num_sources
        self.grid_points = grid_points
        self.refine_peaks = refine_peaks

    def get_params(self, deep: bool = True) -> dict:
        return {
            "geometry": self.geometry,
            "num_sources": self.num_sources,
            "grid_points": self.grid_points,
            "refine_peaks": self.refine_peaks,
        }

    def set_params(self, **params) -> "CoarrayMusic":
        for name, value in params.items():
            if name not in self.get_params():
                raise ValueError(f"unknown parameter {name!r} for CoarrayMusic")
            setattr(self, name, value)
        return self

    def fit(self, X, y=None) -> "CoarrayMusic":
        """Estimate bearings from a (n_snapshots, n_sensors) complex array."""
        X = check_snapshot_array(X, self.geometry.element_count)
        R = X.T @ X.conj() / X.shape[0]
        R = (R + R.conj().T) / 2.0
        pseudo = coarray_pseudo_snapshot(R, self.geometry)
        halfwidth = difference_coarray(self.geometry).consecutive_halfwidth
        config = MusicConfig(
            num_sources=self.num_sources,
            grid_points=self.grid_points,
            refine_peaks=self.refine_peaks,
        )
        result = estimate_doas(
            smoothed_matrix(pseudo, halfwidth), config, keep_spectrum=True
        )
        self.n_features_in_ = self.geometry.element_count
        self.coarray_halfwidth_ = halfwidth
        self.estimates_deg_ = np.asarray(result.estimates_deg)
        self.under_detection_ = result.under_detection
        self.spectrum_angles_deg_ = result.spectrum[:, 0]
        self.spectrum_ = result.spectrum[:, 1]
        return self

    def predict(self, X=None) -> np.ndarray:
        """Bearing estimates for ``X`` (fits first) or for the last fit."""
        if X is not None:
            self.fit(X)
        if not hasattr(self, "estimates_deg_"):
            raise RuntimeError("CoarrayMusic.predict called before fit")
        return self.estimates_deg_

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).estimates_deg_


# --- internals --------------------------------------------------------------

@lru_cache(maxsize=8)
def _steering_grid(size: int, grid_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Angle grid over [-90, 90] and the matching virtual-ULA steering matrix."""
    angles = np.linspace(-90.0, 90.0, grid_points)
    sines = np.sin(np.deg2rad(angles))
    steering = np.exp(1j * np.pi * np.arange(size)[:, None] * sines[None, :])
    angles.flags.writeable = False
    steering.flags.writeable = False
    return angles, steering


def _local_maxima(power: np.ndarray) -> np.ndarray:
    """Indices of strict interior local maxima (flat spectra yield none)."""
    interior = (power[1:-1] > power[:-2]) & (power[1:-1] > power[2:])
    return np.flatnonzero(interior) + 1


def _parabolic_offset(power: np.ndarray, index: int) -> float:
    """Sub-grid vertex offset in [-0.5, 0.5] from the log spectrum."""
    left, mid, right = power[index - 1 : index + 2]
    if not (np.isfinite(left) and np.isfinite(mid) and np.isfinite(right)):
        return 0.0
    y0, y1, y2 = math.log10(left), math.log10(mid), math.log10(right)
    denom = y0 - 2.0 * y1 + y2
    if denom >= -1e-30:  # flat or non-concave sample triple
        return 0.0
    offset = 0.5 * (y0 - y2) / denom
    return float(min(0.5, max(-0.5, offset)))
