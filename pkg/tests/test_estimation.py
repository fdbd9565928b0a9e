import math

import numpy as np
import pytest

from coarraykit.coarray import difference_coarray
from coarraykit.estimation import (
    CoarrayMusic,
    EstimationResult,
    MusicConfig,
    estimate_doas,
    music_spectrum,
    rmse,
    smoothed_matrix,
    spectrum_csv_lines,
)
from coarraykit.geometry import emisc_positions
from coarraykit.harness import trial_seed
from coarraykit.signals import (
    SourceScenario,
    analytic_covariance,
    coarray_pseudo_snapshot,
    sample_covariance,
    simulate_snapshots,
)

GEOM10 = emisc_positions(10)
LC10 = difference_coarray(GEOM10).consecutive_halfwidth


def analytic_pseudo(bearings, snr_db=math.inf):
    scenario = SourceScenario(bearings_deg=bearings, snr_db=snr_db, snapshots=1)
    return coarray_pseudo_snapshot(analytic_covariance(GEOM10, scenario), GEOM10)


class TestSmoothedMatrix:
    def test_single_source_principal_eigenvector(self):
        theta = -14.0
        M = smoothed_matrix(analytic_pseudo((theta,)), LC10)
        values, vectors = np.linalg.eigh(M)
        assert values[-1] > 1e3 * abs(values[-2])  # rank-1 dominant
        principal = vectors[:, -1]
        steering = np.exp(
            1j * np.pi * np.arange(LC10 + 1) * np.sin(np.deg2rad(theta))
        )
        steering /= np.linalg.norm(steering)
        overlap = abs(np.vdot(steering, principal))
        assert overlap == pytest.approx(1.0, abs=1e-8)

    def test_halfwidth_zero(self):
        M = smoothed_matrix({0: 2.5 + 0j}, 0)
        assert M.shape == (1, 1)
        assert M[0, 0] == pytest.approx(abs(2.5) ** 2)

    def test_hermitian_and_psd(self):
        M = smoothed_matrix(analytic_pseudo((-30.0, 12.0), snr_db=5.0), LC10)
        assert np.array_equal(M, M.conj().T)
        assert np.linalg.eigvalsh(M).min() >= -1e-10 * np.linalg.norm(M)

    def test_missing_lag_rejected(self):
        pseudo = analytic_pseudo((0.0,))
        del pseudo[3]
        with pytest.raises(ValueError, match="missing lag"):
            smoothed_matrix(pseudo, LC10)


class TestEstimateDoas:
    def test_on_grid_noiseless_single_source(self):
        M = smoothed_matrix(analytic_pseudo((0.0,)), LC10)
        result = estimate_doas(M, MusicConfig(num_sources=1))
        assert abs(result.estimates_deg[0]) <= 0.01
        assert not result.under_detection

    def test_two_sources_monte_carlo(self):
        # 2 sources at +-30 deg, SNR 20 dB, T=1000: nearly every seeded
        # trial must land both within 0.5 deg
        config = MusicConfig(num_sources=2)
        hits = 0
        for i in range(100):
            scenario = SourceScenario(
                bearings_deg=(-30.0, 30.0), snr_db=20.0, snapshots=1000,
                seed=trial_seed(7, i),
            )
            snap = simulate_snapshots(GEOM10, scenario)
            pseudo = coarray_pseudo_snapshot(sample_covariance(snap), GEOM10)
            result = estimate_doas(smoothed_matrix(pseudo, LC10), config)
            if not result.under_detection:
                err = np.abs(np.array(result.estimates_deg) - np.array([-30.0, 30.0]))
                if np.all(err < 0.5):
                    hits += 1
        assert hits >= 95

    def test_scaling_invariance(self):
        # argmax-level property: exact on the grid, and refinement may only
        # move by eigensolver rounding noise
        M = smoothed_matrix(analytic_pseudo((-22.0, 31.0), snr_db=10.0), LC10)
        on_grid = MusicConfig(num_sources=2, refine_peaks=False)
        base = estimate_doas(M, on_grid)
        scaled = estimate_doas(4.75 * M, on_grid)
        assert base.estimates_deg == scaled.estimates_deg
        refined = MusicConfig(num_sources=2)
        delta = np.array(estimate_doas(M, refined).estimates_deg) - np.array(
            estimate_doas(4.75 * M, refined).estimates_deg
        )
        assert np.max(np.abs(delta)) < 1e-6

    def test_finer_grid_not_worse(self):
        theta = 10.048  # between coarse-grid points, near a fine-grid point
        M = smoothed_matrix(analytic_pseudo((theta,)), LC10)
        errors = []
        for points in (1801, 18001):
            config = MusicConfig(num_sources=1, grid_points=points, refine_peaks=False)
            result = estimate_doas(M, config)
            errors.append(abs(result.estimates_deg[0] - theta))
        assert errors[1] <= errors[0] + 1e-9
        assert errors[1] < 0.005 < errors[0]

    def test_eigendecomposition_contract(self):
        M = smoothed_matrix(analytic_pseudo((-5.0, 40.0), snr_db=0.0), LC10)
        values, vectors = np.linalg.eigh(M)
        assert np.all(np.diff(values) >= 0)
        rebuilt = (vectors * values) @ vectors.conj().T
        assert np.linalg.norm(M - rebuilt) <= 1e-8 * np.linalg.norm(M)

    def test_flat_spectrum_under_detects(self):
        result = estimate_doas(np.eye(8, dtype=complex), MusicConfig(num_sources=2))
        assert result.under_detection
        assert len(result.estimates_deg) < 2

    def test_too_many_sources_rejected(self):
        with pytest.raises(ValueError, match="num_sources"):
            estimate_doas(np.eye(4, dtype=complex), MusicConfig(num_sources=4))

    def test_spectrum_dump(self):
        M = smoothed_matrix(analytic_pseudo((3.0,)), LC10)
        result = estimate_doas(M, MusicConfig(num_sources=1, grid_points=181), keep_spectrum=True)
        lines = spectrum_csv_lines(result)
        assert len(lines) == 181
        assert lines[0].startswith("-90,")
        no_spectrum = estimate_doas(M, MusicConfig(num_sources=1, grid_points=181))
        with pytest.raises(ValueError, match="spectrum"):
            spectrum_csv_lines(no_spectrum)


class TestMusicSpectrum:
    def test_noise_and_signal_projections_agree(self):
        # size - ||E_s^H a||^2 must equal ||E_n^H a||^2; probe via two
        # source counts straddling the fast-path threshold
        M = smoothed_matrix(analytic_pseudo((-28.0, 4.0, 33.0), snr_db=5.0), 8)
        angles_a, power_a = music_spectrum(M, 3, grid_points=361)  # signal-side path
        angles_b, power_b = music_spectrum(M, 5, grid_points=361)  # noise-side path
        assert np.array_equal(angles_a, angles_b)
        assert power_a.shape == power_b.shape == (361,)
        assert np.all(power_a > 0)


class TestRmse:
    def test_perfect_estimates(self):
        results = [
            EstimationResult(estimates_deg=(-10.0, 20.0)) for _ in range(5)
        ]
        assert rmse(results, (-10.0, 20.0)) == 0.0

    def test_single_source_error(self):
        results = [EstimationResult(estimates_deg=(12.0,))]
        assert rmse(results, (10.0,)) == pytest.approx(2.0)

    def test_two_trials_definition(self):
        results = [
            EstimationResult(estimates_deg=(1.0,)),
            EstimationResult(estimates_deg=(2.0,)),
        ]
        assert rmse(results, (0.0,)) == pytest.approx(math.sqrt(2.5))

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="at least one"):
            rmse([], (0.0,))

    def test_under_detection_rejected(self):
        results = [EstimationResult(estimates_deg=(1.0,), under_detection=True)]
        with pytest.raises(ValueError, match="complete"):
            rmse(results, (0.0,))


class TestCoarrayMusicEstimator:
    def make_snapshots(self, seed=42):
        scenario = SourceScenario(
            bearings_deg=(-30.0, 30.0), snr_db=20.0, snapshots=500, seed=seed
        )
        return simulate_snapshots(GEOM10, scenario).data.T  # (T, K) sample-major

    def test_fit_predict(self):
        est = CoarrayMusic(GEOM10, num_sources=2)
        estimates = est.fit_predict(self.make_snapshots())
        assert estimates.shape == (2,)
        assert np.all(np.abs(estimates - np.array([-30.0, 30.0])) < 0.5)
        assert est.n_features_in_ == 10
        assert est.coarray_halfwidth_ == LC10

    def test_predict_before_fit(self):
        with pytest.raises(RuntimeError, match="fit"):
            CoarrayMusic(GEOM10, num_sources=2).predict()

    def test_wrong_width_rejected(self):
        est = CoarrayMusic(GEOM10, num_sources=2)
        with pytest.raises(ValueError, match="columns"):
            est.fit(np.ones((50, 7), dtype=complex))

    def test_get_set_params(self):
        est = CoarrayMusic(GEOM10, num_sources=2)
        params = est.get_params()
        assert params["num_sources"] == 2
        est.set_params(grid_points=901)
        assert est.grid_points == 901
        with pytest.raises(ValueError, match="unknown parameter"):
            est.set_params(bogus=1)

    def test_sklearn_clone_compatible(self):
        sklearn_base = pytest.importorskip("sklearn.base")
        est = CoarrayMusic(GEOM10, num_sources=3, grid_points=901)
        cloned = sklearn_base.clone(est)
        assert cloned is not est
        assert cloned.get_params() == est.get_params()

    def test_spectrum_attributes(self):
        est = CoarrayMusic(GEOM10, num_sources=2, grid_points=1801)
        est.fit(self.make_snapshots())
        assert est.spectrum_angles_deg_.shape == (1801,)
        assert est.spectrum_.shape == (1801,)
        assert not est.under_detection_
