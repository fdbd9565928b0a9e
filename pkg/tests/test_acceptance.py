"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines live.
The Monte Carlo criteria (7 and 8) take a couple of minutes combined.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np

import coarraykit as ck
from coarraykit.coupling import CouplingModel, coupling_leakage, coupling_matrix
from coarraykit.estimation import MusicConfig, estimate_doas, smoothed_matrix
from coarraykit.geometry import custom_positions, emisc_positions, nested_positions
from coarraykit.harness import parse_config, run_rmse_sweep, trial_seed
from coarraykit.signals import SourceScenario, coarray_pseudo_snapshot, sample_covariance, simulate_snapshots

FIXTURES = Path(__file__).parent / "fixtures"

U1_REFERENCE = 0.3 * np.exp(1j * np.pi / 3)


def report(number, description, ok, elapsed, budget_s, detail=""):
    within = elapsed < budget_s
    status = "PASS" if (ok and within) else "FAIL"
    suffix = f" -- {detail}" if detail else ""
    print(f"[{status}] criterion {number}: {description} "
          f"({elapsed:.2f}s, budget {budget_s:g}s){suffix}")
    assert ok, f"criterion {number} failed: {description}{suffix}"
    assert within, f"criterion {number} exceeded runtime budget ({elapsed:.2f}s >= {budget_s}s)"


def piecewise_udof_emisc(K):
    c = {0: 21, 1: 21, 2: 17, 3: 9, 4: 9, 5: 17}[K % 6]
    return (2 * K * K - 2 * K + c) // 3


def test_criterion_1_udof_closed_form_agreement():
    start = time.perf_counter()
    ok = True
    for K in range(10, 61):
        measured = ck.udof(ck.difference_coarray(emisc_positions(K)))
        ok &= measured == ck.closed_form_udof_emisc(K) == piecewise_udof_emisc(K)
    anchors = (
        ck.closed_form_udof_emisc(10) == 63
        and ck.closed_form_udof_emisc(16) == 163
        and ck.closed_form_udof_emisc(36) == 847
    )
    report(1, "brute-force uDOF equals both closed forms for K in [10, 60]",
           ok and anchors, time.perf_counter() - start, 1.0,
           "anchors 63/163/847")


def test_criterion_2_imisc_offset():
    start = time.perf_counter()
    ok = all(
        ck.closed_form_udof_emisc(K) - ck.closed_form_udof_imisc(K) == 4
        for K in range(10, 201)
    )
    report(2, "EMISC uDOF exceeds IMISC uDOF by exactly 4 for K in [10, 200]",
           ok, time.perf_counter() - start, 1.0)


def test_criterion_3_weight_closed_forms():
    start = time.perf_counter()
    ok = True
    for K in range(16, 61):
        measured = ck.difference_coarray(emisc_positions(K)).first_weights()
        ok &= measured == (1, 2 * ((K - 4) // 6), 2)
    small_k_lines = []
    for K in range(10, 16):
        measured = ck.difference_coarray(emisc_positions(K)).first_weights()
        predicted = ck.closed_form_weights_emisc(K)
        verdict = "match" if measured == predicted else "MISMATCH (documented)"
        small_k_lines.append(f"K={K}: measured {measured} vs predicted {predicted} {verdict}")
    detail = "small-K report: " + "; ".join(small_k_lines)
    report(3, "measured (w1, w2, w3) equals (1, 2*floor((K-4)/6), 2) for K in [16, 60]",
           ok, time.perf_counter() - start, 1.0, detail)


def test_criterion_4_consecutive_ranges_and_hole():
    start = time.perf_counter()
    ok = True
    for K in range(10, 61):
        check = ck.verify_consecutive_ranges(K)
        ok &= check.passed and check.hole_confirmed
    report(4, "three-range decomposition and terminating hole for K in [10, 60]",
           ok, time.perf_counter() - start, 1.0)


def test_criterion_5_coarray_identities_random_geometries():
    start = time.perf_counter()
    rng = np.random.default_rng(50_500)
    ok = True
    for _ in range(500):
        K = int(rng.integers(2, 31))
        positions = rng.choice(201, size=K, replace=False)
        table = ck.difference_coarray(custom_positions(positions.tolist()))
        ok &= table.weights[0] == K
        ok &= sum(table.weights.values()) == K * K
        ok &= all(table.weights[-lag] == w for lag, w in table.weights.items())
    report(5, "weight symmetry, w(0) = K, and sum K^2 on 500 random geometries",
           ok, time.perf_counter() - start, 5.0)


def test_criterion_6_coupling_leakage_ordering():
    start = time.perf_counter()
    model = CouplingModel(u1=U1_REFERENCE, band_limit=100)
    ok = True
    for K in range(16, 41, 2):
        cl_emisc = coupling_leakage(coupling_matrix(emisc_positions(K), model))
        cl_nested = coupling_leakage(coupling_matrix(nested_positions(K // 2, K // 2), model))
        ok &= cl_emisc < cl_nested
    report(6, "CL(EMISC) < CL(nested) at u1 = 0.3 exp(j pi/3) for even K in [16, 40]",
           ok, time.perf_counter() - start, 5.0)


def test_criterion_7_more_sources_than_sensors():
    start = time.perf_counter()
    geometry = emisc_positions(10)
    halfwidth = ck.difference_coarray(geometry).consecutive_halfwidth
    bearings = np.linspace(-56.0, 56.0, 15)
    config = MusicConfig(num_sources=15)
    successes = 0
    for i in range(100):
        scenario = SourceScenario(
            bearings_deg=tuple(bearings), snr_db=10.0, snapshots=1000,
            seed=trial_seed(2024, i),
        )
        snap = simulate_snapshots(geometry, scenario)
        pseudo = coarray_pseudo_snapshot(sample_covariance(snap), geometry)
        result = estimate_doas(smoothed_matrix(pseudo, halfwidth), config)
        if not result.under_detection:
            errors = np.abs(np.asarray(result.estimates_deg) - bearings)
            if np.all(errors < 1.0):
                successes += 1
    report(7, "15 sources resolved by 10 sensors in >= 95 of 100 trials",
           successes >= 95, time.perf_counter() - start, 120.0,
           f"{successes}/100 trials with all per-source errors < 1 deg")


def test_criterion_8_rmse_trends(tmp_path):
    start = time.perf_counter()
    snr_cfg = parse_config(
        "experiment = rmse_vs_snr\n"
        "arrays = emisc:16 nested:8,8\n"
        "num_sources = 20\n"
        "span_deg = 60\n"
        "snapshots = 1000\n"
        "snr_db = -5 0 10\n"
        "u1_mag = 0.3\n"
        "trials = 100\n"
        "seed = 42\n"
        "threads = 4\n"
    )
    snr_rows = run_rmse_sweep(snr_cfg)
    u1_cfg = parse_config(
        "experiment = rmse_vs_u1\n"
        "arrays = emisc:16\n"
        "num_sources = 20\n"
        "span_deg = 60\n"
        "snapshots = 1000\n"
        "snr_db = 0\n"
        "u1_mag = 0 0.5\n"
        "trials = 100\n"
        "seed = 42\n"
        "threads = 4\n"
    )
    u1_rows = run_rmse_sweep(u1_cfg)
    (tmp_path / "rmse_vs_snr.csv").write_text(ck.harness.rmse_csv(snr_rows))
    (tmp_path / "rmse_vs_u1.csv").write_text(ck.harness.rmse_csv(u1_rows))

    emisc_by_snr = {r["sweep_value"]: r["rmse_deg"] for r in snr_rows if r["kind"] == "emisc"}
    nested_by_snr = {r["sweep_value"]: r["rmse_deg"] for r in snr_rows if r["kind"] == "nested"}
    by_u1 = {r["sweep_value"]: r["rmse_deg"] for r in u1_rows}

    trend_a = emisc_by_snr[-5.0] > emisc_by_snr[0.0] > emisc_by_snr[10.0]
    trend_b = by_u1[0.0] <= by_u1[0.5]
    trend_c = emisc_by_snr[0.0] <= nested_by_snr[0.0]
    detail = (
        f"(a) {emisc_by_snr[-5.0]:.4g} > {emisc_by_snr[0.0]:.4g} > {emisc_by_snr[10.0]:.4g}; "
        f"(b) {by_u1[0.0]:.4g} <= {by_u1[0.5]:.4g}; "
        f"(c) emisc {emisc_by_snr[0.0]:.4g} <= nested {nested_by_snr[0.0]:.4g}"
    )
    report(8, "RMSE trends versus SNR, |u1|, and array kind",
           trend_a and trend_b and trend_c, time.perf_counter() - start, 600.0, detail)


def test_criterion_9_cli_determinism(tmp_path):
    start = time.perf_counter()
    cfg = str(FIXTURES / "rmse_fixture.cfg")
    outputs = []
    for name in ("first.csv", "second.csv"):
        target = tmp_path / name
        completed = subprocess.run(
            [sys.executable, "-m", "coarraykit", "rmse",
             "--config", cfg, "--seed", "42", "--out", str(target)],
            capture_output=True, text=True,
        )
        assert completed.returncode == 0, completed.stderr
        outputs.append(
            "\n".join(l for l in target.read_text().splitlines() if not l.startswith("#"))
        )
    report(9, "repeated CLI rmse runs produce byte-identical CSV bodies",
           outputs[0] == outputs[1], time.perf_counter() - start, 60.0)
