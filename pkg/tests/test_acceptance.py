"""Acceptance gate: one test per release criterion, each printing a verdict.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
pass lines.  Tolerances are fixed here, not calibrated elsewhere.
"""

import math
import time

import numpy as np
import pytest

from channels import echo_path, los_path, make_snapshot, random_multipath
from oracle_fim import finite_difference_fim
from slpos.bounds import fim, reb_all_paths, reb_los_only, reb_waa
from slpos.constants import SPEED_OF_LIGHT
from slpos.estimation import delay_spectrum, estimate_toa, rtt_range
from slpos.harness import RunConfig, run_positioning_demo, run_ranging_sweep
from slpos.positioning import Anchor, range_position_crb
from slpos.propagation import (
    PathKind,
    Vec3,
    build_scenario,
    friis_gain,
    sample_trajectory,
    trace_paths,
)
from slpos.signal import synthesize_rx


def _report(number: int, name: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {number:2d} [{name}]: PASS{suffix}")


def test_criterion_01_los_only_reb_anchor(ofdm, pilots):
    start = time.perf_counter()
    values = {}
    for dist in (70.5323, 8.6493):
        gain = friis_gain(Vec3(0, 0, 0), Vec3(dist, 0, 0), ofdm.wavelength)
        snap = make_snapshot([los_path(dist / SPEED_OF_LIGHT, gain=gain)],
                             rx=Vec3(dist, 0, 0))
        values[dist] = reb_los_only(snap, pilots, ofdm)
    elapsed = time.perf_counter() - start
    assert 0.0136 <= values[70.5323] <= 0.0184
    assert 0.0017 <= values[8.6493] <= 0.0023
    assert elapsed < 1.0
    _report(1, "LoS-only REB anchor",
            f"{values[70.5323]:.5f} m @ 70.5 m, {values[8.6493]:.5f} m @ 8.65 m, "
            f"{elapsed:.2f} s")


def test_criterion_02_waa_reverts_to_los_only(ofdm, pilots):
    rng = np.random.default_rng(202)
    for _ in range(100):
        delay = rng.uniform(20e-9, 2e-6)
        gain = rng.uniform(1e-5, 1.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        snap = make_snapshot([los_path(float(delay), complex(gain))])
        report = reb_waa(snap, pilots, ofdm)
        assert report.reb_waa == pytest.approx(report.reb_los_only, rel=1e-12)
    _report(2, "WAA reversion", "100 random single-path channels, 1e-12 relative")


def test_criterion_03_information_ordering(ofdm, pilots):
    rng = np.random.default_rng(303)
    finite_count = 0
    for _ in range(500):
        n_paths = int(rng.integers(2, 5))
        paths = random_multipath(rng, n_paths, delay_lo=50e-9, delay_hi=300e-9)
        snap = make_snapshot(paths)
        all_v = reb_all_paths(snap, pilots, ofdm)
        if not math.isfinite(all_v):
            continue
        finite_count += 1
        assert all_v >= reb_los_only(snap, pilots, ofdm)
    assert finite_count >= 100
    _report(3, "information ordering",
            f"{finite_count}/500 channels finite, ordering held in every one")


def test_criterion_04_fim_matches_finite_differences(ofdm, pilots):
    start = time.perf_counter()
    rng = np.random.default_rng(404)
    worst = 0.0
    for _ in range(100):
        paths = random_multipath(rng, int(rng.integers(1, 5)))
        analytic = fim(paths, pilots, ofdm)
        oracle = finite_difference_fim(paths, pilots, ofdm)
        rel = np.linalg.norm(analytic - oracle) / np.linalg.norm(oracle)
        worst = max(worst, rel)
        assert rel < 1e-5
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    _report(4, "FIM correctness",
            f"worst relative Frobenius {worst:.2e} over 100 configs, {elapsed:.1f} s")


def test_criterion_05_waa_hand_arithmetic(ofdm, pilots):
    tau = 100e-9
    snap = make_snapshot([los_path(tau, gain=1.0 + 0j),
                          echo_path(tau + 10e-9, 0.5 + 0j)])
    report = reb_waa(snap, pilots, ofdm)
    assert report.weights[0] == pytest.approx(2.0 / 3.0, abs=1e-9)
    assert report.weights[1] == pytest.approx(1.0 / 3.0, abs=1e-9)
    assert report.waa_bias_m == pytest.approx(SPEED_OF_LIGHT * (10e-9 / 3.0), abs=1e-9)
    assert report.waa_bias_m == pytest.approx(0.9993, abs=5e-5)
    assert abs(report.merged_gain - 1.5) < 1e-9
    _report(5, "WAA arithmetic",
            f"w=({report.weights[0]:.6f}, {report.weights[1]:.6f}), "
            f"bias={report.waa_bias_m:.4f} m, merged gain={report.merged_gain.real:.3f}")


def test_criterion_06_toa_recovery(ofdm, pilots):
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(50):
        tau = float(rng.uniform(10e-9, 1e-6))
        snap = make_snapshot([los_path(tau)])
        rx = synthesize_rx(snap, pilots, ofdm, noise_seed=None)
        spec = delay_spectrum(rx, pilots, ofdm, oversample=16)
        estimate = estimate_toa(spec)
        err = abs(estimate.toa - tau) * SPEED_OF_LIGHT
        worst = max(worst, err)
        assert err < 0.05
    _report(6, "ToA recovery", f"worst error {worst * 100:.3f} cm over 50 delays")


def test_criterion_07_rtt_bias_cancellation_and_variance():
    # Exactness of the bias cancellation up to |B| = 10 us.
    d = 30.0
    tau = d / SPEED_OF_LIGHT
    for bias in (-10e-6, -1e-6, -1e-8, 0.0, 1e-8, 1e-6, 10e-6):
        m = rtt_range(tau + bias, tau - bias, 0.0, one_way_toa_var=1e-18)
        assert m.distance == pytest.approx(d, abs=1e-9)
    # Monte Carlo: combined variance doubles the per-link share.
    rng = np.random.default_rng(707)
    sigma_toa = 2e-9
    n = 10_000
    biases = rng.normal(0.0, 1e-6, n)
    fwd = tau + biases + rng.normal(0.0, sigma_toa, n)
    rev = tau - biases + rng.normal(0.0, sigma_toa, n)
    dists = SPEED_OF_LIGHT * (fwd + rev) / 2.0
    single_link_var = SPEED_OF_LIGHT ** 2 * sigma_toa ** 2 / 4.0
    ratio = float(np.var(dists) / (2.0 * single_link_var))
    assert 0.8 <= ratio <= 1.2
    _report(7, "RTT", f"bias cancellation sub-nm, MC variance ratio {ratio:.3f}")


def test_criterion_08_scenario_geometry(ofdm):
    scn2 = build_scenario(2)
    vehicle, bicycle = sample_trajectory(scn2, 4.5)
    # Exact up to the binary representation of the 16.4 m start coordinate.
    assert vehicle.position.y == bicycle.position.y == -7.0
    assert abs(vehicle.position.x - bicycle.position.x) < 1e-14

    scn1 = build_scenario(1)
    snap = trace_paths(scn1.rsu, sample_trajectory(scn1, 5.0)[0], scn1, ofdm.wavelength)
    kinds = [p.kind for p in snap.paths]
    assert kinds[0] is PathKind.LOS and PathKind.GROUND in kinds
    ground = snap.paths[kinds.index(PathKind.GROUND)]
    excess = (ground.delay - snap.paths[0].delay) * SPEED_OF_LIGHT
    assert excess > 1.0
    assert excess == pytest.approx(2.96, abs=0.01)
    _report(8, "scenario geometry",
            f"collision offset {abs(vehicle.position.x - bicycle.position.x):.2e} m, "
            f"ground excess {excess:.3f} m")


def test_criterion_09_qualitative_curve_reproduction():
    start = time.perf_counter()
    cfg = RunConfig(scenario_id=1, link="rsu-vehicle", trials=100, seed=42)
    points = run_ranging_sweep(cfg)
    elapsed = time.perf_counter() - start
    unblocked = [p for p in points if p.los_present]
    assert unblocked

    near = [p for p in unblocked if p.true_range < 40.0]
    worst_near = max(p.rmse for p in near)
    assert worst_near < 3.0  # moderate accuracy inside 40 m

    comparable = [p for p in unblocked if math.isfinite(p.reb_waa) and p.reb_waa > 0]
    within = sum(1 for p in comparable if 1.0 / 3.0 <= p.rmse / p.reb_waa <= 3.0)
    fraction = within / len(unblocked)
    assert fraction >= 0.70

    center = min(points, key=lambda p: abs(p.sweep_coord))
    ratio = center.reb_waa / center.reb_los
    assert ratio >= 10.0

    assert elapsed < 600.0
    _report(9, "qualitative curve reproduction",
            f"near RMSE max {worst_near:.2f} m, factor-3 agreement {fraction:.0%}, "
            f"center bound ratio {ratio:.0f}x, {elapsed:.0f} s")


def test_criterion_10_positioning():
    anchors3 = [Anchor(Vec3(0, 0, 0)), Anchor(Vec3(10, 0, 0)), Anchor(Vec3(0, 10, 0))]
    clean = run_positioning_demo(anchors3, Vec3(3.0, 4.0, 0.0), sigma=0.0,
                                 trials=10, seed=0)
    assert clean.rmse <= 1e-6

    square = [Anchor(Vec3(0, 0, 0)), Anchor(Vec3(10, 0, 0)), Anchor(Vec3(0, 10, 0)),
              Anchor(Vec3(10, 10, 0))]
    noisy = run_positioning_demo(square, Vec3(3.0, 4.0, 0.0), sigma=1.0,
                                 trials=1000, seed=10)
    crb = range_position_crb(square, Vec3(3.0, 4.0, 0.0), [1.0] * 4, dim=2)
    assert noisy.rmse == pytest.approx(crb, rel=0.25)
    _report(10, "positioning",
            f"noiseless {clean.rmse:.1e} m, noisy RMSE {noisy.rmse:.3f} m "
            f"vs CRB {crb:.3f} m")
