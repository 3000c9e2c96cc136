"""Monte Carlo sweeps, bound curves, requirement scoring, and CSV export.

Drives the full chain: trajectory sampling, path tracing, two-way signal
synthesis with a fresh clock bias per exchange, delay-spectrum time-of-
arrival estimation, round-trip ranging, and the three range error bounds
per sweep sample.  All randomness derives from (seed, sample, trial), so
results are independent of execution order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import DEFAULT_BETA, reb_waa
from .constants import SPEED_OF_LIGHT
from .estimation import (
    RangeMeasurement,
    delay_spectrum,
    estimate_toa,
    hamming_window,
    low_confidence,
    rtt_range,
    unwrap_toa,
)
from .positioning import Anchor, linear_init, ml_position, range_position_crb
from .propagation import (
    Pose,
    ScenarioConfig,
    bicycle_horizon,
    build_scenario,
    distance,
    sample_trajectory,
    trace_paths,
    vehicle_horizon,
)
from .signal import OfdmConfig, default_config, make_pilots, synthesize_rx

CSV_COLUMNS = (
    "sweep_coord_m", "true_range_m", "rmse_m", "reb_los_m", "reb_all_m",
    "reb_waa_m", "waa_bias_m", "n_paths", "n_cell_paths", "los_present",
)

LINKS = ("rsu-vehicle", "rsu-bicycle", "vehicle-bicycle")

_log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RequirementSet:
    """One accuracy band with its confidence band."""

    name: str
    accuracy_lo: float
    accuracy_hi: float
    confidence_lo: float
    confidence_hi: float


REQUIREMENT_SETS = (
    RequirementSet("set1", 10.0, 50.0, 0.68, 0.95),
    RequirementSet("set2", 1.0, 3.0, 0.95, 0.99),
    RequirementSet("set3", 0.1, 0.5, 0.95, 0.99),
)


@dataclass(frozen=True)
class RunConfig:
    """One ranging sweep: scenario, link, Monte Carlo and estimator knobs."""

    scenario_id: int
    link: str
    trials: int = 100
    seed: int = 0
    beta: float = DEFAULT_BETA
    oversample: int = 16
    peak_policy: str = "global_peak"
    first_peak_threshold_db: float = 6.0
    doppler_enabled: bool = True
    clock_bias_std: float = 1e-6
    output_path: str | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.link not in LINKS:
            raise ValueError(f"unknown link {self.link!r}")
        if self.link == "vehicle-bicycle" and self.scenario_id != 2:
            raise ValueError("the vehicle-bicycle link exists only in scenario 2")
        if self.link.startswith("rsu") and self.scenario_id != 1:
            raise ValueError("RSU links exist only in scenario 1")


@dataclass(frozen=True)
class CurvePoint:
    """One sweep sample: Monte Carlo RMSE next to the three bounds."""

    sweep_coord: float
    true_range: float
    rmse: float
    reb_los: float
    reb_all: float
    reb_waa: float
    waa_bias: float
    n_paths: int
    n_cell_paths: int
    los_present: bool


def _link_endpoints(cfg: RunConfig, scenario: ScenarioConfig,
                    vehicle: Pose, bicycle: Pose) -> tuple[Pose, Pose, float]:
    """(end a, end b, sweep coordinate) for the configured link."""
    if cfg.link == "rsu-vehicle":
        assert scenario.rsu is not None
        return scenario.rsu, vehicle, vehicle.position.y
    if cfg.link == "rsu-bicycle":
        assert scenario.rsu is not None
        return scenario.rsu, bicycle, bicycle.position.x
    return vehicle, bicycle, vehicle.position.y


def _link_horizon(cfg: RunConfig, scenario: ScenarioConfig) -> float:
    if cfg.link == "rsu-vehicle":
        return vehicle_horizon(scenario)
    if cfg.link == "rsu-bicycle":
        return bicycle_horizon(scenario)
    return min(vehicle_horizon(scenario), bicycle_horizon(scenario))


def run_ranging_sweep(cfg: RunConfig, scenario: ScenarioConfig | None = None,
                      ofdm: OfdmConfig | None = None) -> list[CurvePoint]:
    """Sweep the link trajectory, Monte-Carlo the RTT ranging error at every
    sample, and attach the three range error bounds.

    Each trial draws a fresh clock bias and independent noise for the two
    directions of the exchange.  Samples where blockage removes the
    line-of-sight path keep their raw RMSE but carry NaN bounds.  Identical
    configurations produce identical results regardless of worker count.
    """
    scenario = scenario if scenario is not None else build_scenario(cfg.scenario_id)
    ofdm = ofdm if ofdm is not None else default_config()
    pilots = make_pilots(ofdm, "all_ones")
    window = hamming_window(ofdm.num_subcarriers)
    horizon = _link_horizon(cfg, scenario)
    n_samples = int(round(horizon / scenario.measurement_interval)) + 1

    points: list[CurvePoint] = []
    for sample_idx in range(n_samples):
        t = sample_idx * scenario.measurement_interval
        vehicle, bicycle = sample_trajectory(scenario, min(t, horizon))
        end_a, end_b, coord = _link_endpoints(cfg, scenario, vehicle, bicycle)
        snap_fwd = trace_paths(end_a, end_b, scenario, ofdm.wavelength, time=t)
        snap_rev = trace_paths(end_b, end_a, scenario, ofdm.wavelength, time=t)
        true_range = distance(end_a.position, end_b.position)

        if snap_fwd.has_los:
            report = reb_waa(snap_fwd, pilots, ofdm, beta=cfg.beta)
            reb_los = report.reb_los_only
            reb_all = report.reb_all_paths
            reb_waa_m = report.reb_waa
            waa_bias = report.waa_bias_m
            n_cell = len(report.cell_indices)
            one_way_var = (reb_waa_m / SPEED_OF_LIGHT) ** 2 if math.isfinite(reb_waa_m) else None
        else:
            reb_los = reb_all = reb_waa_m = waa_bias = math.nan
            n_cell = 0
            one_way_var = None

        sq_err = 0.0
        n_low_confidence = 0
        for trial_idx in range(cfg.trials):
            root = np.random.SeedSequence(entropy=(cfg.seed, sample_idx, trial_idx))
            bias_seed, fwd_seed, rev_seed = root.spawn(3)
            bias = float(np.random.default_rng(bias_seed).normal(0.0, cfg.clock_bias_std))
            measurement, weak = _rtt_trial(snap_fwd, snap_rev, pilots, ofdm, cfg, window,
                                           bias, fwd_seed, rev_seed, one_way_var)
            n_low_confidence += weak
            sq_err += (measurement.distance - true_range) ** 2
        rmse = math.sqrt(sq_err / cfg.trials)
        if n_low_confidence:
            _log.debug("sample %d: %d/%d low-confidence spectra",
                       sample_idx, n_low_confidence, cfg.trials)

        points.append(CurvePoint(
            sweep_coord=coord, true_range=true_range, rmse=rmse,
            reb_los=reb_los, reb_all=reb_all, reb_waa=reb_waa_m, waa_bias=waa_bias,
            n_paths=len(snap_fwd.paths), n_cell_paths=n_cell,
            los_present=snap_fwd.has_los,
        ))

    if cfg.output_path is not None:
        export_csv(points, cfg.output_path)
    return points


def _rtt_trial(snap_fwd, snap_rev, pilots, ofdm, cfg: RunConfig, window,
               bias: float, fwd_seed, rev_seed,
               one_way_var) -> tuple[RangeMeasurement, bool]:
    """One round-trip exchange; clock bias flips sign on the reverse link."""
    toas = []
    weak = False
    for snap, seed, b in ((snap_fwd, fwd_seed, bias), (snap_rev, rev_seed, -bias)):
        rx = synthesize_rx(snap, pilots, ofdm, noise_seed=seed,
                           doppler_enabled=cfg.doppler_enabled, clock_bias=b)
        spec = delay_spectrum(rx, pilots, ofdm, window=window, oversample=cfg.oversample)
        est = estimate_toa(spec, policy=cfg.peak_policy,
                           threshold_db=cfg.first_peak_threshold_db)
        weak = weak or low_confidence(spec)
        toas.append(unwrap_toa(est.toa, ofdm))
    try:
        measurement = rtt_range(toas[0], toas[1], 0.0, one_way_toa_var=one_way_var,
                                clock_bias=bias)
    except ValueError:
        # Noise-only spectra can produce a nonphysical negative round trip;
        # score it as a zero-distance outlier rather than aborting the sweep.
        measurement = RangeMeasurement(distance=0.0, sigma=math.nan, clock_bias_model=bias)
    return measurement, weak


def run_bounds_sweep(cfg: RunConfig, scenario: ScenarioConfig | None = None,
                     ofdm: OfdmConfig | None = None) -> list[CurvePoint]:
    """Bound curves only (no Monte Carlo): rmse is NaN in every point."""
    scenario = scenario if scenario is not None else build_scenario(cfg.scenario_id)
    ofdm = ofdm if ofdm is not None else default_config()
    pilots = make_pilots(ofdm, "all_ones")
    horizon = _link_horizon(cfg, scenario)
    n_samples = int(round(horizon / scenario.measurement_interval)) + 1
    points = []
    for sample_idx in range(n_samples):
        t = sample_idx * scenario.measurement_interval
        vehicle, bicycle = sample_trajectory(scenario, min(t, horizon))
        end_a, end_b, coord = _link_endpoints(cfg, scenario, vehicle, bicycle)
        snap = trace_paths(end_a, end_b, scenario, ofdm.wavelength, time=t)
        true_range = distance(end_a.position, end_b.position)
        if snap.has_los:
            report = reb_waa(snap, pilots, ofdm, beta=cfg.beta)
            points.append(CurvePoint(coord, true_range, math.nan,
                                     report.reb_los_only, report.reb_all_paths,
                                     report.reb_waa, report.waa_bias_m,
                                     len(snap.paths), len(report.cell_indices), True))
        else:
            points.append(CurvePoint(coord, true_range, math.nan, math.nan,
                                     math.nan, math.nan, math.nan,
                                     len(snap.paths), 0, False))
    if cfg.output_path is not None:
        export_csv(points, cfg.output_path)
    return points


@dataclass(frozen=True)
class RequirementScore:
    requirement: RequirementSet
    fraction_within_loose: float
    fraction_within_strict: float
    met_loose: bool
    met_strict: bool


@dataclass(frozen=True)
class PositioningSummary:
    rmse: float
    crb: float
    trials: int
    scores: tuple[RequirementScore, ...]


def run_positioning_demo(anchors: Sequence[Anchor], true_point,
                         sigma: float, trials: int, seed: int = 0,
                         dim: int = 2) -> PositioningSummary:
    """Monte Carlo position RMSE on a synthetic anchor layout.

    Per trial, ranges get i.i.d. Gaussian noise, the closed-form
    initializer seeds the Gauss-Newton solve, and the position error is
    scored against each requirement set: the loose rate is the fraction of
    trials within the coarse accuracy bound (compared to the lower
    confidence), the strict rate the fraction within the fine bound
    (compared to the upper confidence).
    """
    true = np.array([true_point.x, true_point.y, true_point.z][:dim])
    anchor_xyz = np.array([[a.position.x, a.position.y, a.position.z][:dim]
                           for a in anchors])
    true_ranges = np.linalg.norm(anchor_xyz - true, axis=1)

    errors = np.empty(trials)
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, trial)))
        noisy = true_ranges + (rng.standard_normal(len(anchors)) * sigma if sigma > 0
                               else 0.0)
        measurements = [
            (RangeMeasurement(distance=max(d, 0.0), sigma=sigma if sigma > 0 else 1.0),
             anchor)
            for d, anchor in zip(noisy, anchors)
        ]
        init = linear_init(measurements, dim)
        estimate = ml_position(measurements, init=init, dim=dim)
        est = np.array([estimate.position.x, estimate.position.y,
                        estimate.position.z][:dim])
        errors[trial] = np.linalg.norm(est - true)

    rmse = float(np.sqrt(np.mean(errors ** 2)))
    crb = range_position_crb(anchors, true_point,
                             [sigma if sigma > 0 else 1.0] * len(anchors), dim)
    scores = []
    for req in REQUIREMENT_SETS:
        loose = float(np.mean(errors <= req.accuracy_hi))
        strict = float(np.mean(errors <= req.accuracy_lo))
        scores.append(RequirementScore(
            requirement=req,
            fraction_within_loose=loose,
            fraction_within_strict=strict,
            met_loose=loose >= req.confidence_lo,
            met_strict=strict >= req.confidence_hi,
        ))
    return PositioningSummary(rmse=rmse, crb=crb, trials=trials, scores=tuple(scores))


@dataclass(frozen=True)
class CoherenceReport:
    """Doppler coherence margin and the end-to-end latency budget."""

    coherence_symbol_limit: float
    num_symbols: int
    coherence_margin: float
    latency_budget_s: float

    @property
    def coherent(self) -> bool:
        return self.coherence_margin > 1.0


def coherence_and_latency_check(config: OfdmConfig, v_max: float,
                                accuracy_req: float) -> CoherenceReport:
    """Symbol-count margin against wavelength * spacing / v_max, and the
    latency budget 0.1 * accuracy / v_max.  A zero v_max reports unbounded
    (infinite) margins rather than dividing by zero."""
    if v_max < 0:
        raise ValueError("maximum speed must be nonnegative")
    if v_max == 0.0:
        return CoherenceReport(math.inf, config.num_symbols, math.inf, math.inf)
    limit = config.wavelength * config.subcarrier_spacing / v_max
    return CoherenceReport(
        coherence_symbol_limit=limit,
        num_symbols=config.num_symbols,
        coherence_margin=limit / config.num_symbols,
        latency_budget_s=0.1 * accuracy_req / v_max,
    )


def _format_float(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.9e}"


def export_csv(points: Sequence[CurvePoint], path: str) -> None:
    """Write sweep points in the fixed column order; infinities serialize
    as the literal ``inf`` and floats carry nine significant digits."""
    lines = [",".join(CSV_COLUMNS)]
    for p in points:
        lines.append(",".join([
            _format_float(p.sweep_coord), _format_float(p.true_range),
            _format_float(p.rmse), _format_float(p.reb_los),
            _format_float(p.reb_all), _format_float(p.reb_waa),
            _format_float(p.waa_bias), str(p.n_paths), str(p.n_cell_paths),
            "true" if p.los_present else "false",
        ]))
    try:
        with open(path, "w", encoding="ascii") as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write sweep CSV to {path!r}: {exc}") from exc


def read_csv(path: str) -> list[CurvePoint]:
    """Parse a sweep CSV produced by export_csv."""
    try:
        with open(path, "r", encoding="ascii") as handle:
            lines = [line.strip() for line in handle if line.strip()]
    except OSError as exc:
        raise OSError(f"cannot read sweep CSV from {path!r}: {exc}") from exc
    if not lines or lines[0] != ",".join(CSV_COLUMNS):
        raise ValueError(f"unexpected CSV header in {path!r}")
    points = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != len(CSV_COLUMNS):
            raise ValueError(f"malformed CSV row: {line!r}")
        points.append(CurvePoint(
            sweep_coord=float(cells[0]), true_range=float(cells[1]),
            rmse=float(cells[2]), reb_los=float(cells[3]), reb_all=float(cells[4]),
            reb_waa=float(cells[5]), waa_bias=float(cells[6]),
            n_paths=int(cells[7]), n_cell_paths=int(cells[8]),
            los_present=cells[9] == "true",
        ))
    return points
