"""Fisher information engine and the three range-error bounds.

For the multipath OFDM observation the noiseless mean of sample (t, n) is

    mu_{t,n} = sum_l gain_l * s_{t,n} * exp(-j 2 pi n delay_l spacing)

parameterized per path by (delay, Re gain, Im gain).  The Fisher information
matrix is J = (2 / N0) Re{G^H G} with G the stacked analytic gradient of mu
over all samples.  Three meter-domain range error bounds (REBs) follow:

* line-of-sight only: information from the first path alone, all other
  paths assumed perfectly known;
* all paths in the resolution cell: nuisance gains and delays of every
  unresolvable path are estimated jointly, which can make J near-singular
  (reported as an infinite bound);
* weighted-average approximation: the unresolvable paths are merged into a
  single effective path whose time of arrival is the amplitude-weighted
  average, and the resulting merging bias is added to the variance bound.

Doppler rotations are treated as known constants and do not appear in the
parameterization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT
from .propagation import ChannelSnapshot, PathComponent, PathKind
from .signal import OfdmConfig, PilotGrid, noise_variance

# Condition number (of the diagonally equilibrated FIM) above which the
# matrix is treated as rank-deficient and the bound reported infinite.
DEFAULT_CONDITION_CUTOFF = 1e12

# Resolution-cell width factor, bounded to (1, 2).
DEFAULT_BETA = 1.5

# |merged gain| below this fraction of the largest in-cell amplitude means
# the cell interferes destructively and the effective path carries no power.
_DESTRUCTIVE_GAIN_FRACTION = 1e-12


def fim(paths: list[PathComponent] | tuple[PathComponent, ...], pilots: PilotGrid,
        config: OfdmConfig) -> np.ndarray:
    """Fisher information matrix for (delay, Re gain, Im gain) per path.

    Returns the symmetric 3L x 3L matrix (2 / N0) Re{G^H G}; parameter
    order is path-major with the delay of interest at index 0.  Analytic
    gradient columns per path:

        d mu / d delay   = gain * (-j 2 pi n spacing) * s * ramp
        d mu / d Re gain = s * ramp
        d mu / d Im gain = j * s * ramp
    """
    if not paths:
        raise ValueError("FIM requires at least one path")
    n0 = noise_variance(config)
    if not n0 > 0:
        raise ValueError("noise variance must be positive")

    n_sym, n_sub = pilots.symbols.shape
    n = np.arange(n_sub)
    columns = []
    for path in paths:
        ramp = np.exp(-2j * np.pi * n * path.delay * config.subcarrier_spacing)
        base = (pilots.symbols * ramp[None, :]).ravel()
        d_delay = path.gain * ((-2j * np.pi * config.subcarrier_spacing * n)[None, :]
                               * pilots.symbols * ramp[None, :]).ravel()
        columns.extend([d_delay, base, 1j * base])
    grad = np.column_stack(columns)
    j = (2.0 / n0) * (grad.conj().T @ grad).real
    return 0.5 * (j + j.T)


def crb_delay(j: np.ndarray, condition_cutoff: float = DEFAULT_CONDITION_CUTOFF) -> float:
    """[J^-1]_{0,0}: delay-variance bound for the parameter at index 0.

    Inversion goes through an eigendecomposition of the diagonally
    equilibrated matrix; equilibration keeps the conditioning check about
    path geometry rather than the disparate units of delay and gain
    entries.  Returns +inf when the equilibrated condition number exceeds
    ``condition_cutoff`` (near rank deficiency from unresolvable paths).
    """
    j = np.asarray(j, dtype=float)
    if j.ndim != 2 or j.shape[0] != j.shape[1]:
        raise ValueError("FIM must be square")
    diag = np.diag(j)
    if np.any(diag <= 0):
        return math.inf
    scale = 1.0 / np.sqrt(diag)
    balanced = scale[:, None] * j * scale[None, :]
    eigvals, eigvecs = np.linalg.eigh(balanced)
    if eigvals[0] <= 0 or eigvals[-1] / eigvals[0] > condition_cutoff:
        return math.inf
    inv00 = float(np.sum(eigvecs[0, :] ** 2 / eigvals))
    return scale[0] ** 2 * inv00


def resolution_cell(channel: ChannelSnapshot, beta: float, config: OfdmConfig) -> list[int]:
    """Indices of paths within beta/(N_s * spacing) of the line-of-sight delay.

    Paths inside this window cannot be separated by bandwidth alone; the
    line-of-sight path (index 0) is always a member.
    """
    if not channel.has_los:
        raise ValueError("channel has no line-of-sight path")
    if not 1.0 < beta < 2.0:
        raise ValueError(f"beta must lie in (1, 2), got {beta}")
    half_width = beta / (config.num_subcarriers * config.subcarrier_spacing)
    toa = channel.paths[0].delay
    return [i for i, p in enumerate(channel.paths) if abs(p.delay - toa) <= half_width]


@dataclass(frozen=True)
class BoundReport:
    """The three range error bounds plus the merged-path intermediates.

    ``weights`` follow ``cell_indices`` order and sum to one; ``waa_bias_m``
    is the speed of light times the gap between the true and merged times
    of arrival.  ``destructive_interference`` marks cells whose gains sum
    to (numerically) zero, where the merged-path bound is infinite.
    """

    reb_los_only: float
    reb_all_paths: float
    reb_waa: float
    merged_toa: float
    waa_bias_m: float
    cell_indices: tuple[int, ...]
    weights: tuple[float, ...]
    merged_gain: complex
    beta: float
    destructive_interference: bool = False


def reb_los_only(channel: ChannelSnapshot, pilots: PilotGrid, config: OfdmConfig,
                 condition_cutoff: float = DEFAULT_CONDITION_CUTOFF) -> float:
    """Range error bound with every other path perfectly known (meters)."""
    if not channel.has_los:
        raise ValueError("channel has no line-of-sight path")
    variance = crb_delay(fim([channel.paths[0]], pilots, config), condition_cutoff)
    return SPEED_OF_LIGHT * math.sqrt(variance) if math.isfinite(variance) else math.inf


def reb_all_paths(channel: ChannelSnapshot, pilots: PilotGrid, config: OfdmConfig,
                  beta: float = DEFAULT_BETA,
                  condition_cutoff: float = DEFAULT_CONDITION_CUTOFF) -> float:
    """Range error bound estimating all in-cell paths jointly (meters or inf).

    Paths outside the resolution cell do not affect the accuracy of the
    line-of-sight delay and are removed to tighten the bound.
    """
    cell = resolution_cell(channel, beta, config)
    j = fim([channel.paths[i] for i in cell], pilots, config)
    variance = crb_delay(j, condition_cutoff)
    return SPEED_OF_LIGHT * math.sqrt(variance) if math.isfinite(variance) else math.inf


def reb_waa(channel: ChannelSnapshot, pilots: PilotGrid, config: OfdmConfig,
            beta: float = DEFAULT_BETA,
            condition_cutoff: float = DEFAULT_CONDITION_CUTOFF) -> BoundReport:
    """Weighted-average approximation of the achievable ranging error.

    The in-cell paths merge into one effective path: weights are the
    normalized gain magnitudes, the merged time of arrival is the weighted
    average of the in-cell delays, and the merged gain is the complex sum.
    The reported value is c * sqrt(delay CRB of the effective path plus the
    squared merging bias).  With a single-path cell the weights collapse to
    one and the value reverts to the line-of-sight-only bound.
    """
    cell = resolution_cell(channel, beta, config)
    cell_paths = [channel.paths[i] for i in cell]
    amps = np.array([abs(p.gain) for p in cell_paths])
    weights = amps / amps.sum()
    delays = np.array([p.delay for p in cell_paths])
    merged_toa = float(weights @ delays)
    merged_gain = complex(sum(p.gain for p in cell_paths))
    toa = channel.paths[0].delay
    bias_s = toa - merged_toa

    los_value = reb_los_only(channel, pilots, config, condition_cutoff)
    all_value = reb_all_paths(channel, pilots, config, beta, condition_cutoff)

    destructive = abs(merged_gain) < _DESTRUCTIVE_GAIN_FRACTION * amps.max()
    if destructive:
        waa_value = math.inf
    else:
        effective = PathComponent(delay=merged_toa, gain=merged_gain,
                                  radial_velocity=0.0, kind=PathKind.LOS)
        variance = crb_delay(fim([effective], pilots, config), condition_cutoff)
        if math.isfinite(variance):
            waa_value = SPEED_OF_LIGHT * math.sqrt(variance + bias_s ** 2)
        else:
            waa_value = math.inf

    return BoundReport(
        reb_los_only=los_value,
        reb_all_paths=all_value,
        reb_waa=waa_value,
        merged_toa=merged_toa,
        waa_bias_m=SPEED_OF_LIGHT * abs(bias_s),
        cell_indices=tuple(cell),
        weights=tuple(float(w) for w in weights),
        merged_gain=merged_gain,
        beta=beta,
        destructive_interference=destructive,
    )
