"""Target-side sensing: snapshots, MUSIC arrival angles, gain estimation.

The cross-shaped sensing array records the radars' probing pulses; subspace
processing recovers each radar's arrival direction and a least-squares pass
recovers the per-radar beamformed signals, whose mean pulse power estimates
the squared beamforming gains up to the common transmit power.  That scale
ambiguity is harmless downstream because the reflection designs are
invariant to a uniform gain rescaling.

Elevation is searched over [0, pi/2) only: a planar array cannot tell the
sign of the elevation, so the nonnegative representative is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arrays import AnglePair, ArrayGeometry, cssa_response
from .power_model import (Scenario, angles_at_target, beamforming_gains,
                          chirp_waveform)


class EstimationError(RuntimeError):
    """Fewer spectrum peaks than requested sources; ``peaks`` holds those found."""

    def __init__(self, message, peaks):
        super().__init__(message)
        self.peaks = peaks


@dataclass(frozen=True, eq=False)
class SnapshotSet:
    """Sensing-array samples (elements by snapshots) with their time stamps."""

    samples: np.ndarray
    sample_times: np.ndarray
    noise_power: float
    geometry: ArrayGeometry
    wavelength: float

    def __post_init__(self):
        if self.samples.shape[0] != self.geometry.num_elements:
            raise ValueError("sample rows must match the sensing-array size")
        if self.samples.shape[1] != self.sample_times.size:
            raise ValueError("one time stamp per snapshot required")
        if self.samples.shape[1] < 1:
            raise ValueError("need at least one snapshot")


@dataclass(frozen=True, eq=False)
class AoaEstimate:
    """Detected arrival angles plus the sampled pseudo-spectrum they came from."""

    angles: tuple[AnglePair, ...]
    spectrum: np.ndarray
    azimuth_grid: np.ndarray
    elevation_grid: np.ndarray
    grid_step: float


@dataclass(frozen=True, eq=False)
class GainEstimate:
    """Power-scaled squared beamforming gains; receive equals transmit by reciprocity."""

    g2_tx: np.ndarray
    g2_rx: np.ndarray


def collect_snapshots(scenario: Scenario, n_snapshots: int, seed) -> SnapshotSet:
    """Sample the sensing array uniformly over the common pulse window.

    Each snapshot is the steering-matrix mix of the radars' beamformed
    pulses plus white noise; the window is the overlap of all radars' pulse
    intervals so every pulse is active at every sample.
    """
    if n_snapshots < 1:
        raise ValueError(f"need at least one snapshot, got {n_snapshots}")
    radars = scenario.radars
    t_lo = max(r.pulse_epoch for r in radars)
    t_hi = min(r.pulse_epoch + r.pulse for r in radars)
    if t_hi <= t_lo:
        raise ValueError("radar pulses do not overlap; no common sensing window")
    times = t_lo + (t_hi - t_lo) * np.arange(n_snapshots) / n_snapshots

    target = scenario.target
    steering = np.stack([cssa_response(target.cssa_geometry,
                                       angles_at_target(scenario, k),
                                       scenario.wavelength)
                         for k in range(scenario.num_radars)], axis=1)
    gains = beamforming_gains(scenario)
    signals = np.stack([gains.g_tx[k] * chirp_waveform(times, radars[k])
                        for k in range(scenario.num_radars)])
    samples = steering @ signals
    if target.cssa_noise > 0:
        rng = np.random.default_rng(seed)
        shape = samples.shape
        noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
        samples = samples + np.sqrt(target.cssa_noise / 2.0) * noise
    return SnapshotSet(samples, times, target.cssa_noise,
                       target.cssa_geometry, scenario.wavelength)


def _steering_grid(geometry: ArrayGeometry, wavelength: float,
                   azimuths: np.ndarray, elevations: np.ndarray) -> np.ndarray:
    """Cross-array steering vectors for a whole angle grid, shape (L, n_az, n_el)."""
    ce = np.cos(elevations)[None, :]
    cx = ce * np.cos(azimuths)[:, None]
    cy = ce * np.sin(azimuths)[:, None]
    scale = 2.0 * geometry.spacing / wavelength
    off_x = (np.arange(geometry.nx) - (geometry.nx - 1) / 2)[:, None, None]
    off_y = (np.arange(geometry.ny) - (geometry.ny - 1) / 2)[:, None, None]
    arm_x = np.exp(-1j * np.pi * off_x * (scale * cx)[None])
    arm_y = np.exp(-1j * np.pi * off_y * (scale * cy)[None])
    keep = np.arange(geometry.ny) != (geometry.ny - 1) // 2
    return np.concatenate([arm_x, arm_y[keep]], axis=0)


def _noise_subspace(snapshots: SnapshotSet, k_sources: int) -> np.ndarray:
    z = snapshots.samples
    cov = z @ z.conj().T / z.shape[1]
    _, vectors = np.linalg.eigh(cov)
    return vectors[:, : z.shape[0] - k_sources]


def _grid_spectrum(noise_basis: np.ndarray, snapshots: SnapshotSet,
                   azimuths: np.ndarray, elevations: np.ndarray) -> np.ndarray:
    """Pseudo-spectrum 1/||E_n^H a||^2 on the given angle grid."""
    steering = _steering_grid(snapshots.geometry, snapshots.wavelength,
                              azimuths, elevations)
    projections = np.einsum("lk,lae->kae", noise_basis.conj(), steering)
    return 1.0 / np.sum(np.abs(projections) ** 2, axis=0)


def _local_peaks(spectrum: np.ndarray) -> list[tuple[int, int]]:
    padded = np.full((spectrum.shape[0] + 2, spectrum.shape[1] + 2), -np.inf)
    padded[1:-1, 1:-1] = spectrum
    center = padded[1:-1, 1:-1]
    is_peak = np.ones_like(spectrum, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            neighbor = padded[1 + di: 1 + di + spectrum.shape[0],
                              1 + dj: 1 + dj + spectrum.shape[1]]
            is_peak &= center >= neighbor
    coords = np.argwhere(is_peak)
    coords = sorted(coords, key=lambda ij: -spectrum[ij[0], ij[1]])
    return [tuple(ij) for ij in coords]


def music_aoa(snapshots: SnapshotSet, k_sources: int, grid_step: float) -> AoaEstimate:
    """Estimate source directions as the largest pseudo-spectrum peaks.

    The sample covariance is eigen-decomposed, the noise subspace spans the
    smallest eigenvectors, and the pseudo-spectrum is scanned on a coarse
    angle grid of the given step.  Peaks closer than two grid steps merge
    into the larger one.  Each kept peak is refined on a local lattice one
    hundred times finer, polished by quadratic interpolation and snapped
    back to that lattice.
    """
    n_elem = snapshots.geometry.num_elements
    if k_sources >= n_elem:
        raise ValueError(f"need fewer sources ({k_sources}) than sensors ({n_elem})")
    if k_sources < 1:
        raise ValueError("need at least one source")
    if snapshots.samples.shape[1] < k_sources:
        raise ValueError("need at least as many snapshots as sources")
    if grid_step <= 0:
        raise ValueError("grid step must be positive")

    half = np.pi / 2
    steps = int(np.floor((half - 1e-9) / grid_step))
    azimuths = np.arange(-steps, steps + 1) * grid_step
    elevations = np.arange(0, steps + 1) * grid_step
    noise_basis = _noise_subspace(snapshots, k_sources)
    spectrum = _grid_spectrum(noise_basis, snapshots, azimuths, elevations)

    kept: list[tuple[int, int]] = []
    for ij in _local_peaks(spectrum):
        if any(abs(ij[0] - p[0]) < 2 and abs(ij[1] - p[1]) < 2 for p in kept):
            continue
        kept.append(ij)
        if len(kept) == k_sources:
            break
    if len(kept) < k_sources:
        found = tuple(AnglePair(float(azimuths[i]), float(elevations[j]))
                      for i, j in kept)
        raise EstimationError(f"found {len(kept)} peaks, expected {k_sources}", found)

    fine = grid_step / 100.0
    angles = []
    for i, j in kept:
        az, el = _refine_peak(noise_basis, snapshots, azimuths[i], elevations[j],
                              grid_step, fine)
        angles.append(AnglePair(az, el))
    return AoaEstimate(tuple(angles), spectrum, azimuths, elevations, grid_step)


def _refine_peak(noise_basis, snapshots, az0, el0, coarse, fine):
    half = np.pi / 2
    az_lo = max(az0 - coarse, -half + fine)
    az_hi = min(az0 + coarse, half - fine)
    el_lo = max(el0 - coarse, 0.0)
    el_hi = min(el0 + coarse, half - fine)
    az_grid = az_lo + fine * np.arange(int(round((az_hi - az_lo) / fine)) + 1)
    el_grid = el_lo + fine * np.arange(int(round((el_hi - el_lo) / fine)) + 1)
    local = _grid_spectrum(noise_basis, snapshots, az_grid, el_grid)
    i, j = np.unravel_index(int(np.argmax(local)), local.shape)
    az = az_grid[i] + _parabolic_offset(local[:, j], i) * fine
    el = el_grid[j] + _parabolic_offset(local[i, :], j) * fine
    az = az_lo + round((az - az_lo) / fine) * fine
    el = el_lo + round((el - el_lo) / fine) * fine
    return float(np.clip(az, -half + fine, half - fine)), float(max(el, 0.0))


def _parabolic_offset(values: np.ndarray, idx: int) -> float:
    if idx == 0 or idx == values.size - 1:
        return 0.0
    left, mid, right = values[idx - 1], values[idx], values[idx + 1]
    denom = 2.0 * (2.0 * mid - left - right)
    if denom <= 0:
        return 0.0
    return float(np.clip((right - left) / denom, -0.5, 0.5))


def steering_matrix(snapshots: SnapshotSet, angles) -> np.ndarray:
    """Sensing-array steering matrix with one column per source direction."""
    return np.stack([cssa_response(snapshots.geometry, pair, snapshots.wavelength)
                     for pair in angles], axis=1)


def ls_recover(snapshots: SnapshotSet, a_matrix: np.ndarray) -> np.ndarray:
    """Least-squares source signals (A^H A)^{-1} A^H z per snapshot.

    Raises ``numpy.linalg.LinAlgError`` when the steering matrix is rank
    deficient (source directions too close to separate).
    """
    a_matrix = np.asarray(a_matrix)
    singulars = np.linalg.svd(a_matrix, compute_uv=False)
    if singulars[-1] <= 1e-10 * singulars[0]:
        raise np.linalg.LinAlgError("steering matrix is rank deficient; "
                                    "source directions too close")
    recovered, *_ = np.linalg.lstsq(a_matrix, snapshots.samples, rcond=None)
    return recovered


def gain_estimate(recovered: np.ndarray, pri: float, pulse: float) -> GainEstimate:
    """Squared-gain estimates from the mean pulse power of recovered signals.

    Averages |s_k(t)|^2 over the sampled pulse window and rescales by
    pulse/pri, matching the per-interval signal energy; without noise this
    equals the transmit power times the squared beamforming gain exactly.
    Receive gains copy the transmit gains by channel reciprocity.
    """
    if not 0 < pulse < pri:
        raise ValueError(f"need 0 < pulse < pri, got {pulse} / {pri}")
    recovered = np.atleast_2d(np.asarray(recovered))
    g2 = pulse / pri * np.mean(np.abs(recovered) ** 2, axis=1)
    return GainEstimate(g2_tx=g2, g2_rx=g2.copy())


def estimate_parameters(scenario: Scenario, n_snapshots: int = 64, seed=0,
                        grid_step: float = np.deg2rad(1.0)
                        ) -> tuple[AoaEstimate, GainEstimate]:
    """Full sensing pass: snapshots, arrival angles, then gain estimates.

    The gain ordering follows the returned angle ordering, so the pair can
    be fed directly to the estimate-based reflection designs.
    """
    snapshots = collect_snapshots(scenario, n_snapshots, seed)
    aoa = music_aoa(snapshots, scenario.num_radars, grid_step)
    a_matrix = steering_matrix(snapshots, aoa.angles)
    recovered = ls_recover(snapshots, a_matrix)
    pri = scenario.radars[0].pri
    pulse = scenario.radars[0].pulse
    return aoa, gain_estimate(recovered, pri, pulse)
