"""Radar waveforms, beamforming gains, and the received-power objective.

The scenario couples K mono-static radars with one target whose surface
stacks a tunable reflecting panel (amplitude-capped complex coefficients)
next to a fixed absorptive coating, plus a small cross-shaped sensing array.
All nodes carry 3D positions; angles follow the convention of
:mod:`irstealth.arrays`.  Array frames are fixed: the target's array x-axis
points down (world -z) and every radar's points up (world +z), all array
y-axes lie along world +x and the normals along world +y, so node layouts
inside the world x-z plane give zero elevation and in-plane azimuths.
Powers are linear watts throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arrays import (AnglePair, ArrayGeometry, ArrayKind, cascaded_response,
                     split_ts_response, upa_response)
from .channel import path_gain

# Per-node (x-axis, y-axis, normal) triads in world coordinates.
_TARGET_AXES = (np.array([0.0, 0.0, -1.0]), np.array([1.0, 0.0, 0.0]),
                np.array([0.0, 1.0, 0.0]))
_RADAR_AXES = (np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]),
               np.array([0.0, 1.0, 0.0]))


@dataclass(frozen=True, eq=False)
class RadarNode:
    """One mono-static radar: planar array, pulse parameters, beamformer."""

    geometry: ArrayGeometry
    position: tuple[float, float, float]
    beamformer: np.ndarray
    tx_power: float
    pri: float
    pulse: float
    bandwidth: float
    noise_power: float
    pulse_epoch: float = 0.0

    def __post_init__(self):
        if self.geometry.kind is not ArrayKind.UPA:
            raise ValueError("radar arrays must be planar")
        w = np.asarray(self.beamformer)
        if w.size != self.geometry.num_elements:
            raise ValueError(f"beamformer length {w.size} does not match "
                             f"{self.geometry.num_elements} antennas")
        if abs(np.linalg.norm(w) - 1.0) > 1e-9:
            raise ValueError("beamformer must have unit norm")
        if not 0 < self.pulse < self.pri:
            raise ValueError(f"need 0 < pulse < pri, got {self.pulse} / {self.pri}")
        if self.tx_power <= 0:
            raise ValueError(f"transmit power must be positive, got {self.tx_power}")


@dataclass(frozen=True, eq=False)
class IrsPanel:
    """Tunable reflection coefficients with a common amplitude cap."""

    theta: np.ndarray
    beta_max: float

    def __post_init__(self):
        if not 0 < self.beta_max <= 1:
            raise ValueError(f"beta_max must be in (0, 1], got {self.beta_max}")
        if np.max(np.abs(self.theta), initial=0.0) > self.beta_max + 1e-9:
            raise ValueError("reflection amplitudes exceed beta_max")


@dataclass(frozen=True, eq=False)
class NirsPanel:
    """Fixed coating coefficients; |phi_n| = sqrt(1 - zeta_n) per element."""

    phi: np.ndarray
    zeta: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi)
        zeta = np.asarray(self.zeta)
        if phi.shape != zeta.shape:
            raise ValueError("phi and zeta lengths differ")
        if np.any(zeta < 0) or np.any(zeta > 1):
            raise ValueError("absorbing efficiencies must lie in [0, 1]")
        if np.max(np.abs(np.abs(phi) - np.sqrt(1.0 - zeta)), initial=0.0) > 1e-9:
            raise ValueError("|phi_n| must equal sqrt(1 - zeta_n)")


@dataclass(frozen=True, eq=False)
class Target:
    """Target surface: tunable panel and coating side by side, plus sensing array."""

    position: tuple[float, float, float]
    irs_geometry: ArrayGeometry
    nirs_geometry: ArrayGeometry
    irs: IrsPanel
    nirs: NirsPanel
    cssa_geometry: ArrayGeometry
    cssa_noise: float

    def __post_init__(self):
        if self.irs_geometry.ny != self.nirs_geometry.ny:
            raise ValueError("panel and coating must share the y-grid")
        if self.irs_geometry.spacing != self.nirs_geometry.spacing:
            raise ValueError("panel and coating must share the element spacing")
        if np.asarray(self.irs.theta).size != self.irs_geometry.num_elements:
            raise ValueError("theta length does not match the panel grid")
        if np.asarray(self.nirs.phi).size != self.nirs_geometry.num_elements:
            raise ValueError("phi length does not match the coating grid")
        if self.cssa_geometry.kind is not ArrayKind.CSSA:
            raise ValueError("sensing array must be cross shaped")

    @property
    def surface_geometry(self) -> ArrayGeometry:
        return ArrayGeometry(ArrayKind.UPA,
                             self.irs_geometry.nx + self.nirs_geometry.nx,
                             self.irs_geometry.ny, self.irs_geometry.spacing)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Immutable world state: K radars, one target, one wavelength."""

    wavelength: float
    radars: tuple[RadarNode, ...]
    target: Target
    ref_gain: float
    seed: int = 0

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        if self.ref_gain <= 0:
            raise ValueError("reference path gain must be positive")
        if not self.radars:
            raise ValueError("scenario needs at least one radar")

    @property
    def num_radars(self) -> int:
        return len(self.radars)


@dataclass(frozen=True, eq=False)
class GainSet:
    """Per-radar complex beamforming gains and per-pair coating reflection gains.

    ``g_tx[k] == g_rx[k]`` by channel reciprocity; ``c_nirs[k, j]`` is the
    fixed-coating reflection gain of the link radar j -> target -> radar k.
    """

    g_tx: np.ndarray
    g_rx: np.ndarray
    c_nirs: np.ndarray


def angles_between(pos_from, pos_to, axes) -> AnglePair:
    """Azimuth/elevation of ``pos_to`` seen from an array at ``pos_from``.

    ``axes`` is the observing array's (x-axis, y-axis, normal) triad; the
    observed node must sit in the half-space of positive x direction cosine.
    """
    d = np.asarray(pos_to, dtype=float) - np.asarray(pos_from, dtype=float)
    dist = np.linalg.norm(d)
    if dist == 0:
        raise ValueError("nodes are co-located")
    d /= dist
    ux, uy, un = (float(d @ ax) for ax in axes)
    elevation = np.arcsin(np.clip(un, -1.0, 1.0))
    return AnglePair(float(np.arctan2(uy, ux)), float(elevation))


def angles_at_target(scenario: Scenario, k: int) -> AnglePair:
    """Arrival direction of radar k at the target surface."""
    return angles_between(scenario.target.position, scenario.radars[k].position,
                          _TARGET_AXES)


def angles_at_radar(scenario: Scenario, k: int) -> AnglePair:
    """Departure direction toward the target at radar k."""
    return angles_between(scenario.radars[k].position, scenario.target.position,
                          _RADAR_AXES)


def radar_distance(scenario: Scenario, k: int) -> float:
    return float(np.linalg.norm(np.asarray(scenario.radars[k].position, dtype=float)
                                - np.asarray(scenario.target.position, dtype=float)))


def target_side_responses(scenario: Scenario, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Panel and coating blocks of the whole-surface response toward radar k.

    Built by splitting the full surface response so the coating block keeps
    its x-index offset phase relative to the panel block.
    """
    target = scenario.target
    full = upa_response(target.surface_geometry, angles_at_target(scenario, k),
                        scenario.wavelength)
    return split_ts_response(full, target.irs_geometry.nx,
                             target.nirs_geometry.nx, target.irs_geometry.ny)


def chirp_waveform(t, radar: RadarNode):
    """Transmitted pulse amplitude of one radar at time ``t`` within a PRI.

    Linear-FM pulse sqrt(P * pri/pulse) * exp(j*pi*B*(t-epoch)^2/pulse) inside
    the pulse window, zero for the rest of the interval.  The sqrt(pri/pulse)
    factor normalizes the pulse so its power averaged over the whole interval
    equals the transmit power.
    """
    t = np.asarray(t, dtype=float)
    rel = t - radar.pulse_epoch
    if np.any(rel < 0) or np.any(rel >= radar.pri):
        raise ValueError("time outside the pulse repetition interval")
    amplitude = np.sqrt(radar.tx_power * radar.pri / radar.pulse)
    value = np.where(rel <= radar.pulse,
                     amplitude * np.exp(1j * np.pi * radar.bandwidth * rel ** 2 / radar.pulse),
                     0.0 + 0.0j)
    return value if value.ndim else complex(value)


def matched_beamformer(radar_geometry: ArrayGeometry, target_angles: AnglePair,
                       wavelength: float) -> np.ndarray:
    """Unit-norm beamformer conjugate-matched to the given direction."""
    a = upa_response(radar_geometry, target_angles, wavelength)
    return np.conj(a) / np.sqrt(a.size)


def beamforming_gains(scenario: Scenario) -> GainSet:
    """Complex transmit/receive gains per radar and coating gains per radar pair."""
    k_r = scenario.num_radars
    g = np.zeros(k_r, dtype=complex)
    for k in range(k_r):
        radar = scenario.radars[k]
        rho = path_gain(radar_distance(scenario, k), scenario.ref_gain,
                        scenario.wavelength)
        a = upa_response(radar.geometry, angles_at_radar(scenario, k),
                         scenario.wavelength)
        g[k] = rho.value * (a @ np.asarray(radar.beamformer))
    _, nirs_vectors = cascaded_vectors(scenario)
    phi = np.asarray(scenario.target.nirs.phi)
    c = np.einsum("kjn,n->kj", nirs_vectors.conj(), phi)
    return GainSet(g_tx=g, g_rx=g.copy(), c_nirs=c)


def cascaded_vectors(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Cascaded responses u[k, j] (panel) and u_nirs[k, j] (coating) per link."""
    k_r = scenario.num_radars
    responses = [target_side_responses(scenario, k) for k in range(k_r)]
    n1 = scenario.target.irs_geometry.num_elements
    n2 = scenario.target.nirs_geometry.num_elements
    u = np.zeros((k_r, k_r, n1), dtype=complex)
    u_nirs = np.zeros((k_r, k_r, n2), dtype=complex)
    for k in range(k_r):
        for j in range(k_r):
            u[k, j] = cascaded_response(responses[k][0], responses[j][0])
            u_nirs[k, j] = cascaded_response(responses[k][1], responses[j][1])
    return u, u_nirs


def link_weights(scenario: Scenario, gains: GainSet | None = None) -> np.ndarray:
    """Nonnegative weights P_j * |g_rx[k]|^2 * |g_tx[j]|^2 of every echo/cross link."""
    gains = gains if gains is not None else beamforming_gains(scenario)
    powers = np.array([r.tx_power for r in scenario.radars])
    return np.abs(gains.g_rx[:, None]) ** 2 * (powers * np.abs(gains.g_tx) ** 2)[None, :]


def radar_power(k: int, theta: np.ndarray, scenario: Scenario) -> float:
    """Received signal power at radar k over one PRI, in watts.

    Sums P_j |g_rx_k|^2 |g_tx_j|^2 |u_kj^H theta + c_kj|^2 over the probing
    radars j; with a common transmit power this is P times the per-radar
    stealth objective.
    """
    theta = np.asarray(theta)
    beta = scenario.target.irs.beta_max
    if np.max(np.abs(theta), initial=0.0) > beta + 1e-9:
        raise ValueError("reflection amplitudes exceed beta_max")
    gains = beamforming_gains(scenario)
    u, _ = cascaded_vectors(scenario)
    w = link_weights(scenario, gains)
    reflection = np.einsum("jn,n->j", u[k].conj(), theta) + gains.c_nirs[k]
    return float(np.sum(w[k] * np.abs(reflection) ** 2))


def sum_power(theta: np.ndarray, scenario: Scenario) -> float:
    """Sum of the received signal powers over all radars, in watts."""
    theta = np.asarray(theta)
    beta = scenario.target.irs.beta_max
    if np.max(np.abs(theta), initial=0.0) > beta + 1e-9:
        raise ValueError("reflection amplitudes exceed beta_max")
    gains = beamforming_gains(scenario)
    u, _ = cascaded_vectors(scenario)
    w = link_weights(scenario, gains)
    reflection = np.einsum("kjn,n->kj", u.conj(), theta) + gains.c_nirs
    return float(np.sum(w * np.abs(reflection) ** 2))
