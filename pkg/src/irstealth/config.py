"""Scenario configuration: JSON round trip and scenario construction.

Configs hold dB/dBm quantities at the boundary and convert to linear units
exactly once when the scenario is built.  Randomized scenario state (coating
phases, radar pulse clocks) is drawn from the config seed, so one config
maps to one reproducible scenario.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .arrays import ArrayGeometry, ArrayKind
from .power_model import (IrsPanel, NirsPanel, RadarNode, Scenario, Target,
                          angles_between, matched_beamformer, _RADAR_AXES)

SPEED_OF_LIGHT = 299792458.0


class ConfigError(ValueError):
    """Invalid configuration value; ``fieldpath`` names the offending field."""

    def __init__(self, fieldpath, message):
        super().__init__(f"{fieldpath}: {message}")
        self.fieldpath = fieldpath


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_db(watts: float) -> float:
    return float(10.0 * np.log10(watts)) if watts > 0 else float("-inf")


@dataclass(frozen=True)
class RadarConfig:
    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    mx: int = 8
    my: int = 8
    spacing: float = 0.025
    tx_power_dbm: float = 15.0
    pri: float = 100e-6
    pulse: float = 30e-6
    bandwidth: float = 100e6
    noise_dbm: float = -90.0
    beam_azimuth_deg: float | None = None


@dataclass(frozen=True)
class TargetConfig:
    position: tuple[float, float, float] = (0.0, 0.0, 100.0)
    n1x: int = 4
    n1y: int = 2
    n2x: int = 100
    n2y: int = 2
    spacing: float = 0.0125
    beta_max: float = 1.0
    zeta: float = 0.8
    cssa_lx: int = 5
    cssa_ly: int = 5
    cssa_noise_dbm: float = -90.0
    epoch_jitter: float = 2e-6


@dataclass(frozen=True)
class ScenarioConfig:
    wavelength: float = 0.05
    alpha_db: float = -30.0
    seed: int = 1
    radars: tuple[RadarConfig, ...] = field(default_factory=tuple)
    target: TargetConfig = field(default_factory=TargetConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        try:
            radars = tuple(RadarConfig(position=tuple(r["position"]),
                                       **{k: v for k, v in r.items() if k != "position"})
                           for r in data["radars"])
            target = TargetConfig(position=tuple(data["target"]["position"]),
                                  **{k: v for k, v in data["target"].items()
                                     if k != "position"})
            cfg = cls(wavelength=data["wavelength"], alpha_db=data["alpha_db"],
                      seed=data["seed"], radars=radars, target=target)
        except (KeyError, TypeError) as exc:
            raise ConfigError(str(exc), "missing or malformed field") from exc
        validate_config(cfg)
        return cfg

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def validate_config(cfg: ScenarioConfig) -> None:
    if cfg.wavelength <= 0:
        raise ConfigError("wavelength", f"must be positive, got {cfg.wavelength}")
    if not cfg.radars:
        raise ConfigError("radars", "need at least one radar")
    for i, radar in enumerate(cfg.radars):
        path = f"radars[{i}]"
        if radar.mx < 1 or radar.my < 1:
            raise ConfigError(f"{path}.mx", "antenna counts must be positive")
        if radar.spacing <= 0:
            raise ConfigError(f"{path}.spacing", "spacing must be positive")
        if not 0 < radar.pulse < radar.pri:
            raise ConfigError(f"{path}.pulse", "need 0 < pulse < pri")
        if not all(np.isfinite(radar.position)):
            raise ConfigError(f"{path}.position", "coordinates must be finite")
    tgt = cfg.target
    for name in ("n1x", "n1y", "n2x", "n2y", "cssa_lx", "cssa_ly"):
        if getattr(tgt, name) < 1:
            raise ConfigError(f"target.{name}", "element counts must be positive")
    if tgt.n1y != tgt.n2y:
        raise ConfigError("target.n2y", "panel and coating must share the y-grid")
    if not 0 < tgt.beta_max <= 1:
        raise ConfigError("target.beta_max", "must be in (0, 1]")
    if not 0 <= tgt.zeta <= 1:
        raise ConfigError("target.zeta", "must be in [0, 1]")
    if tgt.cssa_lx % 2 == 0 or tgt.cssa_ly % 2 == 0:
        raise ConfigError("target.cssa_lx", "sensing-array arms must be odd")
    if not all(np.isfinite(tgt.position)):
        raise ConfigError("target.position", "coordinates must be finite")
    if tgt.epoch_jitter < 0:
        raise ConfigError("target.epoch_jitter", "must be nonnegative")


def build_scenario(config: ScenarioConfig) -> Scenario:
    """Materialize a scenario from a config, drawing its random state."""
    validate_config(config)
    rng = np.random.default_rng(config.seed)
    tgt = config.target

    n2 = tgt.n2x * tgt.n2y
    zeta = np.full(n2, float(tgt.zeta))
    phases = rng.uniform(0.0, 2.0 * np.pi, n2)
    nirs = NirsPanel(np.sqrt(1.0 - zeta) * np.exp(1j * phases), zeta)

    n1 = tgt.n1x * tgt.n1y
    irs = IrsPanel(np.zeros(n1, dtype=complex), tgt.beta_max)

    target = Target(position=tuple(float(p) for p in tgt.position),
                    irs_geometry=ArrayGeometry(ArrayKind.UPA, tgt.n1x, tgt.n1y,
                                               tgt.spacing),
                    nirs_geometry=ArrayGeometry(ArrayKind.UPA, tgt.n2x, tgt.n2y,
                                                tgt.spacing),
                    irs=irs, nirs=nirs,
                    cssa_geometry=ArrayGeometry(ArrayKind.CSSA, tgt.cssa_lx,
                                                tgt.cssa_ly, tgt.spacing),
                    cssa_noise=dbm_to_watts(tgt.cssa_noise_dbm))

    radars = []
    for rc in config.radars:
        geom = ArrayGeometry(ArrayKind.UPA, rc.mx, rc.my, rc.spacing)
        if rc.beam_azimuth_deg is None:
            aim = angles_between(rc.position, tgt.position, _RADAR_AXES)
        else:
            from .arrays import AnglePair
            aim = AnglePair(np.deg2rad(rc.beam_azimuth_deg), 0.0)
        beam = matched_beamformer(geom, aim, config.wavelength)
        distance = float(np.linalg.norm(np.asarray(rc.position, dtype=float)
                                        - np.asarray(tgt.position, dtype=float)))
        epoch = distance / SPEED_OF_LIGHT + rng.uniform(0.0, tgt.epoch_jitter)
        radars.append(RadarNode(geometry=geom,
                                position=tuple(float(p) for p in rc.position),
                                beamformer=beam,
                                tx_power=dbm_to_watts(rc.tx_power_dbm),
                                pri=rc.pri, pulse=rc.pulse,
                                bandwidth=rc.bandwidth,
                                noise_power=dbm_to_watts(rc.noise_dbm),
                                pulse_epoch=float(epoch)))
    return Scenario(wavelength=config.wavelength, radars=tuple(radars),
                    target=target, ref_gain=db_to_linear(config.alpha_db),
                    seed=config.seed)


def single_radar_config(n1x: int = 4, distance: float = 100.0,
                        seed: int = 1) -> ScenarioConfig:
    """Default single-radar setup: target straight above one radar."""
    return ScenarioConfig(seed=seed,
                          radars=(RadarConfig(position=(0.0, 0.0, 0.0)),),
                          target=TargetConfig(position=(0.0, 0.0, distance),
                                              n1x=n1x))


def multi_radar_config(num_radars: int = 3, n1x: int = 25, height: float = 100.0,
                       lateral: float = 200.0, seed: int = 1) -> ScenarioConfig:
    """Multi-radar setup: one radar under the target, the rest fanned out.

    Radars two and three sit at azimuth +-45 degrees from the target, the
    optional fourth and fifth at +-22.5 degrees.  The fanned-out radars are
    offset laterally on the ground plane, so the overhead radar keeps the
    shortest range and the others probe from distinct 2D directions.
    """
    if not 1 <= num_radars <= 5:
        raise ConfigError("radars", f"supported sizes are 1..5, got {num_radars}")
    offsets_deg = (0.0, 45.0, -45.0, 22.5, -22.5)
    radars = [RadarConfig(position=(0.0, 0.0, 0.0))]
    for off in offsets_deg[1:num_radars]:
        radars.append(RadarConfig(position=(height * np.tan(np.deg2rad(off)),
                                            lateral, 0.0)))
    return ScenarioConfig(seed=seed, radars=tuple(radars),
                          target=TargetConfig(position=(0.0, 0.0, height), n1x=n1x))


def with_seed(config: ScenarioConfig, seed: int) -> ScenarioConfig:
    return replace(config, seed=int(seed))
