"""Experiment presets, Monte-Carlo execution, and CSV emission.

Every preset sweeps one variable, runs the applicable reflection designs at
each sweep point for a number of independent trials, and records the sum
received power per (sweep value, solver, trial).  Trial seeds derive from
the config seed, so a given (config, trials) pair produces a byte-identical
CSV every run.  Designs may be computed from perturbed or estimated
parameters (the imperfect-information presets), but powers are always
evaluated on the true scenario.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .arrays import AnglePair, cascaded_response, split_ts_response, upa_response
from .config import ScenarioConfig, build_scenario, watts_to_db, with_seed
from .estimation import estimate_parameters
from .optimizers import (QcqpInstance, build_instance,
                         build_instance_from_estimates, dft_codebook_design,
                         min_irs_elements, mmse_delta_search, random_phase,
                         reverse_alignment, ridge_delta_search, solve_pgd)
from .power_model import (angles_at_target, beamforming_gains,
                          cascaded_vectors, link_weights, sum_power)

PRESET_NAMES = ("power-vs-distance", "power-vs-elements", "power-vs-angle",
                "power-vs-aoa-error", "power-vs-num-radars",
                "min-elements-validation", "estimation-pipeline")


@dataclass(frozen=True)
class ExperimentRow:
    sweep: float
    solver: str
    trial: int
    seed: int
    power_watts: float
    power_db: float


@dataclass
class ExperimentResult:
    sweep_name: str
    sweep_values: tuple
    rows: tuple[ExperimentRow, ...]
    metadata: dict = field(default_factory=dict)


def trial_seeds(master_seed: int, trials: int) -> np.ndarray:
    """Independent per-trial seeds derived from the master seed."""
    return np.random.SeedSequence(master_seed).generate_state(trials)


def inject_aoa_error(truth: AnglePair, error_deg: float, seed) -> AnglePair:
    """Perturb the azimuth by the stated magnitude with a random sign.

    Elevation is left unchanged; the result is clamped into the open
    admissible interval when the perturbation would leave it.
    """
    if error_deg < 0:
        raise ValueError(f"error magnitude must be nonnegative, got {error_deg}")
    if error_deg == 0:
        return truth
    rng = np.random.default_rng(seed)
    sign = 1.0 if rng.random() < 0.5 else -1.0
    half = np.pi / 2
    eps = 1e-9
    azimuth = float(np.clip(truth.azimuth + sign * np.deg2rad(error_deg),
                            -half + eps, half - eps))
    return AnglePair(azimuth, truth.elevation)


def _single_radar_data(scenario):
    gains = beamforming_gains(scenario)
    u_vec = cascaded_vectors(scenario)[0][0, 0]
    return u_vec, gains.c_nirs[0, 0]


def solver_powers(scenario, trial_seed: int, design=None) -> dict[str, float]:
    """Sum received power of every applicable design on the true scenario.

    ``design`` optionally carries perturbed-parameter data as a dict with
    keys ``instance`` (objective data for the optimizing and codebook
    designs), ``system`` (stacked matrix and right-hand side for the ridge
    design) and, for the single-radar case, ``cascaded``/``c_gain`` for the
    closed form.  Baselines never look at it.
    """
    design = design or {}
    instance = design.get("instance")
    if instance is None:
        instance = build_instance(scenario)
    n1 = scenario.target.irs_geometry.num_elements
    beta = scenario.target.irs.beta_max
    thetas = {"pgd": solve_pgd(instance).theta}
    if scenario.num_radars == 1:
        if "cascaded" in design:
            u_vec, c_gain = design["cascaded"], design["c_gain"]
        else:
            u_vec, c_gain = _single_radar_data(scenario)
        thetas["reverse-alignment"] = reverse_alignment(u_vec, c_gain, beta).theta
    else:
        system = design.get("system")
        if system is None:
            thetas["mmse"] = mmse_delta_search(scenario)[1].theta
        else:
            thetas["mmse"] = ridge_delta_search(system[0], system[1], beta)[1].theta
    thetas["dft-codebook"] = dft_codebook_design(instance).theta
    thetas["random-phase"] = random_phase(n1, beta, int(trial_seed) + 0x5EED)
    thetas["no-irs"] = np.zeros(n1, dtype=complex)
    return {name: sum_power(theta, scenario) for name, theta in thetas.items()}


def _sweep_rows(config, trials, sweep_values, scenario_for, design_for=None):
    rows = []
    seeds = trial_seeds(config.seed, trials)
    for value in sweep_values:
        for trial, seed in enumerate(seeds):
            scenario = scenario_for(value, int(seed))
            design = design_for(scenario, value, int(seed)) if design_for else None
            powers = solver_powers(scenario, int(seed), design)
            for solver, watts in sorted(powers.items()):
                rows.append(ExperimentRow(float(value), solver, trial, int(seed),
                                          float(watts), watts_to_db(watts)))
    return rows


def _scaled_positions(config: ScenarioConfig, factor: float) -> ScenarioConfig:
    radars = tuple(replace(r, position=tuple(factor * p for p in r.position))
                   for r in config.radars)
    target = replace(config.target,
                     position=tuple(factor * p for p in config.target.position))
    return replace(config, radars=radars, target=target)


def _preset_distance(config, trials):
    base = min(float(np.linalg.norm(np.asarray(r.position, dtype=float)
                                    - np.asarray(config.target.position, dtype=float)))
               for r in config.radars)
    sweep = (60.0, 80.0, 100.0, 120.0, 140.0, 160.0, 180.0, 200.0)

    def scenario_for(value, seed):
        return build_scenario(with_seed(_scaled_positions(config, value / base), seed))

    return "distance_m", sweep, _sweep_rows(config, trials, sweep, scenario_for)


def _preset_elements(config, trials):
    if len(config.radars) == 1:
        n1x_values = tuple(range(1, 17))
    else:
        n1x_values = (5, 10, 15, 20, 25, 30, 35, 40, 45)
    sweep = tuple(n * config.target.n1y for n in n1x_values)

    def scenario_for(value, seed):
        cfg = replace(config, target=replace(config.target,
                                             n1x=int(value) // config.target.n1y))
        return build_scenario(with_seed(cfg, seed))

    return "num_elements", sweep, _sweep_rows(config, trials, sweep, scenario_for)


def _preset_angle(config, trials):
    sweep = tuple(float(a) for a in range(-60, 61, 10))

    def scenario_for(value, seed):
        radars = tuple(replace(r, beam_azimuth_deg=value) for r in config.radars)
        return build_scenario(with_seed(replace(config, radars=radars), seed))

    return "beam_azimuth_deg", sweep, _sweep_rows(config, trials, sweep, scenario_for)


def steering_error_design(scenario, angles) -> dict:
    """Design data whose panel steering knowledge uses the given angles.

    Models an arrival-angle estimation error: the cascaded panel vectors are
    rebuilt from the (perturbed) angles while the coating reflection gains
    and beamforming weights keep their true, offline-calibrated values.
    """
    gains = beamforming_gains(scenario)
    weights = link_weights(scenario, gains)
    c_true = gains.c_nirs
    target = scenario.target
    k_r = scenario.num_radars
    blocks = []
    for pair in angles:
        full = upa_response(target.surface_geometry, pair, scenario.wavelength)
        blocks.append(split_ts_response(full, target.irs_geometry.nx,
                                        target.nirs_geometry.nx,
                                        target.irs_geometry.ny)[0])
    n1 = target.irs_geometry.num_elements
    u = np.zeros((k_r, k_r, n1), dtype=complex)
    for k in range(k_r):
        for j in range(k_r):
            u[k, j] = cascaded_response(blocks[k], blocks[j])
    u_mat = np.einsum("kj,kjn,kjm->nm", weights, u, u.conj())
    u_mat = 0.5 * (u_mat + u_mat.conj().T)
    v_vec = np.einsum("kj,kj,kjn->n", weights, c_true, u)
    c_const = float(np.sum(weights * np.abs(c_true) ** 2))
    design = {"instance": QcqpInstance(u_mat, v_vec, c_const,
                                       target.irs.beta_max)}
    if k_r == 1:
        design["cascaded"] = u[0, 0]
        design["c_gain"] = c_true[0, 0]
    else:
        amp = np.sqrt(weights).reshape(-1, 1)
        design["system"] = (amp * u.conj().reshape(k_r * k_r, -1),
                            (np.sqrt(weights) * c_true).reshape(-1))
    return design


def _preset_aoa_error(config, trials):
    sweep = (0.0, 0.5, 1.0, 2.0)

    def scenario_for(value, seed):
        return build_scenario(with_seed(config, seed))

    def design_for(scenario, value, seed):
        angles = [inject_aoa_error(angles_at_target(scenario, k), value, seed + k)
                  for k in range(scenario.num_radars)]
        return steering_error_design(scenario, angles)

    return "aoa_error_deg", sweep, _sweep_rows(config, trials, sweep, scenario_for,
                                               design_for)


def _preset_num_radars(config, trials):
    sweep = tuple(float(k) for k in range(1, len(config.radars) + 1))

    def scenario_for(value, seed):
        cfg = replace(config, radars=config.radars[: int(value)])
        return build_scenario(with_seed(cfg, seed))

    return "num_radars", sweep, _sweep_rows(config, trials, sweep, scenario_for)


def _preset_min_elements(config, trials, realizations: int = 20):
    """Residual power of the closed form around the predicted element count."""
    n2 = config.target.n2x * config.target.n2y
    n1y = config.target.n1y
    predicted = min_irs_elements(config.target.zeta, n2, config.target.beta_max,
                                 realizations)
    n1x_pred = max(1, math.ceil(predicted / n1y))
    sweep = tuple(n1x * n1y for n1x in range(max(1, n1x_pred - 2), n1x_pred + 2))
    rows = []
    seeds = trial_seeds(config.seed, trials)
    for value in sweep:
        cfg = replace(config, target=replace(config.target, n1x=int(value) // n1y))
        for trial, seed in enumerate(seeds):
            scenario = build_scenario(with_seed(cfg, int(seed)))
            u_vec, c_gain = _single_radar_data(scenario)
            sol = reverse_alignment(u_vec, c_gain, scenario.target.irs.beta_max)
            watts = sum_power(sol.theta, scenario)
            rows.append(ExperimentRow(float(value), "reverse-alignment", trial,
                                      int(seed), float(watts), watts_to_db(watts)))
    return "num_elements", sweep, rows


def _preset_estimation(config, trials):
    sweep = (16.0, 32.0, 64.0)
    rows = []
    seeds = trial_seeds(config.seed, trials)
    for value in sweep:
        for trial, seed in enumerate(seeds):
            scenario = build_scenario(with_seed(config, int(seed)))
            aoa, gains2 = estimate_parameters(scenario, n_snapshots=int(value),
                                              seed=int(seed) + 0xA0A)
            est_instance = build_instance_from_estimates(scenario, aoa.angles,
                                                         gains2.g2_tx)
            power_est = sum_power(solve_pgd(est_instance).theta, scenario)
            power_true = sum_power(solve_pgd(build_instance(scenario)).theta,
                                   scenario)
            for solver, watts in (("pgd-estimated", power_est),
                                  ("pgd-true", power_true)):
                rows.append(ExperimentRow(float(value), solver, trial, int(seed),
                                          float(watts), watts_to_db(watts)))
    return "num_snapshots", sweep, rows


_PRESETS = {
    "power-vs-distance": _preset_distance,
    "power-vs-elements": _preset_elements,
    "power-vs-angle": _preset_angle,
    "power-vs-aoa-error": _preset_aoa_error,
    "power-vs-num-radars": _preset_num_radars,
    "min-elements-validation": _preset_min_elements,
    "estimation-pipeline": _preset_estimation,
}


def run_experiment(preset: str, config: ScenarioConfig, trials: int) -> ExperimentResult:
    """Run a named preset sweep and collect one row per (value, solver, trial)."""
    if preset not in _PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose one of {PRESET_NAMES}")
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    sweep_name, sweep_values, rows = _PRESETS[preset](config, trials)
    rows = tuple(sorted(rows, key=lambda r: (r.sweep, r.solver, r.trial)))
    digest = hashlib.sha256(json.dumps(config.to_dict(), sort_keys=True)
                            .encode()).hexdigest()[:16]
    metadata = {"preset": preset, "config_hash": digest, "trials": trials,
                "master_seed": config.seed}
    return ExperimentResult(sweep_name, tuple(sweep_values), rows, metadata)


_CSV_HEADER = "sweep,solver,trial,seed,power_watts,power_db"


def _fmt(x: float) -> str:
    return np.format_float_scientific(x, unique=True)


def emit_csv(result: ExperimentResult, path) -> None:
    """Write rows in deterministic (sweep, solver, trial) order.

    Numbers are printed in round-trip-exact scientific notation, so parsing
    the file recovers the exact row values.
    """
    rows = sorted(result.rows, key=lambda r: (r.sweep, r.solver, r.trial))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_CSV_HEADER + "\n")
        for row in rows:
            fh.write(f"{_fmt(row.sweep)},{row.solver},{row.trial},{row.seed},"
                     f"{_fmt(row.power_watts)},{_fmt(row.power_db)}\n")


def parse_csv(path) -> ExperimentResult:
    """Inverse of :func:`emit_csv` up to row content (metadata is not stored)."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != _CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {header!r}")
        for line in fh:
            sweep, solver, trial, seed, watts, db = line.strip().split(",")
            rows.append(ExperimentRow(float(sweep), solver, int(trial), int(seed),
                                      float(watts), float(db)))
    values = tuple(sorted({r.sweep for r in rows}))
    return ExperimentResult("sweep", values, tuple(rows), {})
