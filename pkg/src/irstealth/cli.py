"""Command-line front end: run preset experiments, solve one scenario, size the panel."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import (ConfigError, ScenarioConfig, build_scenario,
                     single_radar_config, with_seed)
from .experiments import PRESET_NAMES, emit_csv, run_experiment
from .optimizers import (ConvergenceError, InfeasibleError, build_instance,
                         dft_codebook_search, min_irs_elements,
                         mmse_delta_search, random_phase, reverse_alignment,
                         solve_pgd)
from .power_model import beamforming_gains, cascaded_vectors, sum_power

SOLVER_NAMES = ("pgd", "reverse-alignment", "mmse", "dft-codebook", "random-phase",
                "no-irs")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irstealth",
                                     description="IRS-aided electromagnetic "
                                                 "stealth simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset experiment sweep")
    run.add_argument("preset", choices=PRESET_NAMES)
    run.add_argument("--config", help="scenario config JSON (default: built-in "
                                      "single-radar setup)")
    run.add_argument("--trials", type=int, default=10)
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--out", required=True, help="output CSV path")

    mins = sub.add_parser("min-elements", help="predicted element count for stealth")
    mins.add_argument("--zeta-bar", type=float, required=True)
    mins.add_argument("--n2", type=int, required=True)
    mins.add_argument("--beta-max", type=float, default=1.0)
    mins.add_argument("--realizations", type=int, default=20)

    solve = sub.add_parser("solve", help="design a reflection vector for one scenario")
    solve.add_argument("--config", help="scenario config JSON (default: built-in "
                                        "single-radar setup)")
    solve.add_argument("--solver", choices=SOLVER_NAMES, default="pgd")
    solve.add_argument("--seed", type=int, help="override the config seed")
    return parser


def _load_config(path, seed) -> ScenarioConfig:
    config = ScenarioConfig.load(path) if path else single_radar_config()
    if seed is not None:
        config = with_seed(config, seed)
    return config


def _cmd_run(args) -> int:
    config = _load_config(args.config, args.seed)
    result = run_experiment(args.preset, config, args.trials)
    emit_csv(result, args.out)
    print(f"wrote {len(result.rows)} rows to {args.out}")
    return 0


def _cmd_min_elements(args) -> int:
    count = min_irs_elements(args.zeta_bar, args.n2, args.beta_max,
                             args.realizations)
    print(count)
    return 0


def _cmd_solve(args) -> int:
    config = _load_config(args.config, args.seed)
    scenario = build_scenario(config)
    n1 = scenario.target.irs_geometry.num_elements
    beta = scenario.target.irs.beta_max
    if args.solver == "pgd":
        theta = solve_pgd(build_instance(scenario)).theta
    elif args.solver == "reverse-alignment":
        if scenario.num_radars != 1:
            raise ValueError("reverse-alignment applies to single-radar scenarios")
        gains = beamforming_gains(scenario)
        u_vec = cascaded_vectors(scenario)[0][0, 0]
        theta = reverse_alignment(u_vec, gains.c_nirs[0, 0], beta).theta
    elif args.solver == "mmse":
        theta = mmse_delta_search(scenario)[1].theta
    elif args.solver == "dft-codebook":
        theta = dft_codebook_search(scenario).theta
    elif args.solver == "random-phase":
        theta = random_phase(n1, beta, config.seed + 0x5EED)
    else:
        theta = np.zeros(n1, dtype=complex)
    print(f"solver: {args.solver}")
    print(f"objective_watts: {np.format_float_scientific(sum_power(theta, scenario), unique=True)}")
    for n, value in enumerate(theta):
        print(f"theta[{n}] = {value.real:+.12e}{value.imag:+.12e}j")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "min-elements": _cmd_min_elements,
                "solve": _cmd_solve}
    try:
        return handlers[args.command](args)
    except (ConfigError, ValueError, InfeasibleError, ConvergenceError,
            np.linalg.LinAlgError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
