#!/usr/bin/env python3
"""Run the full desk-scale experiment battery and write one CSV per sweep.

Produces the single- and multi-radar power sweeps (distance, element count,
beam direction, angle error, radar count), the minimum-element validation,
and the sensing-pipeline comparison.  Figures are not rendered; every CSV
has the columns sweep,solver,trial,seed,power_watts,power_db.
"""

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from irstealth.config import multi_radar_config, single_radar_config
from irstealth.experiments import emit_csv, run_experiment

SINGLE_PRESETS = ("power-vs-distance", "power-vs-elements", "power-vs-angle",
                  "power-vs-aoa-error", "min-elements-validation",
                  "estimation-pipeline")
MULTI_PRESETS = ("power-vs-distance", "power-vs-elements",
                 "power-vs-aoa-error", "power-vs-num-radars")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out", help="CSV output directory")
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = [(preset, single_radar_config(seed=args.seed), "single")
            for preset in SINGLE_PRESETS]
    jobs += [(preset, multi_radar_config(num_radars=5 if preset ==
                                         "power-vs-num-radars" else 3,
                                         seed=args.seed), "multi")
             for preset in MULTI_PRESETS]

    for preset, config, label in jobs:
        start = time.monotonic()
        trials = args.trials
        if preset == "min-elements-validation":
            trials = max(trials, 200)
        if preset == "estimation-pipeline":
            trials = min(trials, 10)
        result = run_experiment(preset, config, trials)
        path = out_dir / f"{label}_{preset.replace('-', '_')}.csv"
        emit_csv(result, path)
        print(f"{path}  rows={len(result.rows)}  "
              f"({time.monotonic() - start:.1f}s)")


if __name__ == "__main__":
    main()
