"""Exponential drive at several steepness values: stabilization time and oscillation."""

import argparse
from pathlib import Path

import numpy as np

from sshtransfer import export
from sshtransfer.core import ChainSpec
from sshtransfer.propagator import (
    PropagationConfig,
    fidelity_sweep,
    oscillation_amplitude,
    stabilization_time,
    total_descent,
)
from sshtransfer.protocols import Exponential


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/alpha")
    ap.add_argument("--alphas", default="2,4,6,8,10")
    ap.add_argument("--grid", default="10:150:1")
    ap.add_argument("--steps-per-unit", type=int, default=200)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    start, stop, step = map(float, args.grid.split(":"))
    grid = np.arange(start, stop + step / 2, step)
    cfg = PropagationConfig(args.steps_per_unit)
    for a in map(float, args.alphas.split(",")):
        curve = fidelity_sweep(Exponential(ChainSpec(31), a), grid, cfg)
        ts = stabilization_time(curve)
        with open(out / f"alpha_{a:g}.csv", "w") as fh:
            export.write_csv(fh, export.SWEEP_HEADER, export.curve_rows(curve),
                             {"protocol": f"exponential alpha={a!r}", "n": 31, "grid": args.grid})
        print(f"alpha={a:<4g} stabilized from t*={ts}, window max-min {oscillation_amplitude(curve, 10, ts):.4f}, "
              f"total descent {total_descent(curve, ts):.4f}")


if __name__ == "__main__":
    main()
