"""Clean-chain fidelity versus transfer time and the threshold times for each drive."""

import argparse
from pathlib import Path

import numpy as np

from sshtransfer import export
from sshtransfer.core import ChainSpec
from sshtransfer.propagator import PropagationConfig, fidelity_sweep, first_crossing, stabilization_time
from sshtransfer.protocols import Cosine, Exponential, TrivialLinear

GRIDS = {
    "exponential": np.arange(1.0, 201.0),
    "trivial": np.arange(1.0, 401.0),
    "cosine": np.arange(5.0, 1201.0, 5.0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/sweeps")
    ap.add_argument("--steps-per-unit", type=int, default=200)
    ap.add_argument("--threshold", type=float, default=0.9)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    chain = ChainSpec(31)
    cfg = PropagationConfig(args.steps_per_unit)
    protocols = {"exponential": Exponential(chain), "trivial": TrivialLinear(chain), "cosine": Cosine(chain)}
    for name, p in protocols.items():
        curve = fidelity_sweep(p, GRIDS[name], cfg, args.workers)
        ts = stabilization_time(curve, args.threshold)
        if name == "cosine" and ts is not None:
            # refine the crossing at unit resolution
            curve = sorted(curve + fidelity_sweep(p, np.arange(ts - 4.0, ts), cfg, args.workers))
            ts = stabilization_time(curve, args.threshold)
        with open(out / f"{name}.csv", "w") as fh:
            export.write_csv(fh, export.SWEEP_HEADER, export.curve_rows(curve),
                             {"protocol": name, "n": 31, "steps_per_unit": args.steps_per_unit})
        print(f"{name:12s} first reaches {args.threshold} at t*={first_crossing(curve, args.threshold)}, "
              f"stabilized from t*={ts}")


if __name__ == "__main__":
    main()
