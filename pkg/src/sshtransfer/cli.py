"""Command-line front end.

Subcommands: ``sweep``, ``spectrum``, ``disorder``, ``optimize``, ``gap``.

Protocols are given as a kind plus optional parameters, either inline
(``--protocol "exponential alpha=6.0"``) or through ``--alpha`` / ``--b``.
Kinds: ``exponential`` (alpha, default 6), ``cosine`` (b, default 0.5),
``trivial``, ``uniform`` (j, a frozen uniform chain).

Settings can also come from ``--config FILE``: a flat ``key=value`` file, or a
previous output file whose provenance header is read back.  Flags override
the file.  Exit codes: 0 success, 1 numerical failure, 2 usage/config error.
"""

import argparse
import math
import sys
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import export
from .core import ChainSpec, DegenerateSpectrumError, eigendecompose, half_gap, ssh_gap
from .diagnostics import adiabaticity_report, spectral_trace
from .disorder import KINDS, DisorderSpec, ensemble_sweep
from .optimizer import BASES, CrabBasis, CrabCorrection, SearchConfig, dress, optimize
from .propagator import (
    PropagationConfig,
    PropagationError,
    fidelity_sweep,
    first_crossing,
    stabilization_time,
)
from .protocols import couplings_at, hamiltonian_at, parse_protocol


@dataclass
class RunConfig:
    protocol: str = "exponential"
    alpha: Optional[float] = None
    b: Optional[float] = None
    n: int = 31
    t_star: Optional[float] = None
    at: Optional[float] = None
    grid: Optional[str] = None
    log_grid: Optional[str] = None
    steps_per_unit: int = 200
    method: str = "magnus4"
    threshold: float = 0.9
    samples: int = 1001
    ds: float = 0.0
    kind: str = "off_diagonal"
    n_real: int = 1000
    seed: int = 0
    workers: int = 1
    basis: str = "fourier"
    n_terms: int = 4
    max_evals: int = 500
    starts: int = 4
    j_odd: Optional[float] = None
    j_even: Optional[float] = None
    out: Optional[str] = None
    adiabatic_out: Optional[str] = None
    format: str = "csv"

    # keys echoed into output headers, per subcommand
    ECHO = {
        "sweep": ("protocol", "n", "grid", "log_grid", "steps_per_unit", "method", "threshold", "format"),
        "spectrum": ("protocol", "n", "t_star", "at", "samples", "format"),
        "disorder": ("protocol", "n", "grid", "log_grid", "steps_per_unit", "method",
                     "ds", "kind", "n_real", "seed", "format"),
        "optimize": ("protocol", "n", "t_star", "steps_per_unit", "method", "basis",
                     "n_terms", "max_evals", "starts", "seed"),
        "gap": ("j_odd", "j_even", "n"),
    }

    @classmethod
    def from_sources(cls, file_values: dict, flag_values: dict) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        merged = {}
        for source in (file_values, flag_values):
            for key, value in source.items():
                if key not in known:
                    raise ValueError(f"unknown config key {key!r}")
                if value is not None:
                    merged[key] = value
        cfg = cls()
        for key, value in merged.items():
            setattr(cfg, key, _coerce(known[key], value))
        return cfg

    def protocol_text(self) -> str:
        text = self.protocol.strip()
        kind = text.split()[0].lower() if text else ""
        if kind == "exponential" and self.alpha is not None:
            text = " ".join([p for p in text.split() if not p.startswith("alpha=")] + [f"alpha={self.alpha!r}"])
        if kind == "cosine" and self.b is not None:
            text = " ".join([p for p in text.split() if not p.startswith("b=")] + [f"b={self.b!r}"])
        return text

    def echo(self, command: str) -> dict:
        out = {}
        for key in self.ECHO[command]:
            value = self.protocol_text() if key == "protocol" else getattr(self, key)
            if value is not None:
                out[key] = value
        return out


def _coerce(f, value):
    if not isinstance(value, str):
        return value
    kind = f.type
    for t in (int, float, str):
        if kind in (t, Optional[t]):
            if t is int:
                return int(value)
            return t(value)
    return value


def parse_grid(cfg: RunConfig) -> np.ndarray:
    if cfg.grid and cfg.log_grid:
        raise ValueError("give either --grid or --log-grid, not both")
    if cfg.grid:
        parts = cfg.grid.split(":")
        if len(parts) != 3:
            raise ValueError(f"--grid expects start:stop:step, got {cfg.grid!r}")
        start, stop, step = map(float, parts)
        if step <= 0:
            raise ValueError("grid step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        grid = start + step * np.arange(max(count, 0))
    elif cfg.log_grid:
        parts = cfg.log_grid.split(":")
        if len(parts) != 3:
            raise ValueError(f"--log-grid expects start:stop:count, got {cfg.log_grid!r}")
        grid = np.geomspace(float(parts[0]), float(parts[1]), int(parts[2]))
    else:
        raise ValueError("a t* grid is required (--grid start:stop:step or --log-grid start:stop:count)")
    if grid.size == 0:
        raise ValueError("t* grid is empty")
    if np.any(grid <= 0):
        raise ValueError("t* grid must be positive")
    return grid


def _propagation(cfg: RunConfig) -> PropagationConfig:
    return PropagationConfig(steps_per_unit_time=cfg.steps_per_unit, method=cfg.method)


class _Output:
    """Data goes to --out (summary to stdout) or, without --out, to stdout (summary to stderr)."""

    def __init__(self, path):
        self.path = path

    def __enter__(self):
        self.stream = open(self.path, "w", newline="") if self.path else sys.stdout
        self.summary = sys.stdout if self.path else sys.stderr
        return self

    def __exit__(self, *exc):
        if self.path:
            self.stream.close()


def _write(out, cfg, command, header, rows, payload):
    if cfg.format == "json":
        export.write_json(out.stream, payload, cfg.echo(command))
    else:
        export.write_csv(out.stream, header, rows, cfg.echo(command))


# each command returns a zero-argument callable: building it may raise config errors,
# calling it may raise numerical ones


def cmd_sweep(cfg: RunConfig):
    p = parse_protocol(cfg.protocol_text(), ChainSpec(cfg.n))
    grid = parse_grid(cfg)
    prop = _propagation(cfg)

    def run():
        curve = fidelity_sweep(p, grid, prop, workers=cfg.workers)
        rows = export.curve_rows(curve)
        payload = {"t_star": [r[0] for r in rows], "fidelity": [r[1] for r in rows]}
        with _Output(cfg.out) as out:
            _write(out, cfg, "sweep", export.SWEEP_HEADER, rows, payload)
            ts = stabilization_time(curve, cfg.threshold)
            first = first_crossing(curve, cfg.threshold)
            if ts is None:
                print(f"never stabilized >={cfg.threshold} on this grid", file=out.summary)
            else:
                print(f"stabilized >={cfg.threshold} at t*={ts:g}", file=out.summary)
            if first is not None:
                print(f"first reached {cfg.threshold} at t*={first:g}", file=out.summary)

    return run


def cmd_spectrum(cfg: RunConfig):
    p = parse_protocol(cfg.protocol_text(), ChainSpec(cfg.n))
    t_star = 1.0 if cfg.t_star is None else cfg.t_star
    if not t_star > 0:
        raise ValueError("--t-star must be positive")
    if cfg.samples < 2:
        raise ValueError("--samples must be >= 2")
    if cfg.at is not None and not 0 <= cfg.at <= t_star:
        raise ValueError(f"--at must lie in [0, {t_star}]")

    def run():
        with _Output(cfg.out) as out:
            if cfg.at is not None:
                spec = eigendecompose(hamiltonian_at(p, cfg.at, t_star))
                rows = [(m + 1, float(e)) for m, e in enumerate(spec.eigenvalues)]
                payload = {"t": cfg.at, "eigenvalues": [r[1] for r in rows]}
                _write(out, cfg, "spectrum", export.SPECTRUM_HEADER, rows, payload)
                return
            trace = spectral_trace(p, t_star, cfg.samples)
            rows = export.spectral_trace_rows(trace)
            payload = {"t": trace.times.tolist(), "energies": trace.energies.tolist()}
            _write(out, cfg, "spectrum", export.spectral_trace_header(p.n_sites), rows, payload)
            gmin, tmin = trace.min_half_gap()
            gmax, tmax = trace.max_half_gap()
            print(f"min half-gap {gmin:.6f} at t={tmin:g}", file=out.summary)
            print(f"max half-gap {gmax:.6f} at t={tmax:g}", file=out.summary)
        if cfg.adiabatic_out:
            rep = adiabaticity_report(p, t_star, cfg.samples)
            with open(cfg.adiabatic_out, "w", newline="") as fh:
                export.write_csv(
                    fh, export.ADIABATICITY_HEADER, list(zip(rep.times, rep.values)), cfg.echo("spectrum")
                )

    return run


def cmd_disorder(cfg: RunConfig):
    p = parse_protocol(cfg.protocol_text(), ChainSpec(cfg.n))
    grid = parse_grid(cfg)
    spec = DisorderSpec(cfg.ds, cfg.kind, cfg.seed)
    if cfg.n_real < 2:
        raise ValueError("--n-real must be >= 2")
    prop = _propagation(cfg)

    def run():
        stats = ensemble_sweep(p, grid, spec, cfg.n_real, prop, workers=cfg.workers)
        with _Output(cfg.out) as out:
            _write(out, cfg, "disorder", export.ENSEMBLE_HEADER, export.ensemble_rows(stats), stats.to_dict())
            k = int(np.argmax(stats.mean_fidelity))
            print(
                f"best mean fidelity {stats.mean_fidelity[k]:.6f} +- {stats.std_fidelity[k]:.6f} "
                f"at t*={stats.t_star_grid[k]:g} ({stats.n_realizations} realizations)",
                file=out.summary,
            )

    return run


def cmd_optimize(cfg: RunConfig):
    p = parse_protocol(cfg.protocol_text(), ChainSpec(cfg.n))
    if cfg.t_star is None or not cfg.t_star > 0:
        raise ValueError("--t-star must be given and positive")
    if cfg.basis not in BASES:
        raise ValueError(f"--basis must be one of {BASES}")
    basis = CrabBasis(cfg.basis, cfg.n_terms)
    search = SearchConfig(max_evals=cfg.max_evals, n_starts=cfg.starts, seed=cfg.seed)
    prop = _propagation(cfg)
    dress(p, CrabCorrection(cfg.basis))  # rejects protocols that cannot be dressed

    def run():
        res = optimize(p, cfg.t_star, basis, search, prop, workers=cfg.workers)
        mid = couplings_at(dress(p, res.correction), cfg.t_star / 2, cfg.t_star)
        payload = res.to_dict()
        payload["couplings_at_half_time"] = mid.tolist()
        with _Output(cfg.out) as out:
            export.write_json(out.stream, payload, cfg.echo("optimize"))
            print(
                f"guess fidelity {res.guess_fidelity:.6f} -> best {res.best_fidelity:.6f} "
                f"({res.n_evaluations} evaluations, converged={res.converged})",
                file=out.summary,
            )
            print(f"dressed J_1(t*/2) = {mid[0]:.6f}", file=out.summary)

    return run


def cmd_gap(cfg: RunConfig):
    if cfg.j_odd is None or cfg.j_even is None:
        raise ValueError("--j-odd and --j-even are required")
    if cfg.j_odd < 0 or cfg.j_even < 0:
        raise ValueError("couplings must be non-negative")
    args = (cfg.j_odd, cfg.j_even, cfg.n)
    g, h = ssh_gap(*args), half_gap(*args)

    def run():
        print(f"gap {g:.4f} (2*eps_[N/2] = {g!r})")
        print(f"half-gap {h:.4f} (eps_[N/2] = {h!r})")

    return run


COMMANDS = {
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
    "disorder": cmd_disorder,
    "optimize": cmd_optimize,
    "gap": cmd_gap,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sshtransfer", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS
    for name in COMMANDS:
        sp = sub.add_parser(name, argument_default=S)
        sp.add_argument("--config", help="key=value file or a previous output to re-run")
        sp.add_argument("--n", type=int, help="chain length (default 31)")
        if name == "gap":
            sp.add_argument("--j-odd", type=float)
            sp.add_argument("--j-even", type=float)
            continue
        sp.add_argument("--protocol", help="cosine | exponential | trivial | uniform, optionally with key=value params")
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--b", type=float)
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"))
        if name in ("sweep", "disorder"):
            sp.add_argument("--grid", help="start:stop:step, inclusive")
            sp.add_argument("--log-grid", help="start:stop:count, log-spaced")
        if name in ("sweep", "disorder", "optimize"):
            sp.add_argument("--steps-per-unit", type=int)
            sp.add_argument("--method", choices=("magnus4", "midpoint", "rk4"))
            sp.add_argument("--workers", type=int)
        if name in ("spectrum", "optimize"):
            sp.add_argument("--t-star", type=float)
        if name == "sweep":
            sp.add_argument("--threshold", type=float)
        if name == "spectrum":
            sp.add_argument("--samples", type=int)
            sp.add_argument("--at", type=float, help="write index,eigenvalue at this single time")
            sp.add_argument("--adiabatic-out", help="also write the adiabaticity sum (t,value)")
        if name == "disorder":
            sp.add_argument("--ds", type=float)
            sp.add_argument("--kind", choices=KINDS)
            sp.add_argument("--n-real", type=int)
        if name in ("disorder", "optimize"):
            sp.add_argument("--seed", type=int)
        if name == "optimize":
            sp.add_argument("--basis", choices=BASES)
            sp.add_argument("--n-terms", type=int)
            sp.add_argument("--max-evals", type=int)
            sp.add_argument("--starts", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))  # exits 2 on usage errors
    command = args.pop("command")
    config_path = args.pop("config", None)
    try:
        file_values = {}
        if config_path:
            with open(config_path) as fh:
                file_values = export.read_config_lines(fh.read())
        cfg = RunConfig.from_sources(file_values, args)
        run = COMMANDS[command](cfg)
    except (ValueError, OSError) as exc:
        print(f"sshtransfer {command}: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    try:
        run()
    except (PropagationError, DegenerateSpectrumError, np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        print(f"sshtransfer {command}: numerical failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
