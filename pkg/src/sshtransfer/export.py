"""CSV/JSON writers. Floats are written with ``repr`` (shortest round-trip form)."""

import json

CONFIG_PREFIX = "# config: "


def fmt(x) -> str:
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def write_csv(stream, header, rows, config=None):
    """Write ``# config: key=value`` provenance lines, a header row, then rows."""
    for key, value in (config or {}).items():
        stream.write(f"{CONFIG_PREFIX}{key}={value}\n")
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(fmt(v) for v in row) + "\n")


def write_json(stream, payload, config=None):
    doc = {"config": dict(config or {})}
    doc.update(payload)
    json.dump(doc, stream, indent=2)
    stream.write("\n")


def curve_rows(curve):
    return [(float(t), float(f)) for t, f in curve]


def spectral_trace_rows(trace):
    return [(float(t), *map(float, row)) for t, row in zip(trace.times, trace.energies)]


def spectral_trace_header(n_sites):
    return ["t"] + [f"E_{m}" for m in range(1, n_sites + 1)]


def ensemble_rows(stats):
    return [
        (float(t), float(m), float(s), int(stats.n_realizations))
        for t, m, s in zip(stats.t_star_grid, stats.mean_fidelity, stats.std_fidelity)
    ]


ENSEMBLE_HEADER = ["t_star", "mean_fidelity", "std_fidelity", "n"]
SWEEP_HEADER = ["t_star", "fidelity"]
SPECTRUM_HEADER = ["index", "eigenvalue"]
ADIABATICITY_HEADER = ["t", "value"]


def read_config_lines(text: str) -> dict:
    """Config entries from either a plain ``key=value`` file or the provenance
    header of a previous output (CSV ``# config:`` lines or a JSON ``config`` object)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return {k: str(v) for k, v in json.loads(text).get("config", {}).items()}
    out = {}
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith(CONFIG_PREFIX.strip()):
            line = line[len(CONFIG_PREFIX.strip()):].strip()
        elif not line or line.startswith("#"):
            continue
        elif "=" not in line:
            break  # reached the data part of an output file
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line without '=': {raw!r}")
        out[key.strip().replace("-", "_")] = value.strip()
    return out
