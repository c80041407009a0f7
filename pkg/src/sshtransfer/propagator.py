"""Time evolution under a driven chain Hamiltonian, transfer fidelity and sweeps."""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .protocols import Protocol

# commutator-free fourth-order Magnus: two Gauss nodes, two exponentials per step
_GAUSS = (0.5 - math.sqrt(3.0) / 6.0, 0.5 + math.sqrt(3.0) / 6.0)
_CF_A = (3.0 - 2.0 * math.sqrt(3.0)) / 12.0
_CF_B = (3.0 + 2.0 * math.sqrt(3.0)) / 12.0

_SCHEMES = {
    # nodes within a step, stage weights (stage x node), applied in row order
    "magnus4": (np.array(_GAUSS), np.array([[_CF_B, _CF_A], [_CF_A, _CF_B]])),
    "midpoint": (np.array([0.5]), np.array([[1.0]])),
    "rk4": (np.array([0.0, 0.5, 1.0]), None),
}


class PropagationError(RuntimeError):
    def __init__(self, message, step=None, t_star=None):
        super().__init__(message)
        self.step = step
        self.t_star = t_star


@dataclass(frozen=True)
class PropagationConfig:
    """Integrator settings.

    ``method`` is ``magnus4`` (default), ``midpoint`` or ``rk4``; the two
    exponential schemes evaluate ``exp(-iH dt)`` either by a Taylor series
    truncated below double rounding (``exponential="taylor"``) or by
    eigendecomposition (``"spectral"``).
    """

    steps_per_unit_time: int = 200
    method: str = "magnus4"
    exponential: str = "taylor"
    chunk_steps: int = 4096

    def __post_init__(self):
        if self.method not in _SCHEMES:
            raise ValueError(f"unknown method {self.method!r}")
        if self.exponential not in ("taylor", "spectral"):
            raise ValueError(f"unknown exponential evaluation {self.exponential!r}")
        if int(self.steps_per_unit_time) != self.steps_per_unit_time or self.steps_per_unit_time < 1:
            raise ValueError("steps_per_unit_time must be a positive integer")

    def halved(self) -> "PropagationConfig":
        """Same settings with the time step halved."""
        return PropagationConfig(2 * self.steps_per_unit_time, self.method, self.exponential, self.chunk_steps)


@dataclass(frozen=True)
class TransferResult:
    fidelity: float
    final_state: np.ndarray
    norm_drift: float
    t_star: float


def site_state(n_sites: int, site: int) -> np.ndarray:
    """Single excitation on ``site`` (1-based)."""
    if not 1 <= site <= n_sites:
        raise ValueError(f"site {site} outside 1..{n_sites}")
    psi = np.zeros(n_sites, dtype=complex)
    psi[site - 1] = 1.0
    return psi


def fidelity(final) -> float:
    """Population of the last site."""
    return float(abs(np.asarray(final)[-1]) ** 2)


def average_state_fidelity(f: float) -> float:
    """Fidelity averaged over all qubit input states, given the last-site fidelity."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {f}")
    return 1.0 / 3.0 + (1.0 + f) ** 2 / 6.0


def n_steps_for(t_star: float, cfg: PropagationConfig) -> int:
    return max(1, math.ceil(t_star * cfg.steps_per_unit_time * (1.0 - 1e-12)))


def propagate(p: Protocol, t_star: float, cfg: PropagationConfig = None, initial=None, overlay=None) -> TransferResult:
    """Evolve ``initial`` (default: excitation on site 1) from t=0 to t_star.

    ``overlay`` is an optional static perturbation with ``delta_j`` / ``delta_b``
    arrays; couplings become ``J(t)(1+delta_j)`` and fields ``B + delta_b``.
    """
    cfg = cfg or PropagationConfig()
    if not (t_star > 0 and math.isfinite(t_star)):
        raise ValueError(f"t_star must be positive and finite, got {t_star}")
    n = p.n_sites
    psi = site_state(n, 1) if initial is None else np.array(initial, dtype=complex)
    if psi.shape != (n,):
        raise ValueError(f"initial state must have {n} amplitudes, got shape {psi.shape}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError(f"initial state is not normalized (norm {np.linalg.norm(psi)!r})")

    jscale = np.ones(n - 1)
    fields = np.array(p.fields(), dtype=float)
    if overlay is not None:
        jscale = jscale + np.asarray(overlay.delta_j, dtype=float)
        fields = fields + np.asarray(overlay.delta_b, dtype=float)
    if not (np.all(np.isfinite(jscale)) and np.all(np.isfinite(fields))):
        raise PropagationError("non-finite disorder overlay", step=0, t_star=t_star)

    steps = n_steps_for(t_star, cfg)
    dt = t_star / steps
    nodes, weights = _SCHEMES[cfg.method]
    for start in range(0, steps, cfg.chunk_steps):
        idx = np.arange(start, min(start + cfg.chunk_steps, steps), dtype=float)
        s = (idx[:, None] + nodes[None, :]) / steps
        node_j = p.profile(s.ravel()).reshape(idx.shape[0], nodes.shape[0], n - 1)
        bad = ~np.all(np.isfinite(node_j), axis=(1, 2))
        if bad.any():
            k = start + int(np.argmax(bad))
            raise PropagationError(f"non-finite Hamiltonian at step {k}", step=k, t_star=t_star)
        if weights is None:
            _kernels.evolve_rk4(psi, node_j, jscale, fields, dt)
            continue
        stage_j = np.ascontiguousarray(np.einsum("sq,mqi->msi", weights, node_j))
        stage_b = weights.sum(axis=1)
        if cfg.exponential == "taylor":
            _kernels.evolve_taylor(psi, stage_j, jscale, stage_b, fields, dt)
        else:
            bad_step = _kernels.evolve_spectral(psi, stage_j, jscale, stage_b, fields, dt)
            if bad_step:
                k = start + bad_step - 1
                raise PropagationError(f"eigensolver failed at step {k}", step=k, t_star=t_star)
    if not np.all(np.isfinite(psi)):
        raise PropagationError("state became non-finite", step=steps, t_star=t_star)
    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    return TransferResult(fidelity(psi), psi, drift, float(t_star))


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("t_star grid must be a non-empty 1-D sequence")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("t_star grid must be positive and strictly increasing")
    return grid


def map_ordered(fn, items, workers=1):
    """``[fn(x) for x in items]``, optionally on a thread pool; order preserved."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def fidelity_sweep(p: Protocol, t_star_grid, cfg: PropagationConfig = None, workers: int = 1):
    """[(t_star, fidelity)] with one independent propagation per grid point."""
    grid = _check_grid(t_star_grid)
    cfg = cfg or PropagationConfig()

    def run(ts):
        try:
            return propagate(p, ts, cfg)
        except PropagationError as exc:
            raise PropagationError(f"t_star={ts}: {exc}", step=exc.step, t_star=ts) from exc

    results = map_ordered(run, grid.tolist(), workers)
    return [(r.t_star, r.fidelity) for r in results]


def stabilization_time(curve, threshold: float = 0.9):
    """Smallest grid t* from which the fidelity never drops below ``threshold`` again."""
    if len(curve) == 0:
        raise ValueError("empty curve")
    found = None
    for t, f in reversed(list(curve)):
        if f < threshold:
            break
        found = t
    return found


def first_crossing(curve, threshold: float = 0.9):
    """First grid t* at which the fidelity reaches ``threshold``, or None."""
    for t, f in curve:
        if f >= threshold:
            return t
    return None


def oscillation_amplitude(curve, window: int = 10, until=None) -> float:
    """Largest max-min of the fidelity over any ``window`` consecutive grid points
    with t* < ``until`` (all points if None)."""
    f = np.array([fv for t, fv in curve if until is None or t < until])
    if f.size < window:
        return float(np.ptp(f)) if f.size else 0.0
    windows = np.lib.stride_tricks.sliding_window_view(f, window)
    return float(np.max(windows.max(axis=1) - windows.min(axis=1)))


def total_descent(curve, until=None) -> float:
    """Sum of all fidelity decreases between consecutive grid points with t* < ``until``.

    Unlike a window max-min this ignores a monotone rise, so it only sees
    genuine back-and-forth oscillation.
    """
    f = np.array([fv for t, fv in curve if until is None or t < until])
    if f.size < 2:
        return 0.0
    return float(np.maximum(-np.diff(f), 0.0).sum())
