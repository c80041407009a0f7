"""Chopped-random-basis dressing of a guess protocol and simplex search over it."""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .propagator import PropagationConfig, map_ordered, propagate
from .protocols import Cosine, CrabDressed, Exponential, Protocol, TrivialLinear

BASES = ("fourier", "polynomial")


@dataclass(frozen=True)
class CrabCorrection:
    """Multiplicative correction ``1 + sin(pi s) * sum_k c_k f_k(s)``.

    Fourier terms are ``cos(w_k s)``; polynomial terms are ``(2s - 1)**k``.
    The sine envelope pins the factor to 1 at both ends of the drive.
    """

    basis: str = "fourier"
    n_terms: int = 0
    coefficients: tuple = ()
    frequencies: tuple = ()

    def __post_init__(self):
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}")
        if len(self.coefficients) != self.n_terms:
            raise ValueError(
                f"n_terms={self.n_terms} but {len(self.coefficients)} coefficients given"
            )
        want = self.n_terms if self.basis == "fourier" else 0
        if len(self.frequencies) != want:
            raise ValueError(f"{self.basis} basis needs {want} frequencies, got {len(self.frequencies)}")

    def _terms(self, s):
        c = np.asarray(self.coefficients, dtype=float)
        if self.basis == "fourier":
            w = np.asarray(self.frequencies, dtype=float)
            g = np.cos(np.outer(s, w)) @ c
            dg = -(np.sin(np.outer(s, w)) * w) @ c
        else:
            x = 2.0 * s - 1.0
            k = np.arange(self.n_terms)
            g = np.power.outer(x, k) @ c
            dg = (2.0 * k * np.power.outer(x, np.maximum(k - 1, 0))) @ c
        return g, dg

    def factor(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.n_terms == 0:
            return np.ones_like(s)
        g, _ = self._terms(s)
        return 1.0 + np.sin(np.pi * s) * g

    def factor_rate(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if self.n_terms == 0:
            return np.zeros_like(s)
        g, dg = self._terms(s)
        return np.pi * np.cos(np.pi * s) * g + np.sin(np.pi * s) * dg


def harmonic_frequencies(n_terms: int, rng: np.random.Generator) -> tuple:
    """w_k = pi k (1 + r_k), r_k ~ U(-1/2, 1/2), k = 0..n_terms-1 (k=0 is a constant term)."""
    k = np.arange(n_terms)
    return tuple(float(w) for w in np.pi * k * (1.0 + rng.uniform(-0.5, 0.5, n_terms)))


def dress(base: Protocol, c: CrabCorrection) -> CrabDressed:
    if not isinstance(base, (Cosine, Exponential, TrivialLinear)):
        raise ValueError(f"can only dress cosine, exponential or trivial protocols, got {type(base).__name__}")
    return CrabDressed(base, c)


def objective(protocol: Protocol, t_star: float, cfg: PropagationConfig = None) -> float:
    return propagate(protocol, t_star, cfg).fidelity


@dataclass(frozen=True)
class CrabBasis:
    basis: str = "fourier"
    n_terms: int = 4


@dataclass(frozen=True)
class SearchConfig:
    max_evals: int = 500  # per start
    n_starts: int = 4
    seed: int = 0
    initial_step: float = 0.3
    xatol: float = 1e-4
    fatol: float = 1e-8


@dataclass(frozen=True)
class OptimizationResult:
    best_coefficients: tuple
    best_fidelity: float
    guess_fidelity: float
    n_evaluations: int
    converged: bool
    correction: CrabCorrection
    seed: int
    best_start: int = -1
    start_fidelities: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "basis": self.correction.basis,
            "coefficients": list(self.best_coefficients),
            "frequencies": list(self.correction.frequencies),
            "best_fidelity": self.best_fidelity,
            "guess_fidelity": self.guess_fidelity,
            "n_evaluations": self.n_evaluations,
            "converged": self.converged,
            "seed": self.seed,
            "best_start": self.best_start,
        }


def optimize(
    base: Protocol,
    t_star: float,
    basis_cfg: CrabBasis = CrabBasis(),
    search_cfg: SearchConfig = SearchConfig(),
    cfg: PropagationConfig = None,
    workers: int = 1,
) -> OptimizationResult:
    """Maximize transfer fidelity at fixed t_star over CRAB coefficients.

    Each start draws its own random frequencies from ``(seed, start)`` and runs
    Nelder-Mead from the undressed guess, so the guess is always a candidate.
    """
    if not t_star > 0:
        raise ValueError(f"t_star must be positive, got {t_star}")
    n = basis_cfg.n_terms
    guess = objective(base, t_star, cfg)
    if n == 0:
        zero = CrabCorrection(basis_cfg.basis, 0, (), ())
        return OptimizationResult((), guess, guess, 1, True, zero, search_cfg.seed)

    def run(start):
        rng = np.random.default_rng([search_cfg.seed, start])
        freqs = harmonic_frequencies(n, rng) if basis_cfg.basis == "fourier" else ()
        best = [guess, np.zeros(n)]
        count = [0]

        def loss(x):
            corr = CrabCorrection(basis_cfg.basis, n, tuple(float(v) for v in x), freqs)
            f = objective(dress(base, corr), t_star, cfg)
            count[0] += 1
            if f > best[0]:
                best[0], best[1] = f, np.array(x)
            return 1.0 - f

        x0 = np.zeros(n)
        simplex = np.vstack([x0, x0 + search_cfg.initial_step * np.eye(n)])
        res = minimize(
            loss,
            x0,
            method="Nelder-Mead",
            options={
                "maxfev": search_cfg.max_evals,
                "initial_simplex": simplex,
                "xatol": search_cfg.xatol,
                "fatol": search_cfg.fatol,
            },
        )
        return best[0], best[1], freqs, count[0], bool(res.success)

    runs = map_ordered(run, range(search_cfg.n_starts), workers)
    # highest fidelity wins, earliest start breaks ties
    k = min(range(len(runs)), key=lambda i: (-runs[i][0], i))
    f, x, freqs, _, ok = runs[k]
    coeffs = tuple(float(v) for v in x)
    return OptimizationResult(
        coeffs,
        float(f),
        guess,
        1 + sum(r[3] for r in runs),
        ok,
        CrabCorrection(basis_cfg.basis, n, coeffs, freqs),
        search_cfg.seed,
        k,
        tuple(r[0] for r in runs),
    )
