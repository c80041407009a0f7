"""Instantaneous spectra along a drive and the adiabaticity sum for the zero mode."""

from dataclasses import dataclass

import numpy as np

from .core import (
    DegenerateSpectrumError,
    build_hamiltonian,
    eigendecompose,
    zero_mode,
    zero_mode_gap,
)
from .protocols import Protocol, couplings_derivative_at, hamiltonian_at


@dataclass(frozen=True)
class SpectralTrace:
    times: np.ndarray
    energies: np.ndarray  # (len(times), N), each row ascending

    @property
    def half_gaps(self) -> np.ndarray:
        return np.array([zero_mode_gap(row) for row in self.energies])

    def min_half_gap(self):
        g = self.half_gaps
        k = int(np.argmin(g))
        return float(g[k]), float(self.times[k])

    def max_half_gap(self):
        g = self.half_gaps
        k = int(np.argmax(g))
        return float(g[k]), float(self.times[k])


@dataclass(frozen=True)
class AdiabaticityReport:
    times: np.ndarray
    values: np.ndarray
    min_gap_seen: float


def spectral_trace(p: Protocol, t_star: float = 1.0, n_samples: int = 1001) -> SpectralTrace:
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    times = np.linspace(0.0, t_star, n_samples)
    fields = p.fields()
    energies = np.array(
        [eigendecompose(build_hamiltonian(j, fields)).eigenvalues for j in p.profile(times / t_star)]
    )
    return SpectralTrace(times, energies)


def adiabaticity_measure(p: Protocol, t_star: float, t: float, epsilon0: float = 1e-6) -> float:
    """sum_{m != zero} |<m|dH/dt|zero> / (E_m - E_zero)| at time t."""
    spec = eigendecompose(hamiltonian_at(p, t, t_star))
    n, v0 = zero_mode(spec)
    gap = zero_mode_gap(spec.eigenvalues)
    if gap <= epsilon0:
        raise DegenerateSpectrumError(f"zero mode not isolated at t={t}: gap {gap} <= {epsilon0}")
    hdot = build_hamiltonian(couplings_derivative_at(p, t, t_star), np.zeros(p.n_sites))
    elems = spec.eigenvectors.T @ hdot.matvec(v0)
    denom = spec.eigenvalues - spec.eigenvalues[n]
    keep = np.arange(denom.shape[0]) != n
    return float(np.sum(np.abs(elems[keep] / denom[keep])))


def adiabaticity_report(
    p: Protocol, t_star: float, n_samples: int = 201, epsilon0: float = 1e-6
) -> AdiabaticityReport:
    times = np.linspace(0.0, t_star, n_samples)
    values = np.array([adiabaticity_measure(p, t_star, t, epsilon0) for t in times])
    gaps = [zero_mode_gap(eigendecompose(hamiltonian_at(p, t, t_star)).eigenvalues) for t in times]
    return AdiabaticityReport(times, values, float(min(gaps)))
