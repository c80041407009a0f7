"""Single-excitation chain Hamiltonians, their spectra and the analytic SSH gap.

Couplings and fields are plain 1-D float arrays: ``couplings[i]`` is the
exchange between sites ``i+1`` and ``i+2`` (1-based site labels), so the
odd-indexed couplings J_1, J_3, ... live at ``couplings[0::2]``.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels


class DegenerateSpectrumError(ValueError):
    """Raised when the zero mode is not separated from the rest of the spectrum."""


@dataclass(frozen=True)
class ChainSpec:
    n_sites: int
    j_max: float = 1.0

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ValueError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        if not self.j_max > 0:
            raise ValueError(f"j_max must be positive, got {self.j_max}")


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Real symmetric tridiagonal Hamiltonian: fields on the diagonal,
    couplings on the first off-diagonals."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray

    @property
    def dimension(self) -> int:
        return self.diagonal.shape[0]

    def to_dense(self) -> np.ndarray:
        return (
            np.diag(self.diagonal)
            + np.diag(self.off_diagonal, 1)
            + np.diag(self.off_diagonal, -1)
        )

    def matvec(self, v):
        v = np.asarray(v)
        out = self.diagonal * v
        out[:-1] += self.off_diagonal * v[1:]
        out[1:] += self.off_diagonal * v[:-1]
        return out


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column m pairs with eigenvalues[m]


def build_hamiltonian(couplings, fields) -> HamiltonianMatrix:
    couplings = np.asarray(couplings, dtype=float).ravel()
    fields = np.asarray(fields, dtype=float).ravel()
    if couplings.shape[0] != fields.shape[0] - 1:
        raise ValueError(
            f"need len(couplings) == len(fields) - 1, got {couplings.shape[0]} couplings "
            f"and {fields.shape[0]} fields"
        )
    return HamiltonianMatrix(_frozen(fields), _frozen(couplings))


def _fix_signs(vecs):
    # largest-magnitude component positive; argmax picks the lowest index on ties
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def eigendecompose(h: HamiltonianMatrix) -> Spectrum:
    """Eigenpairs of a tridiagonal Hamiltonian, ascending, with a fixed sign convention."""
    d = np.array(h.diagonal, dtype=float)
    n = d.shape[0]
    e = np.zeros(n)
    e[: n - 1] = h.off_diagonal
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
        raise ValueError("Hamiltonian has non-finite entries")
    z = np.eye(n)
    status = _kernels.tql_implicit(d, e, z)
    if status:
        raise np.linalg.LinAlgError(f"QL iteration did not converge at row {status - 1}")
    order = np.argsort(d, kind="stable")
    return Spectrum(_frozen(d[order]), _frozen(_fix_signs(z[:, order])))


def _check_odd(n_sites):
    if int(n_sites) != n_sites or n_sites < 3 or n_sites % 2 == 0:
        raise ValueError(f"analytic SSH spectrum needs an odd chain of >= 3 sites, got {n_sites}")


def ssh_pair_energies(j_odd: float, j_even: float, n_sites: int) -> np.ndarray:
    """Positive members eps_j of the +-eps_j pairs of an odd dimerized chain, j = 1..N//2."""
    _check_odd(n_sites)
    j = np.arange(1, n_sites // 2 + 1)
    q = 2.0 * j * np.pi / (n_sites + 1)
    return np.abs(j_odd + j_even * np.exp(1j * q))


def half_gap(j_odd: float, j_even: float, n_sites: int) -> float:
    """Distance from the zero mode to the nearest bulk level, eps_[N/2]."""
    return float(ssh_pair_energies(j_odd, j_even, n_sites)[-1])


def ssh_gap(j_odd: float, j_even: float, n_sites: int) -> float:
    """Full gap 2*eps_[N/2] between the levels bracketing the zero mode."""
    return 2.0 * half_gap(j_odd, j_even, n_sites)


def zero_mode(s: Spectrum):
    """(index, eigenvector) of the eigenpair closest to zero energy."""
    idx = int(np.argmin(np.abs(s.eigenvalues)))
    return idx, s.eigenvectors[:, idx]


def zero_mode_gap(eigenvalues) -> float:
    """Smallest |E_m - E_0| over m != zero mode."""
    ev = np.asarray(eigenvalues)
    idx = int(np.argmin(np.abs(ev)))
    return float(np.min(np.abs(np.delete(ev, idx) - ev[idx])))
