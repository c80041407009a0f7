"""Driving protocols: coupling profiles as functions of fractional time s = t/t*.

Every protocol samples a whole grid of fractional times at once through
``profile(s) -> (len(s), N-1)`` and ``profile_rate(s)`` (derivative in s);
the ``*_at`` functions below convert to physical time.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import ChainSpec, build_hamiltonian, eigendecompose, zero_mode_gap


def _require_odd(chain: ChainSpec, kind: str):
    if chain.n_sites % 2 == 0 or chain.n_sites < 3:
        raise ValueError(f"{kind} protocol needs an odd chain of >= 3 sites, got {chain.n_sites}")


class Protocol:
    chain: ChainSpec

    @property
    def n_sites(self) -> int:
        return self.chain.n_sites

    def profile(self, s) -> np.ndarray:
        raise NotImplementedError

    def profile_rate(self, s) -> np.ndarray:
        raise NotImplementedError

    def driven(self) -> np.ndarray:
        """Boolean mask of the couplings that actually move in time."""
        return np.ones(self.n_sites - 1, dtype=bool)

    def fields(self) -> np.ndarray:
        return np.zeros(self.n_sites)


def _dimerized(n_sites, odd, even):
    out = np.empty((odd.shape[0], n_sites - 1))
    out[:, 0::2] = odd[:, None]
    out[:, 1::2] = even[:, None]
    return out


@dataclass(frozen=True)
class Exponential(Protocol):
    chain: ChainSpec
    alpha: float = 6.0

    def __post_init__(self):
        _require_odd(self.chain, "exponential")
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")

    def profile(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        a = self.alpha
        norm = -np.expm1(-a)
        j = self.chain.j_max
        return _dimerized(
            self.n_sites, j * (-np.expm1(-a * s) / norm), j * (-np.expm1(-a * (1.0 - s)) / norm)
        )

    def profile_rate(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        a = self.alpha
        norm = self.chain.j_max * a / -np.expm1(-a)
        return _dimerized(self.n_sites, np.exp(-a * s) * norm, -np.exp(-a * (1.0 - s)) * norm)


@dataclass(frozen=True)
class Cosine(Protocol):
    chain: ChainSpec
    b: float = 0.5

    def __post_init__(self):
        _require_odd(self.chain, "cosine")

    def profile(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        c = np.cos(np.pi * s)
        amp = self.b * self.chain.j_max
        return _dimerized(self.n_sites, amp * (1.0 - c), amp * (1.0 + c))

    def profile_rate(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        r = self.b * self.chain.j_max * np.pi * np.sin(np.pi * s)
        return _dimerized(self.n_sites, r, -r)


@dataclass(frozen=True)
class TrivialLinear(Protocol):
    """Uniform chain whose two edge couplings are swapped linearly."""

    chain: ChainSpec

    def __post_init__(self):
        _require_odd(self.chain, "trivial")

    def profile(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        j = self.chain.j_max
        out = np.full((s.shape[0], self.n_sites - 1), j)
        out[:, 0] = j * s
        out[:, -1] = j * (1.0 - s)
        return out

    def profile_rate(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.zeros((s.shape[0], self.n_sites - 1))
        out[:, 0] = self.chain.j_max
        out[:, -1] = -self.chain.j_max
        return out

    def driven(self):
        mask = np.zeros(self.n_sites - 1, dtype=bool)
        mask[[0, -1]] = True
        return mask


@dataclass(frozen=True)
class Static(Protocol):
    """Frozen couplings, useful for free-evolution checks."""

    chain: ChainSpec
    couplings: tuple = field(default=())

    def __post_init__(self):
        if len(self.couplings) != self.n_sites - 1:
            raise ValueError(
                f"static protocol needs {self.n_sites - 1} couplings, got {len(self.couplings)}"
            )

    def profile(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.tile(np.asarray(self.couplings, dtype=float), (s.shape[0], 1))

    def profile_rate(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.zeros((s.shape[0], self.n_sites - 1))

    def driven(self):
        return np.zeros(self.n_sites - 1, dtype=bool)


@dataclass(frozen=True)
class CrabDressed(Protocol):
    """Base profile multiplied by ``correction.factor(s)`` on the driven couplings,
    then clamped to [0, j_max]."""

    base: Protocol
    correction: object

    @property
    def chain(self):
        return self.base.chain

    def _raw(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        mask = self.base.driven()
        raw = self.base.profile(s)
        dressed = np.where(mask, raw * self.correction.factor(s)[:, None], raw)
        return s, mask, raw, dressed

    def profile(self, s):
        *_, dressed = self._raw(s)
        return np.clip(dressed, 0.0, self.chain.j_max)

    def profile_rate(self, s):
        s, mask, raw, dressed = self._raw(s)
        base_rate = self.base.profile_rate(s)
        rate = np.where(
            mask,
            base_rate * self.correction.factor(s)[:, None]
            + raw * self.correction.factor_rate(s)[:, None],
            base_rate,
        )
        clamped = (dressed < 0.0) | (dressed > self.chain.j_max)
        return np.where(clamped, 0.0, rate)

    def driven(self):
        return self.base.driven()


def _fraction(t, t_star):
    if not t_star > 0:
        raise ValueError(f"t_star must be positive, got {t_star}")
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > t_star)) or not np.all(np.isfinite(t)):
        raise ValueError(f"time must lie in [0, {t_star}], got {t}")
    return t / t_star


def couplings_at(p: Protocol, t: float, t_star: float) -> np.ndarray:
    return p.profile(_fraction(t, t_star))[0]


def couplings_derivative_at(p: Protocol, t: float, t_star: float) -> np.ndarray:
    """dJ_i/dt at time t."""
    return p.profile_rate(_fraction(t, t_star))[0] / t_star


def hamiltonian_at(p: Protocol, t: float, t_star: float):
    return build_hamiltonian(couplings_at(p, t, t_star), p.fields())


def half_gap_profile(p: Protocol, t_star: float, n_time_samples: int = 1001):
    """Sample times and the zero-mode gap at each, by numerical diagonalization."""
    if n_time_samples < 2:
        raise ValueError("need at least 2 time samples")
    times = np.linspace(0.0, t_star, n_time_samples)
    prof = p.profile(times / t_star)
    fields = p.fields()
    gaps = np.array(
        [zero_mode_gap(eigendecompose(build_hamiltonian(j, fields)).eigenvalues) for j in prof]
    )
    return times, gaps


def min_gap(p: Protocol, t_star: float = 1.0, n_time_samples: int = 1001):
    """(smallest zero-mode gap, time at which it occurs) over a uniform grid."""
    if n_time_samples < 3:
        raise ValueError("need at least 3 time samples")
    times, gaps = half_gap_profile(p, t_star, n_time_samples)
    k = int(np.argmin(gaps))
    return float(gaps[k]), float(times[k])


_KINDS = {
    "exponential": (Exponential, {"alpha": float}),
    "cosine": (Cosine, {"b": float}),
    "trivial": (TrivialLinear, {}),
    "uniform": (None, {"j": float}),
}


def parse_protocol(text: str, chain: ChainSpec) -> Protocol:
    """Build a protocol from ``"<kind> key=value ..."``.

    Kinds: ``exponential [alpha=6.0]``, ``cosine [b=0.5]``, ``trivial``,
    ``uniform [j=1.0]`` (a frozen uniform chain).
    """
    parts = text.split()
    if not parts:
        raise ValueError("empty protocol specification")
    kind = parts[0].lower()
    if kind not in _KINDS:
        raise ValueError(f"unknown protocol kind {kind!r}; expected one of {sorted(_KINDS)}")
    cls, allowed = _KINDS[kind]
    params = {}
    for item in parts[1:]:
        key, sep, value = item.partition("=")
        if not sep or key not in allowed:
            raise ValueError(f"bad parameter {item!r} for {kind}; allowed: {sorted(allowed)}")
        params[key] = allowed[key](value)
    if kind == "uniform":
        j = params.get("j", chain.j_max)
        return Static(chain, tuple([j] * (chain.n_sites - 1)))
    return cls(chain, **params)
