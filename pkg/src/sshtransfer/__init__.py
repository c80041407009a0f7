"""Quantum state transfer through driven single-excitation chains."""

from .core import (
    ChainSpec,
    DegenerateSpectrumError,
    HamiltonianMatrix,
    Spectrum,
    build_hamiltonian,
    eigendecompose,
    half_gap,
    ssh_gap,
    ssh_pair_energies,
    zero_mode,
)
from .diagnostics import adiabaticity_measure, adiabaticity_report, spectral_trace
from .disorder import DisorderSpec, apply_disorder, ensemble_sweep, sample_realization
from .optimizer import CrabBasis, CrabCorrection, SearchConfig, dress, objective, optimize
from .propagator import (
    PropagationConfig,
    PropagationError,
    average_state_fidelity,
    fidelity,
    fidelity_sweep,
    propagate,
    stabilization_time,
)
from .protocols import (
    Cosine,
    CrabDressed,
    Exponential,
    Static,
    TrivialLinear,
    couplings_at,
    couplings_derivative_at,
    min_gap,
    parse_protocol,
)

__version__ = "0.1.0"
