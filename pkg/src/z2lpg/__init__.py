"""Exact and Trotterized dynamics of a 1+1D Z2 lattice gauge theory protected by local pseudogenerators."""

from .errors import CapacityError, ConvergenceError, SectorError
from .evolve import QuenchConfig, evolve_dense, evolve_krylov, run_quench
from .lattice import (
    DEFAULT_ALPHAS,
    HilbertSpace,
    LatticeSpec,
    ModelParams,
    build_adjusted_hamiltonian,
    build_analog_error,
    build_circuit_error,
    build_gauge_generator,
    build_hamiltonian,
    build_hilbert_space,
    build_ideal_hamiltonian,
    build_initial_state,
    build_lpg,
    build_protection,
    build_target_projector,
)
from .observables import electric_flux, gauge_violation_instant, staggered_occupation, temporal_average
from .sequences import CoeffSequence, ComplianceReport, is_compliant, make_sequence, resonance_fraction
from .timeseries import TimeSeries
from .trotter import CircuitConfig, Gate, TrotterStep, compile_step, ideal_protection_strength, run_circuit

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConvergenceError",
    "SectorError",
    "QuenchConfig",
    "evolve_dense",
    "evolve_krylov",
    "run_quench",
    "DEFAULT_ALPHAS",
    "HilbertSpace",
    "LatticeSpec",
    "ModelParams",
    "build_adjusted_hamiltonian",
    "build_analog_error",
    "build_circuit_error",
    "build_gauge_generator",
    "build_hamiltonian",
    "build_hilbert_space",
    "build_ideal_hamiltonian",
    "build_initial_state",
    "build_lpg",
    "build_protection",
    "build_target_projector",
    "electric_flux",
    "gauge_violation_instant",
    "staggered_occupation",
    "temporal_average",
    "CoeffSequence",
    "ComplianceReport",
    "is_compliant",
    "make_sequence",
    "resonance_fraction",
    "TimeSeries",
    "CircuitConfig",
    "Gate",
    "TrotterStep",
    "compile_step",
    "ideal_protection_strength",
    "run_circuit",
]
