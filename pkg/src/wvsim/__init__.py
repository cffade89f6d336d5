"""wvsim: few-body quantum dynamics in a disordered 1D harmonic trap.

Propagates N = 1..3 particles with a split-operator spectral method and
computes both thermalizing expectation values and non-thermalizing
weak values of momentum, plus the energy-representation density matrix
obtained from grid diagonalization.
"""

__version__ = "0.1.0"

from .config import ExperimentConfig, parse_config, preset, serialize_config
from .errors import SimulationError
from .grid import GridSpec, make_grid, spectral_derivative, to_momentum
from .hamiltonian import DisorderField, HamiltonianTerms, build_terms, sample_disorder
from .observables import (
    ObservableRecord,
    classical_microcanonical_density,
    energy_decomposition,
    equilibration_time,
    expect_momentum,
    expect_position,
    phase_space_trace,
    virial_residual,
)
from .propagator import PropagationPlan, RunRecord, run, step
from .spectral import (
    DensityMatrixView,
    EnergyBasis,
    coherence,
    count_activated,
    decompose_density_current,
    diagonalize,
    project,
    reconstruct_state,
)
from .state import (
    OrbitalSpec,
    WaveFunction,
    antisymmetrize,
    gaussian_orbital,
    marginal_momentum_density,
    marginal_position_density,
    product_state,
)
from .weakvalues import (
    ConfigWeakValue,
    WeakValueField,
    current_density_axis,
    time_average,
    weak_config,
    weak_identical,
    weak_pair,
    weak_single,
)

__all__ = [
    "__version__",
    "ExperimentConfig",
    "parse_config",
    "preset",
    "serialize_config",
    "SimulationError",
    "GridSpec",
    "make_grid",
    "spectral_derivative",
    "to_momentum",
    "DisorderField",
    "HamiltonianTerms",
    "build_terms",
    "sample_disorder",
    "ObservableRecord",
    "classical_microcanonical_density",
    "energy_decomposition",
    "equilibration_time",
    "expect_momentum",
    "expect_position",
    "phase_space_trace",
    "virial_residual",
    "PropagationPlan",
    "RunRecord",
    "run",
    "step",
    "DensityMatrixView",
    "EnergyBasis",
    "coherence",
    "count_activated",
    "decompose_density_current",
    "diagonalize",
    "project",
    "reconstruct_state",
    "OrbitalSpec",
    "WaveFunction",
    "antisymmetrize",
    "gaussian_orbital",
    "marginal_momentum_density",
    "marginal_position_density",
    "product_state",
    "ConfigWeakValue",
    "WeakValueField",
    "current_density_axis",
    "time_average",
    "weak_config",
    "weak_identical",
    "weak_pair",
    "weak_single",
]
