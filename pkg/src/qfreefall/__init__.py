"""Quantum wave packets in free fall on a 1D lattice.

Equivalence-principle checks, internal-state dephasing, and
gravitational phase shifts, all in natural units hbar = c = 1 with the
potential + m g x (packets fall toward negative x).
"""

from .composite import (
    CompositeState,
    EchoResult,
    InternalSpectrum,
    RegimeReport,
    branch_overlaps,
    coherence_ratio,
    composite_evolve,
    dephasing_factor,
    dephasing_factor_gaussian,
    dephasing_factor_thermal,
    dephasing_time,
    dispersion_regime,
    echo_protocol,
    factorized_composite,
    make_spectrum,
    mean_energy_and_heat_capacity,
    partition_function,
    reduced_internal_matrix,
    reduced_position_density,
    reduced_purity,
    reduced_translational_matrix,
    thermal_weights,
)
from .dynamics import (
    EPReport,
    EvolutionParams,
    check_ep_density_shift,
    energy_eigenfunction_momentum,
    free_evolve,
    gravity_evolve,
    split_step_evolve,
    state_overlap,
    weyl_translate,
)
from .errors import (
    AliasingError,
    ApproximationWarning,
    ConfigError,
    GridError,
    LeakageError,
    MemoryGuardError,
    NumericalGuardError,
    QFreefallError,
    RegimeError,
    ShiftAlignmentError,
    SupportError,
    UndersampledRampError,
)
from .lattice import (
    Grid1D,
    check_leakage,
    dft_forward,
    dft_inverse,
    edge_probability,
    make_grid,
    quad,
)
from .phasespace import (
    WignerMap,
    check_ep_velocity_universality,
    liouville_shift,
    to_velocity,
    wigner,
    wigner_moment,
)
from .qubitphase import (
    CatPhaseTerms,
    PathSample,
    ProperTimeResult,
    QubitState,
    SPEED_OF_LIGHT,
    STANDARD_GRAVITY,
    cat_phase_terms,
    cat_visibility_factor,
    classical_phase,
    free_fall_path,
    phase_blur_parameter,
    phase_shift,
    phase_shift_t,
    proper_time,
    qubit_reduced_state,
    relative_shift,
    visibility_factor,
)
from .states import (
    PacketSpec,
    WaveFunction,
    cat_state,
    central_moment,
    dispersion,
    gaussian_packet,
    moments,
    rebase_mass,
    velocity_wavefunction,
)

__version__ = "0.1.0"

__all__ = [
    "AliasingError",
    "ApproximationWarning",
    "CatPhaseTerms",
    "CompositeState",
    "ConfigError",
    "EPReport",
    "EchoResult",
    "EvolutionParams",
    "Grid1D",
    "GridError",
    "InternalSpectrum",
    "LeakageError",
    "MemoryGuardError",
    "NumericalGuardError",
    "PacketSpec",
    "PathSample",
    "ProperTimeResult",
    "QFreefallError",
    "QubitState",
    "RegimeError",
    "RegimeReport",
    "SPEED_OF_LIGHT",
    "STANDARD_GRAVITY",
    "ShiftAlignmentError",
    "SupportError",
    "UndersampledRampError",
    "WaveFunction",
    "WignerMap",
    "branch_overlaps",
    "cat_phase_terms",
    "cat_state",
    "cat_visibility_factor",
    "central_moment",
    "check_ep_density_shift",
    "check_ep_velocity_universality",
    "check_leakage",
    "classical_phase",
    "coherence_ratio",
    "composite_evolve",
    "dephasing_factor",
    "dephasing_factor_gaussian",
    "dephasing_factor_thermal",
    "dephasing_time",
    "dft_forward",
    "dft_inverse",
    "dispersion",
    "dispersion_regime",
    "echo_protocol",
    "edge_probability",
    "energy_eigenfunction_momentum",
    "factorized_composite",
    "free_evolve",
    "free_fall_path",
    "gaussian_packet",
    "gravity_evolve",
    "liouville_shift",
    "make_grid",
    "make_spectrum",
    "mean_energy_and_heat_capacity",
    "moments",
    "partition_function",
    "phase_blur_parameter",
    "phase_shift",
    "phase_shift_t",
    "proper_time",
    "quad",
    "qubit_reduced_state",
    "rebase_mass",
    "reduced_internal_matrix",
    "reduced_position_density",
    "reduced_purity",
    "reduced_translational_matrix",
    "relative_shift",
    "split_step_evolve",
    "state_overlap",
    "thermal_weights",
    "to_velocity",
    "velocity_wavefunction",
    "visibility_factor",
    "weyl_translate",
    "wigner",
    "wigner_moment",
]
