"""Semiclassical propagation, fluctuation ratios, phase-engineered purification
and Lindblad dynamics, each checked against exact quantum evolution."""

from .dynamics import (
    SystemSpec,
    Trajectory,
    classical_action,
    find_boundary_trajectories,
    integrate_trajectory,
    maslov_and_prefactor,
)
from .fluctuation import (
    EntropyChange,
    RatioCurve,
    StructuredCoherenceModel,
    classical_ratio,
    entropy_change_between_regions,
    fit_structured_model,
    quantum_ratio,
    ratio_curve,
    structured_ratio,
)
from .oracle import (
    GridState,
    evolve_exact,
    evolve_kicked_exact,
    transition_probability_exact,
)
from .purification import (
    MixedState,
    PurifiedState,
    UnitaryMatrix,
    apply_phases,
    joint_density_matrix,
    optimize_phases,
    purify,
    random_mixed_state,
    random_unitary,
    reduced_state,
    transition_probability as purified_transition_probability,
)
from .semiclassics import (
    ChaosCensus,
    PropagatorResult,
    TrajectoryContribution,
    chaos_census,
    chaos_tunneling_probability,
    transition_probability,
    vvg_amplitude,
)
from .opensystem import (
    CoherentSubspace,
    LindbladModel,
    PhononCoupling,
    ResonantCoupling,
    build_phonon_hamiltonian,
    build_resonant_hamiltonian,
    entropy_trace,
    evolve_lindblad,
    evolve_von_neumann,
    project_coherent_subspace,
)
from .states import DensityMatrix, von_neumann_entropy

__version__ = "0.1.0"
