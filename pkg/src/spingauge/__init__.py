"""SU(2) coherent states over general fiducial vectors.

Builds coherent states from arbitrary unit fiducial vectors, audits the
weak gauge psi-symmetry of the associated Lagrangians, enforces the
Gauss-law eigenvalue constraint that singles out rotated number states,
and integrates the degenerate semiclassical variational equations next to
the exact quantum propagation.
"""

from .backend import BACKEND, NUMBA_ENABLED
from .coherent import (
    CoherentState,
    FiducialVector,
    LagrangianCoefficients,
    coefficients,
    coherent_state,
    expectation_spin_analytic,
    expectation_spin_brute,
    hamiltonian_expectation,
    hamiltonian_gradient,
    lagrangian,
    make_fiducial,
    number_state,
    rotated_number_state,
    topological_term,
)
from .dynamics import (
    ConstantGauge,
    LinearGauge,
    SemiclassicalTrajectory,
    TabulatedGauge,
    TrajectoryResult,
    VelocityField,
    compare_case,
    compare_evolutions,
    fidelity,
    full_quantum_evolve,
    full_quantum_states,
    propagator_phase_ratio,
    ray_distance,
    semiclassical_evolve,
    velocity_field,
)
from .errors import ConsistencyError, IntegrationError, NoSolutionError
from .hamiltonians import CustomHamiltonian, NmrHamiltonian, NqrHamiltonian
from .spin import (
    EulerAngles,
    Spin,
    SpinOperators,
    ladder_coefficient,
    matrix_exponential,
    rotation_matrix,
    spin_operators,
)
from .symmetry import (
    ClassificationResult,
    IsotropyReport,
    SymmetryReport,
    classify_fiducial,
    finite_gauss_check,
    gauss_residual,
    generator,
    h0_shift_check,
    isotropy_subgroups,
    neighbor_coherence,
    symmetry_report,
    weak_shift_check,
)

__version__ = "0.1.0"
