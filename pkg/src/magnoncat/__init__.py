"""Transmon-magnon hybrid device simulator.

Evaluates the flux-mediated coupling rates of a SQUID-coupled YIG sphere,
integrates the driven Lindblad master equation on the truncated
(transmon x magnon) space, runs the analog Schroedinger-cat preparation
protocol, and computes entanglement, fidelity and Wigner diagnostics.
"""

from .analysis import WignerGrid, cat_size, fidelity_pure, log_negativity, wigner
from .constants import CONSTANTS, PhysicalConstants
from .device import (
    CouplingSet,
    DegenerateSquidError,
    DeviceParams,
    ValidityWarning,
    coupling_J,
    coupling_grp,
    couplings,
    critical_distance,
    flux_per_quantum,
    modulated_grp,
    mu_zpf,
    squid_factor,
    thermal_occupation,
    transmon_frequency,
    zpf_amplitudes,
)
from .dynamics import (
    HamiltonianModel,
    NoiseConfig,
    Trajectory,
    build_hamiltonian,
    evolve,
    lindblad_rhs,
    purity,
)
from .hilbert import (
    DensityMatrix,
    InvariantViolationError,
    SpaceDims,
    TruncationWarning,
    cat_state,
    coherent_state,
    displacement_op,
    fock,
    kron,
    mode_operators,
    partial_trace,
    partial_transpose,
    thermal_density,
)
from .protocol import (
    EVEN_OUTCOME,
    ODD_OUTCOME,
    AnalyticCat,
    ProtocolConfig,
    ProtocolResult,
    analytic_beta_theta,
    conditional_projection,
    ideal_bell_cat,
    ideal_cat,
    qubit_rotation_y,
    run_protocol,
)

__version__ = "0.1.0"
