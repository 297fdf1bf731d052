"""Energy teleportation on a periodic harmonic chain.

Gaussian ground-state construction, coherent-state measurement updates,
optimal displacement-energy extraction, and entanglement accounting, with
independent general-dyne, Monte Carlo, and truncated-number-basis oracles.
"""

from .chain_model import (
    ChainParams,
    Correlations,
    build_correlations,
    correlation_submatrices,
    correlation_vectors,
    dispersion,
    ground_covariance,
)
from .gaussian_state import (
    CovarianceMatrix,
    NumericsError,
    SymplecticSpectrum,
    log_negativity,
    mutual_information,
    partial_transpose,
    reduce,
    symplectic_eigenvalues,
    symplectic_form,
    von_neumann_entropy,
)
from .povm_measurement import (
    MeasurementSpec,
    OutcomeDistribution,
    PostMeasurementState,
    build_m_matrix,
    outcome_distribution,
    post_measurement_covariance,
    sample_outcomes,
    unmeasured_sites,
)
from .qet_protocol import (
    DisplacementPlan,
    QetQuadratics,
    QetReport,
    build_quadratics,
    optimal_plan,
    optimized_energy,
    plan_energy,
    run_setting1,
    run_setting2,
)
from .oracle import (
    FockState,
    GeneralDyneUpdate,
    fock_ground_state,
    fock_log_negativity,
    fock_position_correlator,
    general_dyne_update,
    monte_carlo_energy,
    two_mode_ground_covariance,
)
from .experiment import (
    ALPHA_PRESETS,
    PowerLawFit,
    RunConfig,
    SweepTable,
    fit_power_law,
    resolve_alpha,
    sweep_setting1,
    sweep_setting2,
    sweep_size,
    write_csv,
)
from .cli import cli_main

__version__ = "0.1.0"
