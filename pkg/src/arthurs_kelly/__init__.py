"""Arthurs-Kelly joint position/momentum measurement with Gaussian states."""

from .dynamics import (
    HamiltonianParams,
    SymplecticMap,
    asymptotic_map,
    convergence_check,
    drift_matrix,
    propagate_moments,
    symplectic_map,
)
from .errors import DegenerateState, InvalidParameters, NonConvergence, SingularConfiguration
from .gaussian import (
    GaussianProbeParams,
    GaussianSystemParams,
    PhaseSpaceMoments,
    assemble_initial_state,
    full_probe_moments,
    moment_oracle,
    probe_moments,
    system_moments,
)
from .inequality import (
    ScanGrid,
    UncertaintyReport,
    gamma_bound,
    gamma_c,
    gamma_c_closed_form,
    meter_product,
    minimized_product,
    uncertainty_report,
    violation_scan,
)
from .propagator import (
    KernelEndpoints,
    KernelEvaluation,
    classical_action,
    jacobian_unit_check,
    kernel,
    kernel_evolve_gaussian,
    prefactor,
)

__version__ = "0.1.0"
