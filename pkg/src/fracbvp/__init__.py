"""Numerical toolkit for a three-point fractional boundary value problem.

The library constructs the problem's Green's function, checks the
existence/uniqueness certificates in the squared-sup-distance space
(relaxation constant 2), and computes solutions by certified Picard
iteration on the equivalent integral operator.
"""

from .bmetric import (
    AdmissibilityVerdict,
    BMetricSpace,
    ContractionVerdict,
    FamilyVerdict,
    GeraghtyVerdict,
    PsiFunction,
    TauRelation,
    ThetaFunction,
    admissibility_check,
    contraction_certificate,
    default_psi,
    default_tau,
    default_theta,
    distance,
    geraghty_inequality_check,
    psi_family_check,
    theta_family_check,
)
from .calculus import (
    DEFAULT_PANELS,
    GridFunction,
    QuadratureGrid,
    build_grid,
    frac_derivative,
    frac_integral,
    semigroup_defect,
)
from .errors import (
    ConfigurationError,
    DomainError,
    FracBvpError,
    GridMismatchError,
    NumericError,
)
from .green import (
    BvpParams,
    GreenKernel,
    KernelPropertyReport,
    beta_bound,
    build_kernel,
    check_kernel_properties,
    green,
    green_branch,
    green_max_bound,
    green_values,
    mu,
    seam_gap,
)
from .solver import (
    Certificate,
    Hypothesis,
    ProblemSpec,
    SolveReport,
    apply_operator,
    build_certificate,
    default_sample_suite,
    operator_matrix,
    picard_solve,
    residual_report,
)
from .special import PhiMap, gamma, phi_catalog

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # special functions
    "gamma", "PhiMap", "phi_catalog",
    # calculus
    "DEFAULT_PANELS", "QuadratureGrid", "GridFunction", "build_grid",
    "frac_integral", "frac_derivative", "semigroup_defect",
    # kernel
    "BvpParams", "GreenKernel", "build_kernel", "mu", "beta_bound",
    "green", "green_values", "green_branch", "green_max_bound", "seam_gap",
    "KernelPropertyReport", "check_kernel_properties",
    # metric machinery
    "distance", "BMetricSpace", "PsiFunction", "ThetaFunction", "TauRelation",
    "default_psi", "default_theta", "default_tau", "FamilyVerdict",
    "psi_family_check", "theta_family_check", "ContractionVerdict",
    "contraction_certificate", "GeraghtyVerdict", "geraghty_inequality_check",
    "AdmissibilityVerdict", "admissibility_check",
    # solver
    "ProblemSpec", "Certificate", "Hypothesis", "SolveReport",
    "operator_matrix", "apply_operator", "build_certificate",
    "picard_solve", "residual_report", "default_sample_suite",
    # errors
    "FracBvpError", "DomainError", "ConfigurationError",
    "GridMismatchError", "NumericError",
]
