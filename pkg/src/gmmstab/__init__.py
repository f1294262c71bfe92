"""Distribution-free parameter-stability certificates for mixtures of
spherical Gaussians, with exact Gaussian TV formulas and Monte Carlo
TV estimation."""

from .certify import (
    ComponentBounds,
    ContaminationRow,
    ContaminationScenario,
    StabilityCertificate,
    auto_class_spec,
    builtin_example,
    certify,
    example_scenario,
    run_contamination,
)
from .constants import (
    RefinementTrace,
    StabilityInputs,
    c_single,
    margin_C,
    min_separation,
    proportion_bound,
    proportion_bound_union,
    refine,
    solve_c0,
    solve_eta0,
    ub,
)
from .errors import (
    BracketError,
    DimensionMismatch,
    DomainError,
    GmmStabError,
    InfeasibleEpsilon,
    NoConvergence,
    RefinementInapplicable,
    SeparationTooSmall,
    SizeMismatch,
    TooManyComponents,
    UnknownExample,
)
from .gaussian_tv import (
    GaussianPairGeometry,
    SphericalGaussian,
    overlap_boundaries_1d,
    pair_geometry,
    threshold_c0_of_rho,
    threshold_eta0_of_rho,
    tv_equal_sigma,
    tv_exact,
    tv_same_center,
)
from .mixture import (
    MatchingResult,
    MembershipReport,
    MixtureModel,
    ModelClassSpec,
    check_class_membership,
    dparam,
    min_pairwise_separation,
    separation_matrix,
)
from .montecarlo import TvEstimate, componentwise_tv, mc_tv, sample

__version__ = "0.1.0"
