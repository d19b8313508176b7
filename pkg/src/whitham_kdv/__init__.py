"""Whitham modulation theory for the small-dispersion KdV equation.

``u_t + 6 u u_x + eps^2 u_xxx = 0``: exact travelling waves, the diagonal
Whitham system, the step and hump modulation solutions, the Painleve II
trailing-edge layer and a direct spectral solver used to check them.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .errors import (
    ConditioningError,
    ConditioningWarning,
    ConfigurationError,
    ContinuationNeeded,
    DomainError,
    NoBreakingError,
    OutsideZone,
    ParameterError,
    RefineMeshError,
    ResolutionError,
    RootBracketError,
)
from .gpstep import StepProblem, envelopes, gp_beta2, gp_edges, gp_solution, leading_edge_soliton
from .hodograph import (
    EdgeLayerData,
    EpdPotential,
    HodographField,
    dsw_solution,
    edge_curves,
    epd_q,
    leading_edge,
    solve_field,
    solve_whitham,
    trace_zone,
    trailing_edge,
    whitham_zone,
)
from .hopf import (
    InitialProfile,
    LinearProfile,
    NegativeHump,
    SmoothStep,
    TabulatedProfile,
    breaking_point,
    hopf_solve,
    make_profile,
)
from .kdvdirect import GridSolution, PeriodizedStep, SpectralGrid, compare, evolve
from .painleve import HastingsMcLeod, airy, edge_expansion, hastings_mcleod
from .specfun import ellip_E, ellip_K, jacobi_cn, theta3
from .wave import RiemannTriple, WavePhase, cnoidal_u, edge_values, theta_u
from .whitham import AbelianDifferentials, quasi_energy, quasi_momentum, speeds

__all__ = [
    "AbelianDifferentials",
    "BACKEND",
    "ConditioningError",
    "ConditioningWarning",
    "ConfigurationError",
    "ContinuationNeeded",
    "DomainError",
    "EdgeLayerData",
    "EpdPotential",
    "GridSolution",
    "HastingsMcLeod",
    "HodographField",
    "InitialProfile",
    "LinearProfile",
    "NegativeHump",
    "NoBreakingError",
    "OutsideZone",
    "ParameterError",
    "PeriodizedStep",
    "RefineMeshError",
    "ResolutionError",
    "RiemannTriple",
    "RootBracketError",
    "SmoothStep",
    "SpectralGrid",
    "StepProblem",
    "TabulatedProfile",
    "WavePhase",
    "airy",
    "breaking_point",
    "cnoidal_u",
    "compare",
    "dsw_solution",
    "edge_curves",
    "edge_expansion",
    "edge_values",
    "ellip_E",
    "ellip_K",
    "envelopes",
    "epd_q",
    "evolve",
    "gp_beta2",
    "gp_edges",
    "gp_solution",
    "hastings_mcleod",
    "hopf_solve",
    "jacobi_cn",
    "leading_edge",
    "leading_edge_soliton",
    "make_profile",
    "quasi_energy",
    "quasi_momentum",
    "solve_field",
    "solve_whitham",
    "speeds",
    "theta3",
    "theta_u",
    "trace_zone",
    "trailing_edge",
    "whitham_zone",
]
