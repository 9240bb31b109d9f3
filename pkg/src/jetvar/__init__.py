"""Symbolic variational calculus on jet spaces.

Modules: ``symexpr`` (expressions), ``jetforms`` (contact forms, d_H, d_V),
``varseq`` (Euler-Lagrange, Helmholtz, homotopy Lagrangians, d_H-exactness),
``noether`` (Lie derivatives, Noether currents, conservation checks),
``cech`` (covers, cochains, periods) and ``problem``/``cli`` (problem files
and the ``varseq`` command).
"""
from .errors import (
    JetVarError, KernelDepthExceeded, MaxOrderExceeded, NonIntegrableKernel,
    NonPolynomialDivision, DimensionMismatch, DegreeZero, OrderTooHigh, NotLocallyVariational,
    NotClosed, NoSolution, InconsistentPair, MissingCertificate, NotSolvableForLeading,
    HypothesisFails, TransitionMissing, ChartMismatch, FieldNotGlobal, ProblemSyntaxError,
)
from .symexpr import Expr, JetSpace, cos, exp, sin
from .jetforms import Form, VectorField, contract, d_H, d_V, prolong
from .varseq import (
    AnsatzSpec,
    Current,
    Lagrangian,
    SourceForm,
    euler_lagrange,
    helmholtz_check,
    momenta,
    solve_dH_exact,
    tonti_lagrangian,
)
from .noether import (
    check_generalized_symmetry,
    lie_derive_current,
    lie_derive_lagrangian,
    lie_derive_source,
    noether_current,
    on_shell_reduce,
    strong_noether_current,
    verify_lemma2,
    verify_lemma3_and_theorem,
)
from .cech import Cochain, Cover, builtin_cover, coboundary, connecting_delta, connecting_delta_prime, period
from .problem import ProblemFile, load_problem, parse_problem, format_problem

__version__ = "0.1.0"

__all__ = [
    "Expr", "JetSpace", "cos", "exp", "sin",
    "Form", "VectorField", "contract", "d_H", "d_V", "prolong",
    "AnsatzSpec", "Current", "Lagrangian", "SourceForm", "euler_lagrange", "helmholtz_check",
    "momenta", "solve_dH_exact", "tonti_lagrangian",
    "check_generalized_symmetry", "lie_derive_current", "lie_derive_lagrangian", "lie_derive_source",
    "noether_current", "on_shell_reduce", "strong_noether_current", "verify_lemma2",
    "verify_lemma3_and_theorem",
    "Cochain", "Cover", "builtin_cover", "coboundary", "connecting_delta", "connecting_delta_prime", "period",
    "ProblemFile", "load_problem", "parse_problem", "format_problem",
]
__all__ += [
    "JetVarError", "KernelDepthExceeded", "MaxOrderExceeded", "NonIntegrableKernel",
    "NonPolynomialDivision", "DimensionMismatch", "DegreeZero", "OrderTooHigh",
    "NotLocallyVariational", "NotClosed", "NoSolution", "InconsistentPair",
    "MissingCertificate", "NotSolvableForLeading", "HypothesisFails", "TransitionMissing",
    "ChartMismatch", "FieldNotGlobal", "ProblemSyntaxError",
]
