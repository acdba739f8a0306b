"""Halasz-Szekely barycenters, symmetric means and DHS barycenters."""

from .core import (
    BarycenterReport,
    Regime,
    ZeroReason,
    b_function,
    barycenter,
    barycenter_oldstyle,
    classify,
    induce_identity_check,
    is_zero_barycenter,
    kernel,
    psi,
    segment_second_derivative,
    solve_eta,
    solve_rho,
)
from .dhs import DhsReport, deviation, dhs_barycenter, hs_dhs_gap, tangency_check
from .errors import HSError, InputError, NumericalError
from .measures import (
    DiscreteMeasure,
    bernoulli,
    delta,
    empirical,
    from_atoms,
    load_measure,
    log_moment,
    mix,
    positive_part,
    quadrature_uniform,
    scale,
)
from .symmetric import (
    elementary_symmetric,
    elementary_symmetric_logs,
    hs_mean,
    maclaurin_chain,
    repeat_tuple,
    repetition_limit,
    sandwich_bounds,
    sandwich_table,
    sym_mean,
)

__version__ = "0.1.0"

__all__ = [
    "BarycenterReport",
    "DhsReport",
    "DiscreteMeasure",
    "HSError",
    "InputError",
    "NumericalError",
    "Regime",
    "ZeroReason",
    "b_function",
    "barycenter",
    "barycenter_oldstyle",
    "bernoulli",
    "classify",
    "delta",
    "deviation",
    "dhs_barycenter",
    "elementary_symmetric",
    "elementary_symmetric_logs",
    "empirical",
    "from_atoms",
    "hs_dhs_gap",
    "hs_mean",
    "induce_identity_check",
    "is_zero_barycenter",
    "kernel",
    "load_measure",
    "log_moment",
    "maclaurin_chain",
    "mix",
    "positive_part",
    "psi",
    "quadrature_uniform",
    "repeat_tuple",
    "repetition_limit",
    "sandwich_bounds",
    "sandwich_table",
    "scale",
    "segment_second_derivative",
    "solve_eta",
    "solve_rho",
    "sym_mean",
    "tangency_check",
]
