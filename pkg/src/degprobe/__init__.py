"""Probabilistic deg(f) < k testing of Boolean functions.

Exact failure probabilities dt_k, average degree-k monomial densities
add_k, closed forms, bounds and Monte-Carlo estimators.
"""

from .boolfun import (
    AffineMap,
    Anf,
    BlackBox,
    TruthTable,
    anf_to_tt,
    complement,
    compose_affine,
    dd_k,
    derivative,
    disjoint_sum,
    fast_points,
    format_anf,
    moebius,
    parse_anf,
)
from .degtest import (
    bounds,
    closed_form_dt,
    decide,
    dt_by_derivative_recursion,
    dt_from_add,
    estimate_dt,
    exact_add,
    exact_dt,
    exact_dt_homogeneous,
    exact_dt_tuples,
    run_test,
)
from .gf2 import GF2Matrix, gaussian_binomial, random_invertible
from .kernels import BACKEND

__version__ = "0.1.0"
