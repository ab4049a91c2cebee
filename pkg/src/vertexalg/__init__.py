"""Exact computations with vertex algebras built from the Virasoro algebra
and from affinized Lie algebras.

The layers, bottom up:

* :mod:`~vertexalg.exactnum` - exact scalars and sparse combinations
* :mod:`~vertexalg.liealg` - Virasoro and affine brackets on modes
* :mod:`~vertexalg.pbw` - PBW modules and mode action by straightening
* :mod:`~vertexalg.fields` - weak vertex operators and their n-th products
* :mod:`~vertexalg.axioms` - window-bounded verifiers for the identities
* :mod:`~vertexalg.npoint` - two-point functions as exact rational functions
"""

from .exactnum import Combination, as_scalar, binomial, combine, format_scalar
from .liealg import (
    ModeTerm,
    LieAlgebraSpec,
    bracket,
    builtin_abelian,
    builtin_lie,
    builtin_sl2,
    load_lie_algebra,
    make_affine,
    make_lie_algebra,
    make_virasoro,
    parse_lie_algebra,
)
from .pbw import (
    AffineVacuum,
    DualFunctional,
    QuotientVacuum,
    Verma,
    WindowOverflow,
    dual_pair,
    make_module,
)
from .fields import (
    Field,
    close_under_products,
    derive,
    generating_field,
    identity_field,
    nth_product,
    parse_field,
    parse_state,
    state_to_field,
    zero_field,
)
from .axioms import (
    Report,
    Window,
    dong_bound_check,
    locality_order,
    verify_commutator_formula,
    verify_creation,
    verify_derivative_locality,
    verify_iterate_formula,
    verify_rescaling,
    verify_skew_symmetry,
    verify_straightening,
    verify_weak_associativity,
)
from .npoint import (
    ITERATE,
    Z1_GT_Z2,
    Z2_GT_Z1,
    RationalForm,
    expand_rational,
    matrix_coefficient_series,
    two_point_rational,
    verify_rationality,
)

__version__ = "0.1.0"
