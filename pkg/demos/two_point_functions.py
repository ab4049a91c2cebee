"""
Two-point functions as rational functions
=========================================

<f, Y(a,z1) Y(b,z2) c> is the expansion of a rational function with poles
only at z1 = 0, z2 = 0 and z1 = z2.  The same function expanded the other way
gives <f, Y(b,z2) Y(a,z1) c>, and substituting z1 = z2 + z0 gives the iterate.
"""

from fractions import Fraction

from vertexalg import (
    AffineVacuum, DualFunctional, QuotientVacuum, Window, Z1_GT_Z2, builtin_abelian,
    expand_rational, generating_field, make_affine, make_module, make_virasoro,
    matrix_coefficient_series, two_point_rational,
)
from vertexalg.npoint import verify_rationality

w = Window(max_degree=4, mode_range=5)
one = DualFunctional.dual_of(())

# free boson: <1, a(z1) a(z2) 1> = (z1 - z2)^-2
H = make_module(make_affine(builtin_abelian(1), 1), AffineVacuum(), truncation=20)
a = generating_field(H, "a")
g = two_point_rational(one, a, a, H.vacuum, w)
print(g)
series = matrix_coefficient_series(one, a, a, H.vacuum, "AB", w)
print(sorted(series.coeffs.items()))
print(series == expand_rational(g, Z1_GT_Z2, w))

# Virasoro: <1, L(z1) L(z2) 1> = (c/2) (z1 - z2)^-4
V = make_module(make_virasoro(Fraction(1, 2)), QuotientVacuum(), truncation=30)
L = generating_field(V, "L")
print(two_point_rational(one, L, L, V.vacuum, w))

# a matrix coefficient between excited states has poles at 0 as well
omega = V.monomial(((2, 0),))
rep = verify_rationality(DualFunctional.dual_of(((2, 0),)), L, L, omega, Window(max_degree=4, mode_range=7))
print(rep.verdict, rep.extra["rational"])
