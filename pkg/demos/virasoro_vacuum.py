"""
The Virasoro vacuum algebra at c = 1/2
======================================

Build the quotient of the Verma module M(c, 0) by the submodule generated by
L(-1)1, list its basis, and look at the vertex operator L(z) of the
conformal vector L(-2)1.
"""

from fractions import Fraction

from vertexalg import (
    QuotientVacuum, Window, close_under_products, derive, generating_field,
    locality_order, make_module, make_virasoro, nth_product,
)
from vertexalg.fields import fields_equal

V = make_module(make_virasoro(Fraction(1, 2)), QuotientVacuum(), truncation=30)
print(V)

# graded dimensions: partitions into parts >= 2
print([V.graded_dimension(n) for n in range(11)])
for mono in V.basis(6):
    print("  ", V.format_monomial(mono))

# field modes use a(z) = sum a_n z^{-n-1}, so L(n) is the mode n+1 of L(z)
L = generating_field(V, "L")
omega = V.monomial(((2, 0),))
print(V.format_vector(L.mode(1, omega)))     # L(0) omega
print(V.format_vector(L.mode(3, omega)))     # L(2) omega = c/2

# the OPE of L with itself, read off from the n-th products
for n in range(4):
    print(n, V.format_vector(nth_product(L, L, n).state()))
print(fields_equal(nth_product(L, L, 0), derive(L)))

# (z1 - z2)^4 [L(z1), L(z2)] = 0, and 4 is the least such power
print(locality_order(L, L, Window(max_degree=6, mode_range=6)).order)

# the vertex algebra generated by L, up to weight 5
for el in close_under_products([L], 5):
    print(el.weight, el.field, "->", V.format_vector(el.state))
