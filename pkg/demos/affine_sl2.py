"""
Currents of affine sl2 at level 1
=================================

The vacuum module of the affinization of sl2, its currents e(z), h(z), f(z)
and a few of the vertex algebra identities checked on a finite window.
"""

from vertexalg import (
    AffineVacuum, Window, builtin_sl2, generating_field, locality_order, make_affine,
    make_module, nth_product, verify_commutator_formula, verify_rescaling,
    verify_skew_symmetry,
)

lie = builtin_sl2()
print(lie.basis, lie.form)

M = make_module(make_affine(lie, 1), AffineVacuum(), truncation=24)
print([M.graded_dimension(n) for n in range(7)])

e, h, f = (generating_field(M, g) for g in "ehf")

# e(z) f(w) ~ l/(z-w)^2 + h(w)/(z-w)
print(M.format_vector(nth_product(e, f, 1).state()))
print(M.format_vector(nth_product(e, f, 0).state()))
print(M.format_vector(nth_product(e, f, -1).state()))

w = Window(max_degree=4, mode_range=4)
for a, b in ((e, f), (e, e), (h, e), (h, h)):
    print(a, b, locality_order(a, b, w).order)

print(verify_commutator_formula(e, f, 0, w).verdict)

e1, f1 = M.monomial(((1, 0),)), M.monomial(((1, 2),))
print(verify_skew_symmetry(M, e1, f1, w).verdict)

# the form and the level only enter through their product
print(verify_rescaling(lie, 1, 2, w).to_json(timings=False))
