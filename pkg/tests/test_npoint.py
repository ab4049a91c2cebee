import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vertexalg import (
    ITERATE,
    Z1_GT_Z2,
    Z2_GT_Z1,
    DualFunctional,
    RationalForm,
    Window,
    derive,
    expand_rational,
    generating_field,
    identity_field,
    locality_order,
    matrix_coefficient_series,
    two_point_rational,
)
from vertexalg.npoint import NotRational, exponent_box, iterate_series, verify_rationality

W = Window(max_degree=4, mode_range=6)
ONE = DualFunctional.dual_of(())


def poly_mul(p, q):
    out = {}
    for (a, b), c in p.items():
        for (x, y), d in q.items():
            out[(a + x, b + y)] = out.get((a + x, b + y), 0) + c * d
    return {e: c for e, c in out.items() if c}


def z1_minus_z2(K):
    p = {(0, 0): 1}
    for _ in range(K):
        p = poly_mul(p, {(1, 0): 1, (0, 1): -1})
    return p


# --- examples ---------------------------------------------------------------

def test_heisenberg_series(heis):
    a = generating_field(heis, "a")
    ab = matrix_coefficient_series(ONE, a, a, heis.vacuum, "AB", W)
    ba = matrix_coefficient_series(ONE, a, a, heis.vacuum, "BA", W)
    # exponents run over [-7, 5], so m = 1..6 fit
    for m in range(-6, 7):
        want = m if m >= 1 else 0
        assert ab[(-m - 1, m - 1)] == want
        assert ba[(m - 1, -m - 1)] == want
    assert len(ab.coeffs) == len(ba.coeffs) == 6


def test_identity_state_series(vir, L):
    I = identity_field(vir)
    s = matrix_coefficient_series(DualFunctional.dual_of(((2, 0),)), I, L, vir.vacuum, "AB", W)
    # only a_{-1} of I survives: the z1 exponent is 0, leaving <omega*, L(z2) 1>
    assert s.coeffs == {(0, 0): 1}


def test_heisenberg_rational(heis):
    a = generating_field(heis, "a")
    g = two_point_rational(ONE, a, a, heis.vacuum, W)
    assert (g.num, g.m, g.n, g.k) == (((0, 0, 1),), 0, 0, -2)


def test_virasoro_rational(vir, L):
    g = two_point_rational(ONE, L, L, vir.vacuum, W)
    assert g.numerator == {(0, 0): Fraction(1, 4)} and (g.m, g.n, g.k) == (0, 0, -4)


def test_virasoro_brute_force(vir, L):
    # <1, L(p) L(-p) 1> = (c/12)(p^3 - p) for p >= 2; the expansion of (1/4)(z1-z2)^{-4}
    ab = matrix_coefficient_series(ONE, L, L, vir.vacuum, "AB", W)
    for p in range(2, 5):
        # L(p) = field mode p+1 at exponent -p-2; L(-p) = mode -p+1 at exponent p-2
        assert ab[(-p - 2, p - 2)] == Fraction(p ** 3 - p, 24)


def test_identity_state_rational(vir, L):
    I = identity_field(vir)
    g = two_point_rational(DualFunctional.dual_of(((2, 0),)), I, L, vir.vacuum, W)
    assert g.k == 0 and g.numerator == {(0, 0): 1}


def test_expansion_examples():
    g = RationalForm.canonical({(0, 0): 1}, -2)
    w = Window(max_degree=0, mode_range=5)
    e12 = expand_rational(g, Z1_GT_Z2, w)
    e21 = expand_rational(g, Z2_GT_Z1, w)
    want12 = {(-m - 1, m - 1): m for m in range(1, 6) if m - 1 <= 4}
    assert e12.coeffs == want12
    assert e21.coeffs == {(b, a): c for (a, b), c in want12.items()}
    poly = RationalForm.canonical({(1, 1): 1})
    for region in (Z1_GT_Z2, Z2_GT_Z1):
        assert expand_rational(poly, region, w).coeffs == {(1, 1): 1}
    # z1 z2 at z1 = z2 + z0: z2^2 + z0 z2
    assert expand_rational(poly, ITERATE, w).coeffs == {(0, 2): 1, (1, 1): 1}


def test_zero_function(vir, L):
    g = two_point_rational(DualFunctional(), L, L, vir.vacuum, W)
    assert g.is_zero() and str(g) == "0"
    assert expand_rational(g, Z1_GT_Z2, W).coeffs == {}


# --- canonical form -------------------------------------------------------------

def test_canonical_extracts_factors():
    # z1^2 z2 (z1 - z2)^2 (z1 + 3 z2) written out, times (z1-z2)^{-5}
    h = poly_mul(poly_mul({(2, 1): 1}, z1_minus_z2(2)), {(1, 0): 1, (0, 1): 3})
    g = RationalForm.canonical(h, -5)
    assert (g.m, g.n, g.k) == (2, 1, -3)
    assert g.numerator == {(1, 0): 1, (0, 1): 3}


def test_canonical_negative_shifts():
    g = RationalForm.canonical({(-3, -1): 2, (-2, -1): -2}, 0)
    # 2 z1^-3 z2^-1 (1 - z1): not divisible by z1 - z2
    assert (g.m, g.n, g.k) == (-3, -1, 0)


polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)),
                        st.integers(-4, 4).filter(bool), min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(polys, st.integers(-3, 3), st.integers(-3, 3), st.integers(-4, 3), st.integers(0, 3))
def test_canonical_is_unique(h, m, n, k, extra):
    base = RationalForm.canonical(h, 0)
    g1 = RationalForm.canonical({(i + m, j + n): c for (i, j), c in h.items()}, k)
    shifted = poly_mul({(i + m, j + n): c for (i, j), c in h.items()}, z1_minus_z2(extra))
    g2 = RationalForm.canonical(shifted, k - extra)
    assert g1 == g2
    assert (g1.m, g1.n, g1.k) == (base.m + m, base.n + n, base.k + k)
    num = g1.numerator
    assert any(i == 0 for i, _ in num) and any(j == 0 for _, j in num)
    assert RationalForm.canonical(num, 0).k == 0


@settings(max_examples=40, deadline=None)
@given(polys, st.integers(-2, 2), st.integers(-2, 2), st.integers(-4, 2))
def test_json_roundtrip(h, m, n, k):
    g = RationalForm.canonical({(i + m, j + n): Fraction(c, 3) for (i, j), c in h.items()}, k)
    data = json.loads(json.dumps(g.to_json()))
    assert RationalForm.from_json(data) == g
    assert all(isinstance(c, str) for *_, c in data["num"])


# --- expansions against multiplication back --------------------------------------

@settings(max_examples=60, deadline=None)
@given(polys, st.integers(-2, 2), st.integers(-2, 2), st.integers(-4, 3), st.sampled_from([Z1_GT_Z2, Z2_GT_Z1]))
def test_expansion_times_factor_recovers_numerator(h, m, n, k, region):
    g = RationalForm.canonical({(i + m, j + n): c for (i, j), c in h.items()}, k)
    w = Window(max_degree=0, mode_range=8)
    series = expand_rational(g, region, w)
    K = max(-g.k, 0)
    target = {(i + g.m, j + g.n): c for (i, j), c in g.numerator.items()}
    if g.k > 0:
        target = poly_mul(target, z1_minus_z2(g.k))
    back = poly_mul(series.coeffs, z1_minus_z2(K))
    (lo1, hi1), (lo2, hi2) = exponent_box(w)
    for e1 in range(lo1 + K, hi1 + 1):
        for e2 in range(lo2 + K, hi2 + 1):
            assert back.get((e1, e2), 0) == target.get((e1, e2), 0), (e1, e2)


def gen_binom(a, t):
    out = Fraction(1)
    for i in range(t):
        out = out * (a - i) / (i + 1)
    return out


@settings(max_examples=40, deadline=None)
@given(polys, st.integers(-3, 2), st.integers(-2, 2), st.integers(-4, 2))
def test_iterate_expansion(h, m, n, k):
    g = RationalForm.canonical({(i + m, j + n): c for (i, j), c in h.items()}, k)
    w = Window(max_degree=0, mode_range=6)
    got = expand_rational(g, ITERATE, w)
    (lo0, hi0), (lo2, hi2) = exponent_box(w)
    want = {}
    for (i, j), c in g.numerator.items():
        a, b = i + g.m, j + g.n
        for t in range(0, hi0 - g.k + 1):
            e = (g.k + t, a - t + b)
            if lo0 <= e[0] <= hi0 and lo2 <= e[1] <= hi2:
                want[e] = want.get(e, 0) + c * gen_binom(a, t)
    assert got.coeffs == {e: c for e, c in want.items() if c}


# --- rationality on modules ----------------------------------------------------------

def _cases(vir, sl2, heis, L, currents):
    a = generating_field(heis, "a")
    e, f, h = currents["e"], currents["f"], currents["h"]
    return [
        (ONE, a, a, heis.vacuum),
        (ONE, L, L, vir.vacuum),
        (DualFunctional.dual_of(((2, 0),)), L, L, vir.monomial(((2, 0),))),
        (ONE, L, derive(L), vir.vacuum),
        (ONE, e, f, sl2.vacuum),
        (DualFunctional.dual_of(((1, 1),)), e, f, sl2.monomial(((1, 1),))),
        (DualFunctional.dual_of(((1, 0),)), h, e, sl2.vacuum),
    ]


def test_rationality_reports(vir, sl2, heis, L, currents):
    for f, a, b, c in _cases(vir, sl2, heis, L, currents):
        rep = verify_rationality(f, a, b, c, W)
        assert rep.ok, rep.to_json()
        assert rep.extra["rational"]["k"] >= -locality_order(a, b, W).order


def test_region_expansions_match_series(vir, sl2, heis, L, currents):
    for f, a, b, c in _cases(vir, sl2, heis, L, currents):
        g = two_point_rational(f, a, b, c, W)
        assert matrix_coefficient_series(f, a, b, c, "AB", W) == expand_rational(g, Z1_GT_Z2, W)
        assert matrix_coefficient_series(f, a, b, c, "BA", W) == expand_rational(g, Z2_GT_Z1, W)
        assert iterate_series(f, a, b, c, W) == expand_rational(g, ITERATE, W)


def test_small_window_is_not_rational(vir, L):
    with pytest.raises(NotRational):
        two_point_rational(DualFunctional.dual_of(((2, 0),)), L, L, vir.monomial(((2, 0),)),
                           Window(max_degree=4, mode_range=2))


def test_report_serializes(vir, L):
    rep = verify_rationality(ONE, L, L, vir.vacuum, W)
    data = json.loads(json.dumps(rep.to_json(timings=False)))
    assert data["extra"]["rational"] == {"num": [[0, 0, "1/4"]], "m": 0, "n": 0, "k": -4}
    assert data["params"]["f"] == {"1": "1"}


def test_bad_region():
    with pytest.raises(ValueError):
        expand_rational(RationalForm.canonical({(0, 0): 1}), "ZZ", W)


def test_text_form():
    assert str(RationalForm.canonical({(0, 0): 1}, -2)) == "(z1-z2)^-2"
    assert str(RationalForm.canonical({(0, 0): Fraction(1, 4)}, -4)) == "1/4*(z1-z2)^-4"
    assert str(RationalForm.canonical({(1, 1): 1})) == "z1*z2"
