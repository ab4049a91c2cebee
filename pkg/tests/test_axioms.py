import itertools
import json
from fractions import Fraction

import pytest

import vertexalg.axioms as ax
from vertexalg import (
    Verma,
    Window,
    builtin_abelian,
    builtin_sl2,
    derive,
    dong_bound_check,
    generating_field,
    identity_field,
    locality_order,
    make_affine,
    make_module,
    make_virasoro,
    nth_product,
    state_to_field,
    verify_commutator_formula,
    verify_creation,
    verify_derivative_locality,
    verify_iterate_formula,
    verify_rescaling,
    verify_skew_symmetry,
    verify_straightening,
    verify_weak_associativity,
)
from vertexalg.axioms import verify_locality_at
from vertexalg.exactnum import Combination
from vertexalg.fields import field_witness, zero_field

W4 = Window(max_degree=4, mode_range=4)
W3 = Window(max_degree=3, mode_range=4)


def omega(vir):
    return vir.monomial(((2, 0),))


# --- locality --------------------------------------------------------------

def test_virasoro_locality(L):
    rep = locality_order(L, L, W4)
    assert rep.ok and rep.order == 4
    assert rep.extra["minimality_witness"]["k"] == 3


def test_virasoro_locality_central_charge_zero(vir0):
    # without the cocycle the order drops to 2: (m-n) L(m+n) is a first-derivative delta term
    L0 = generating_field(vir0, "L")
    rep = locality_order(L0, L0, W4)
    assert rep.order == 2
    assert verify_locality_at(L0, L0, 2, W4).ok
    assert verify_locality_at(L0, L0, 1, W4).verdict == "FailedAt"


def test_current_locality(currents):
    e, h, f = currents["e"], currents["h"], currents["f"]
    assert locality_order(e, f, W3).order == 2
    assert locality_order(e, e, W3).order == 0
    assert locality_order(h, e, W3).order == 1
    assert locality_order(h, h, W3).order == 2


def test_minimality_witness_reproduces(L):
    rep = verify_locality_at(L, L, 3, W4)
    assert rep.verdict == "FailedAt"
    wit = rep.witness
    assert wit["k"] == 3 and wit["lhs"]


def test_not_local_within_small_kmax(L):
    rep = locality_order(L, L, W4, k_max=2)
    assert rep.verdict == "NotLocalWithin" and rep.order is None


@pytest.mark.parametrize("x, y", list(itertools.product("ehf", repeat=2)))
def test_locality_symmetric(currents, x, y):
    assert locality_order(currents[x], currents[y], W3).order == locality_order(currents[y], currents[x], W3).order


def test_locality_symmetric_virasoro(vir, L):
    fields = [L, derive(L), nth_product(L, L, -1)]
    for a, b in itertools.combinations(fields, 2):
        assert locality_order(a, b, W3).order == locality_order(b, a, W3).order


def test_window_validation(vir, L):
    with pytest.raises(ValueError):
        Window(max_degree=-1)
    with pytest.raises(ValueError):
        Window(mode_range=0)
    with pytest.raises(ValueError):
        locality_order(L, L, Window(max_degree=41, mode_range=2))


def test_overflow_verdict():
    M = make_module(make_virasoro(1), None, 5)
    Lf = generating_field(M, "L")
    rep = locality_order(Lf, Lf, Window(max_degree=5, mode_range=4))
    assert rep.verdict == "WindowOverflow"
    assert rep.witness["limit"] == 5


# --- commutator formula -------------------------------------------------------

@pytest.mark.parametrize("m", [0, 1, 2])
def test_commutator_virasoro(L, m):
    assert verify_commutator_formula(L, L, m, Window(max_degree=5, mode_range=4)).ok


@pytest.mark.parametrize("m", [0, 1])
@pytest.mark.parametrize("x, y", [("e", "f"), ("h", "h"), ("f", "e")])
def test_commutator_currents(currents, x, y, m):
    assert verify_commutator_formula(currents[x], currents[y], m, W3).ok


def test_commutator_identity_state(vir, L):
    I = identity_field(vir)
    for m in range(3):
        assert verify_commutator_formula(I, L, m, W3).ok


def test_commutator_negative_m(L):
    with pytest.raises(ValueError):
        verify_commutator_formula(L, L, -1, W3)


def _delta_series_commutator(a, b, p, q, v):
    """[a_p, b_q] v rebuilt from sum_j Y(a_j b, z2) (1/j!) d^j/dz2^j (z1^{-1} delta(z2/z1))."""
    V = a.module
    bs = b.state()
    total = Combination.zero()
    for j in range(0, 12):
        st = a.mode(j, bs)
        if st.is_zero():
            continue
        F = state_to_field(V, st)
        # (1/j!) d^j/dz2^j sum_n z2^n z1^{-n-1} = sum_n C(n, j) z2^{n-j} z1^{-n-1}
        # coefficient of z1^{-p-1}: n = p; then F_r with -r-1 + p - j = -q-1
        n = p
        coeff = Fraction(1)
        for i in range(j):
            coeff = coeff * (n - i) / (i + 1)
        if coeff:
            total = total + coeff * F.mode(p + q - j, v)
    return total


@pytest.mark.parametrize("name", ["L", "e-f", "h-e"])
def test_commutator_against_delta_series(vir, sl2, L, currents, name):
    if name == "L":
        a = b = L
        M = vir
    else:
        x, y = name.split("-")
        a, b, M = currents[x], currents[y], sl2
    for mono in M.basis_upto(3):
        v = M.monomial(mono)
        for p in range(-3, 4):
            for q in range(-3, 4):
                direct = a.mode(p, b.mode(q, v)) - b.mode(q, a.mode(p, v))
                assert direct == _delta_series_commutator(a, b, p, q, v), (p, q, mono)


# --- associativity and the iterate formula -----------------------------------

def test_associativity_examples(vir, sl2, L, currents):
    rep = verify_weak_associativity(L, L, vir.vacuum, W4)
    assert rep.ok and rep.extra["k"] == 0
    rep = verify_weak_associativity(L, L, omega(vir), W4)
    assert rep.ok and rep.extra["k"] == 4
    h1 = sl2.monomial(((1, 1),))
    assert verify_weak_associativity(currents["e"], currents["f"], h1, W3).ok


def test_iterate_examples(vir, sl2, L, currents):
    assert verify_iterate_formula(L, L, Window(max_degree=6, mode_range=4)).ok
    assert verify_iterate_formula(currents["e"], currents["f"], W3).ok
    I = identity_field(vir)
    assert verify_iterate_formula(I, L, W3).ok


@pytest.mark.parametrize("x, y", [("e", "f"), ("h", "h"), ("e", "e")])
def test_associativity_and_iterate_agree(sl2, currents, x, y):
    a, b = currents[x], currents[y]
    w = Window(max_degree=2, mode_range=3)
    assoc = all(verify_weak_associativity(a, b, sl2.monomial(m), w).ok for m in sl2.basis_upto(2))
    assert assoc == verify_iterate_formula(a, b, w).ok == True


def test_associativity_on_verma(vir, verma0):
    L = generating_field(vir, "L")
    h_mod = make_module(make_virasoro(Fraction(1, 2)), Verma(Fraction(1, 16)), 20)
    for target in (verma0, h_mod):
        for mono in target.basis_upto(2):
            rep = verify_weak_associativity(L, L, target.monomial(mono), W3, on=target)
            assert rep.ok, rep.witness
        assert verify_iterate_formula(L, L, W3, on=target).ok


# --- skew-symmetry -------------------------------------------------------------

def test_skew_examples(vir, sl2):
    w = Window(max_degree=6, mode_range=5)
    assert verify_skew_symmetry(vir, omega(vir), omega(vir), w).ok
    assert verify_skew_symmetry(vir, vir.vacuum, omega(vir), w).ok
    e1, f1 = sl2.monomial(((1, 0),)), sl2.monomial(((1, 2),))
    assert verify_skew_symmetry(sl2, e1, f1, w).ok


def test_skew_twice(sl2):
    w = Window(max_degree=4, mode_range=4)
    vecs = [sl2.monomial(m) for m in sl2.basis_upto(2)]
    for a, b in itertools.combinations(vecs, 2):
        assert verify_skew_symmetry(sl2, a, b, w).ok
        assert verify_skew_symmetry(sl2, b, a, w).ok


def test_skew_on_sums(vir):
    a = vir.monomial(((2, 0),)) + 3 * vir.monomial(((3, 0),))
    b = vir.monomial(((2, 0), (2, 0))) - vir.vacuum
    assert verify_skew_symmetry(vir, a, b, Window(max_degree=8, mode_range=4)).ok


# --- locality of products and derivatives, creation ------------------------------------------

def test_product_locality_bound_examples(vir, heis, L):
    a = generating_field(heis, "a")
    rep = dong_bound_check(a, a, a, -1, W3)
    assert rep.ok and rep.order == 2 and rep.extra["bound"] == 8
    rep = dong_bound_check(L, L, L, 0, W3)
    assert rep.ok and rep.order <= 5 and rep.extra["bound"] == 16
    rep = dong_bound_check(L, L, L, 4, W3)
    assert rep.ok and rep.order == 0


def test_product_locality_bound_currents(currents):
    e, h, f = currents["e"], currents["h"], currents["f"]
    for n in (-2, -1, 0, 1):
        rep = dong_bound_check(e, f, h, n, W3)
        assert rep.ok and rep.order <= rep.extra["bound"]


def test_derivative_locality(vir, heis, L):
    rep = verify_derivative_locality(L, L, W3)
    assert rep.ok and rep.order <= 5 and rep.extra["base_order"] == 4
    I = identity_field(vir)
    rep = verify_derivative_locality(I, L, W3)
    assert rep.ok and rep.order == 0
    a = generating_field(heis, "a")
    rep = verify_derivative_locality(a, a, W3)
    assert rep.ok and rep.order <= 3


def test_creation(vir, sl2):
    w = Window(max_degree=6, mode_range=6)
    for s in (omega(vir), vir.vacuum, vir.monomial(((2, 0), (2, 0)))):
        assert verify_creation(vir, s, w).ok
    for mono in sl2.basis_upto(2):
        assert verify_creation(sl2, sl2.monomial(mono), w).ok


def test_products_vanish_from_locality_order(currents, sl2):
    for x, y in itertools.product("ehf", repeat=2):
        a, b = currents[x], currents[y]
        k = locality_order(a, b, W3).order
        assert field_witness(nth_product(a, b, k), zero_field(sl2), 3, 4) is None


# --- rescaling and straightening ------------------------------------------------------

def test_rescaling():
    w = Window(max_degree=4, mode_range=4)
    assert verify_rescaling(builtin_sl2(), 1, 2, w).ok
    assert verify_rescaling(builtin_sl2(), 1, 1, w).ok
    assert verify_rescaling(builtin_abelian(2), 3, Fraction(1, 3), w).ok
    with pytest.raises(ValueError):
        verify_rescaling(builtin_sl2(), 1, 0, w)


def test_act_tables_depend_on_level():
    # so equal tables under rescaling are not vacuous
    M1 = make_module(make_affine(builtin_sl2(), 1), None, 6)
    M2 = make_module(make_affine(builtin_sl2(), 2), None, 6)
    assert M1.act_mono(1, 0, ((1, 2),)) != M2.act_mono(1, 0, ((1, 2),))


def test_straightening(vir, sl2):
    assert verify_straightening(vir, Window(max_degree=4, mode_range=3)).ok
    assert verify_straightening(sl2, Window(max_degree=2, mode_range=2)).ok


# --- the verifiers notice broken identities -----------------------------------------

def test_commutator_detects_wrong_coefficients(monkeypatch, L):
    real = ax.binomial
    monkeypatch.setattr(ax, "binomial", lambda n, k: real(n, k) + (1 if k == 1 else 0))
    rep = verify_commutator_formula(L, L, 0, W3)
    assert rep.verdict == "FailedAt"
    assert {"p", "q", "vector", "lhs", "rhs"} <= set(rep.witness)


def test_associativity_detects_wrong_coefficients(monkeypatch, vir, L):
    real = ax.binomial
    monkeypatch.setattr(ax, "binomial", lambda n, k: real(n, k) * (2 if k == 1 else 1))
    assert verify_weak_associativity(L, L, omega(vir), W3).verdict == "FailedAt"
    assert verify_iterate_formula(L, L, W3).verdict == "FailedAt"


def test_skew_detects_wrong_sign(monkeypatch, vir):
    monkeypatch.setattr(ax, "frac", lambda p, q=1: -Fraction(p, q))
    rep = verify_skew_symmetry(vir, omega(vir), omega(vir), W3)
    assert rep.verdict == "FailedAt" and "z_exp" in rep.witness


# --- reports ---------------------------------------------------------------------

def test_reports_are_reproducible(sl2, currents):
    e, f = currents["e"], currents["f"]
    r1 = verify_commutator_formula(e, f, 1, W3).to_json(timings=False)
    r2 = verify_commutator_formula(e, f, 1, W3).to_json(timings=False)
    assert r1 == r2
    fresh = make_module(make_affine(builtin_sl2(), 1), None, 30)
    e2, f2 = generating_field(fresh, "e"), generating_field(fresh, "f")
    assert verify_commutator_formula(e2, f2, 1, W3).to_json(timings=False) == r1


def test_report_json(L):
    rep = verify_locality_at(L, L, 3, W4)
    data = rep.to_json()
    json.dumps(data)
    assert data["check"] == "locality-at" and data["verdict"] == "FailedAt"
    assert data["params"]["a"] == "L" and data["window"] == {"max_degree": 4, "mode_range": 4}
    assert "wall_time_ms" in data and "wall_time_ms" not in rep.to_json(timings=False)
