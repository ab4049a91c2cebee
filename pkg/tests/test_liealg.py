import itertools
from fractions import Fraction

import pytest

from vertexalg.exactnum import Combination
from vertexalg.liealg import (
    AlgebraSpecError,
    ModeTerm,
    UnknownGenerator,
    bracket,
    builtin_abelian,
    builtin_lie,
    builtin_sl2,
    format_lie_algebra,
    form_determinant,
    make_affine,
    make_lie_algebra,
    make_virasoro,
    parse_lie_algebra,
    validate_lie_algebra,
)

SL2 = make_affine(builtin_sl2(), 1)


def M(g, n):
    return ModeTerm(g, n)


# --- examples ---------------------------------------------------------------

def test_virasoro_bracket_with_cocycle():
    vir = make_virasoro(Fraction(1, 2))
    modes, central = bracket(vir, M("L", 2), M("L", -2))
    assert modes == Combination({M("L", 0): 4})
    assert central == Fraction(1, 4)


@pytest.mark.parametrize("n", [-3, -1, 0, 2, 5])
def test_l0_grading(n):
    modes, central = bracket(make_virasoro(Fraction(7, 3)), M("L", 0), M("L", n))
    assert modes == Combination({M("L", n): -n}) and central == 0


def test_virasoro_off_diagonal():
    modes, central = bracket(make_virasoro(1), M("L", 1), M("L", -2))
    assert modes == Combination({M("L", -1): 3}) and central == 0


def test_virasoro_cocycle_vanishes_at_c0():
    modes, central = bracket(make_virasoro(0), M("L", 2), M("L", -2))
    assert modes == Combination({M("L", 0): 4}) and central == 0


def test_affine_central_term():
    modes, central = bracket(SL2, M("e", 1), M("f", -1))
    assert modes == Combination({M("h", 0): 1}) and central == 1


def test_heisenberg_bracket():
    modes, central = bracket(make_affine(builtin_abelian(1), 1), M("a", 1), M("a", -1))
    assert modes.is_zero() and central == 1
    modes, central = bracket(make_affine(builtin_abelian(1), 5), M("a", 2), M("a", -2))
    assert modes.is_zero() and central == 10


def test_sl2_zero_and_cartan_brackets():
    modes, central = bracket(SL2, M("e", 2), M("e", -2))
    assert modes.is_zero() and central == 0
    modes, central = bracket(SL2, M("h", 0), M("e", 3))
    assert modes == Combination({M("e", 3): 2}) and central == 0


def test_unknown_generator():
    with pytest.raises(UnknownGenerator):
        bracket(SL2, M("x", 0), M("e", 0))
    with pytest.raises(UnknownGenerator):
        bracket(make_virasoro(0), M("e", 0), M("L", 0))


def test_builtins():
    sl2 = builtin_sl2()
    validate_lie_algebra(sl2)
    assert sl2.basis == ("e", "h", "f")
    assert form_determinant(sl2) == -2  # cofactor expansion along the first row
    ab = builtin_abelian(1)
    assert not any(ab.structure.values())
    assert builtin_abelian(3).basis == ("a1", "a2", "a3")
    assert builtin_lie("abelian:2") == builtin_abelian(2)
    assert builtin_lie("heisenberg") == builtin_abelian(1)
    with pytest.raises(ValueError):
        builtin_abelian(0)
    with pytest.raises(AlgebraSpecError):
        builtin_lie("e8")


# --- validation diagnostics --------------------------------------------------

SL2_BRACKETS = {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}}
SL2_FORM = [[0, 0, 1], [0, 2, 0], [1, 0, 0]]


@pytest.mark.parametrize("brackets, form, complete, message", [
    (SL2_BRACKETS, [[0, 0, 1], [0, 2, 0], [2, 0, 0]], True, "not symmetric at (e, f)"),
    (SL2_BRACKETS, [[0, 0, 0], [0, 2, 0], [0, 0, 0]], True, "degenerate"),
    ({("h", "e"): {"e": 2}, ("e", "h"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}},
     SL2_FORM, False, "not antisymmetric on (e, h)"),
    ({("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 2}}, SL2_FORM, True, "not invariant"),
    ({("h", "e"): {"e": 2}, ("h", "f"): {"f": -3}, ("e", "f"): {"h": 1}}, SL2_FORM, True, "Jacobi identity fails"),
])
def test_validation_names_the_failure(brackets, form, complete, message):
    with pytest.raises(AlgebraSpecError, match=message.replace("(", r"\(").replace(")", r"\)")):
        make_lie_algebra(("e", "h", "f"), brackets, form, complete_antisymmetric=complete)


def test_reserved_name():
    with pytest.raises(AlgebraSpecError, match="reserved"):
        make_lie_algebra(("L",), {}, [[1]])


def test_text_format_roundtrip():
    sl2 = builtin_sl2()
    assert parse_lie_algebra(format_lie_algebra(sl2)) == sl2
    text = "# sl2\ngenerators e h f\nh e -> 2 e\nh f -> -2 f\ne f -> 1 h\nform\n0 0 1\n0 2 0\n1 0 0\n"
    assert parse_lie_algebra(text) == sl2


@pytest.mark.parametrize("text, msg", [
    ("h e -> 2 e\n", "must come first"),
    ("generators a\na a => 1 a\nform\n1\n", "expected"),
    ("generators a\nform\n1 2\n", "form must be"),
    ("generators a b\nform\n1 0\n", "form needs 2 rows"),
    ("generators a\na x -> 1 a\nform\n1\n", "unknown generator"),
])
def test_parse_errors(text, msg):
    with pytest.raises(AlgebraSpecError, match=msg):
        parse_lie_algebra(text)


def test_rescaled_form():
    sl2 = builtin_sl2()
    two = sl2.scaled(2)
    assert two.form[1][1] == 4 and two.structure == sl2.structure


# --- properties ----------------------------------------------------------------

ALGEBRAS = [make_virasoro(Fraction(1, 2)), make_virasoro(0), SL2, make_affine(builtin_abelian(2), 3)]


def _modes(spec, r):
    return [M(g, n) for g in spec.generators for n in range(-r, r + 1)]


@pytest.mark.parametrize("spec", ALGEBRAS, ids=lambda s: s.describe())
def test_bracket_antisymmetry(spec):
    for x, y in itertools.product(_modes(spec, 6), repeat=2):
        m1, c1 = bracket(spec, x, y)
        m2, c2 = bracket(spec, y, x)
        assert m1 == -m2 and c1 == -c2


def _bracket_comb(spec, x, comb):
    """[x, comb] as (modes, central) with comb a Combination of modes."""
    out, central = Combination.zero(), 0
    for y, c in comb.items():
        m, z = bracket(spec, x, y)
        out = out + c * m
        central += c * z
    return out, central


@pytest.mark.parametrize("spec, r", [(SL2, 3), (make_affine(builtin_abelian(2), 3), 3),
                                     (make_virasoro(Fraction(1, 2)), 4), (make_virasoro(0), 4)],
                         ids=["sl2", "abelian2", "vir-half", "vir-0"])
def test_jacobi_on_modes(spec, r):
    modes = _modes(spec, r)
    for x, y, z in itertools.product(modes, repeat=3):
        total, central = Combination.zero(), 0
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            inner, _ = bracket(spec, b, c)  # central part commutes with a
            m, s = _bracket_comb(spec, a, inner)
            total, central = total + m, central + s
        assert total.is_zero() and central == 0, (x, y, z)
