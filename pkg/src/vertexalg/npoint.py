"""Two-point matrix coefficients and their rational functions.

``<f, Y(a,z1) Y(b,z2) c>`` is computed coefficient by coefficient as a
:class:`LaurentWindow`.  Multiplying by ``(z1 - z2)^k`` for the locality
order ``k`` leaves a Laurent polynomial, which gives an exact
:class:`RationalForm`.  "Convergence in a region" means equality with the
region's formal expansion, coefficient by coefficient on the window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Optional, Tuple

from .axioms import (
    Report,
    Window,
    _annihilation_order,
    _check_window,
    _run,
    _Failure,
    locality_order,
)
from .exactnum import Combination, Scalar, accumulate, as_scalar, binomial, format_scalar
from .fields import Field, mode_on_monomial, state_to_field
from .pbw import DualFunctional, Module

__all__ = [
    "Z1_GT_Z2",
    "Z2_GT_Z1",
    "ITERATE",
    "LaurentWindow",
    "RationalForm",
    "NotRational",
    "exponent_box",
    "matrix_coefficient_series",
    "iterate_series",
    "two_point_rational",
    "expand_rational",
    "verify_rationality",
]

Z1_GT_Z2 = "Z1_GT_Z2"
Z2_GT_Z1 = "Z2_GT_Z1"
ITERATE = "ITERATE"
_REGIONS = (Z1_GT_Z2, Z2_GT_Z1, ITERATE)

Box = Tuple[Tuple[int, int], ...]


class NotRational(ArithmeticError):
    """The would-be Laurent polynomial is not finite inside the window."""


def exponent_box(w: Window, nvars: int = 2) -> Box:
    """Exponents of ``z^{-p-1}`` for modes ``|p| <= mode_range``."""
    return tuple((-w.mode_range - 1, w.mode_range - 1) for _ in range(nvars))


def _in_box(e: Tuple[int, ...], box: Box) -> bool:
    return all(lo <= x <= hi for x, (lo, hi) in zip(e, box))


def _box_points(box: Box) -> Iterator[Tuple[int, int]]:
    (lo1, hi1), (lo2, hi2) = box
    for e1 in range(lo1, hi1 + 1):
        for e2 in range(lo2, hi2 + 1):
            yield (e1, e2)


class LaurentWindow:
    """Coefficients of a two-variable Laurent series restricted to a box."""

    __slots__ = ("variables", "box", "coeffs")

    def __init__(self, variables: Tuple[str, ...], box: Box, coeffs: Mapping = None):
        self.variables = tuple(variables)
        self.box = tuple(tuple(b) for b in box)
        self.coeffs: Dict[tuple, Scalar] = {}
        for e, c in (coeffs or {}).items():
            c = as_scalar(c)
            if not c:
                continue
            if not _in_box(e, self.box):
                raise ValueError(f"exponent {e} outside window {self.box}")
            self.coeffs[tuple(e)] = c

    def __getitem__(self, e) -> Scalar:
        return self.coeffs.get(tuple(e), 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentWindow):
            return NotImplemented
        return (self.variables, self.box, self.coeffs) == (other.variables, other.box, other.coeffs)

    def first_difference(self, other: "LaurentWindow") -> Optional[dict]:
        """Lexicographically first exponent where the two windows disagree."""
        for e in sorted(set(self.coeffs) | set(other.coeffs)):
            if self[e] != other[e]:
                return {"exponent": list(e), "left": format_scalar(self[e]),
                        "right": format_scalar(other[e])}
        return None

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "window": [list(b) for b in self.box],
            "coefficients": [[*e, format_scalar(c)] for e, c in sorted(self.coeffs.items())],
        }

    def __repr__(self) -> str:
        return f"LaurentWindow({self.variables}, {self.box}, {len(self.coeffs)} terms)"


# ---------------------------------------------------------------------------
# polynomial helpers; a polynomial is a dict (i, j) -> Scalar


def _poly_clean(p: dict) -> dict:
    return {e: c for e, c in p.items() if c}


def _divide_z1_minus_z2(h: dict) -> Optional[dict]:
    """``h / (z1 - z2)`` if exact, else None.

    Division in z1 with coefficients in z2:  q_{d-1} = h_d and
    q_{i-1} = h_i + z2 q_i; the remainder is h_0 + z2 q_0.
    """
    if not h:
        return None
    by_i: Dict[int, dict] = {}
    for (i, j), c in h.items():
        by_i.setdefault(i, {})[j] = c
    top = max(by_i)
    if top == 0:
        return None
    q: Dict[int, dict] = {}
    carry: dict = {}
    for i in range(top, 0, -1):
        cur = dict(by_i.get(i, {}))
        accumulate(cur, {j + 1: c for j, c in carry.items()})
        q[i - 1] = cur
        carry = cur
    rem = dict(by_i.get(0, {}))
    accumulate(rem, {j + 1: c for j, c in carry.items()})
    if rem:
        return None
    return {(i, j): c for i, row in q.items() for j, c in row.items() if c}


@dataclass(frozen=True)
class RationalForm:
    """``h(z1, z2) z1^m z2^n (z1 - z2)^k`` with ``h`` a polynomial.

    Built through :meth:`canonical`, ``h`` is divisible by none of ``z1``,
    ``z2``, ``z1 - z2``.  The zero function has ``h = {}`` and
    ``m = n = k = 0``.
    """

    num: Tuple[Tuple[int, int, Scalar], ...]
    m: int = 0
    n: int = 0
    k: int = 0

    @classmethod
    def canonical(cls, laurent: Mapping, k: int = 0) -> "RationalForm":
        """Normalize ``laurent * (z1 - z2)^k`` where ``laurent`` maps ``(i, j)`` to coefficients."""
        p = _poly_clean({tuple(e): as_scalar(c) for e, c in laurent.items()})
        if not p:
            return cls((), 0, 0, 0)
        m = min(i for i, _ in p)
        n = min(j for _, j in p)
        h = {(i - m, j - n): c for (i, j), c in p.items()}
        while True:
            q = _divide_z1_minus_z2(h)
            if q is None:
                break
            h = q
            k += 1
        num = tuple(sorted((i, j, c) for (i, j), c in h.items()))
        return cls(num, m, n, k)

    @property
    def numerator(self) -> Dict[Tuple[int, int], Scalar]:
        return {(i, j): c for i, j, c in self.num}

    def is_zero(self) -> bool:
        return not self.num

    def to_json(self) -> dict:
        return {"num": [[i, j, format_scalar(c)] for i, j, c in self.num],
                "m": self.m, "n": self.n, "k": self.k}

    @classmethod
    def from_json(cls, d: Mapping) -> "RationalForm":
        num = {(int(i), int(j)): as_scalar(c) for i, j, c in d["num"]}
        return cls.canonical({(i + d["m"], j + d["n"]): c for (i, j), c in num.items()}, d["k"])

    def __str__(self) -> str:
        if not self.num:
            return "0"

        def power(name, e):
            return "" if e == 0 else name if e == 1 else f"{name}^{e}"

        terms = []
        for i, j, c in self.num:
            mono = "*".join(t for t in (power("z1", i), power("z2", j)) if t)
            terms.append(format_scalar(c) if not mono else mono if c == 1 else f"{format_scalar(c)}*{mono}")
        head = terms[0] if len(terms) == 1 else "(" + " + ".join(terms) + ")"
        factors = [t for t in (power("z1", self.m), power("z2", self.n), power("(z1-z2)", self.k)) if t]
        if head == "1" and factors:
            return "*".join(factors)
        return "*".join([head] + factors)


# ---------------------------------------------------------------------------
# series


def _pair_vector(module: Module, f: DualFunctional, d: dict) -> Scalar:
    total = 0
    for mono, c in f.entries.items():
        x = d.get(mono)
        if x:
            total += c * x
    return total


def _two_modes(module: Module, outer: Field, p: int, inner: Field, q: int, cvec: Combination) -> dict:
    out: dict = {}
    for mono, c in cvec.items():
        for m2, c2 in mode_on_monomial(module, inner.expr, q, mono).items():
            accumulate(out, mode_on_monomial(module, outer.expr, p, m2), c * c2)
    return out


def _coefficient(f: DualFunctional, a: Field, b: Field, cvec: Combination, order: str,
                 e1: int, e2: int) -> Scalar:
    p, q = -e1 - 1, -e2 - 1
    M = a.module
    if order == "AB":
        return _pair_vector(M, f, _two_modes(M, a, p, b, q, cvec))
    return _pair_vector(M, f, _two_modes(M, b, q, a, p, cvec))


def matrix_coefficient_series(f: DualFunctional, a: Field, b: Field, cvec: Combination,
                              order: str, w: Window) -> LaurentWindow:
    """``<f, Y(a,z1) Y(b,z2) c>`` (order ``"AB"``) or ``<f, Y(b,z2) Y(a,z1) c>`` (``"BA"``).

    Keys are ``(z1 exponent, z2 exponent)``; the exponent of ``z^{-p-1}`` is
    attached to mode ``p``.
    """
    if order not in ("AB", "BA"):
        raise ValueError("order must be 'AB' or 'BA'")
    a._check(b)
    _check_window(a.module, w)
    box = exponent_box(w)
    coeffs = {e: _coefficient(f, a, b, cvec, order, *e) for e in _box_points(box)}
    return LaurentWindow(("z1", "z2"), box, coeffs)


def iterate_series(f: DualFunctional, a: Field, b: Field, cvec: Combination, w: Window) -> LaurentWindow:
    """``<f, Y(Y(a,z0) b, z2) c>`` with keys ``(z0 exponent, z2 exponent)``.

    The inner vertex operator is rebuilt from the state ``a_n b`` on the
    vacuum module, independently of the field-level n-th product.
    """
    a._check(b)
    M = a.module
    if not M.has_vacuum:
        raise ValueError("the iterate series needs a vacuum module")
    _check_window(M, w)
    box = exponent_box(w)
    b_state = b.state()
    coeffs = {}
    for e0 in range(box[0][0], box[0][1] + 1):
        st = a.mode(-e0 - 1, b_state)
        if not st:
            continue
        y = state_to_field(M, st)
        for e2 in range(box[1][0], box[1][1] + 1):
            coeffs[(e0, e2)] = f(y.mode(-e2 - 1, cvec))
    return LaurentWindow(("z0", "z2"), box, coeffs)


# ---------------------------------------------------------------------------
# rationality


def _weights(a: Field) -> range:
    e = a.expr
    return range(e.min_weight, e.max_weight + 1)


def _support(f: DualFunctional, a: Field, b: Field, cvec: Combination, k: int):
    """Predicted finite support of ``(z1-z2)^k <f, Y(a,z1)Y(b,z2)c>``.

    Grading fixes ``E1 + E2``; ``E1 >= -K_a(c)`` by the BA side and
    ``E2 >= -K_b(c)`` by the AB side.
    """
    M = a.module
    comps = M.homogeneous_components(cvec)
    totals = set()
    for dc in comps:
        for df in f.degrees():
            for wa in _weights(a):
                for wb in _weights(b):
                    totals.add(df - dc - wa - wb + k)
    lo1 = -_annihilation_order(a, cvec)
    lo2 = -_annihilation_order(b, cvec)
    pts = set()
    for t in totals:
        for e1 in range(lo1, t - lo2 + 1):
            pts.add((e1, t - e1))
    return pts, totals, (lo1, lo2)


def two_point_rational(f: DualFunctional, a: Field, b: Field, cvec: Combination, w: Window,
                       k: Optional[int] = None) -> RationalForm:
    """The rational function whose expansion is ``<f, Y(a,z1)Y(b,z2)c>``.

    ``k`` defaults to the locality order of ``(a, b)`` on the window.  Raises
    :class:`NotRational` if the predicted support of the Laurent polynomial
    does not fit the window or a coefficient appears outside it.
    """
    a._check(b)
    if a.is_zero() or b.is_zero() or not cvec or not f.entries:
        return RationalForm.canonical({}, 0)
    if k is None:
        rep = locality_order(a, b, w)
        if not rep.ok:
            raise NotRational(f"({a}, {b}) not local within the window: {rep.verdict}")
        k = rep.order
    box = exponent_box(w)
    pts, totals, _ = _support(f, a, b, cvec, k)
    outside = [e for e in pts if not _in_box(e, box)]
    if outside:
        raise NotRational(f"support reaches {min(outside)}, outside window {box}; enlarge mode_range")
    cache: Dict[tuple, Scalar] = {}

    def s(e1, e2):
        key = (e1, e2)
        if key not in cache:
            cache[key] = _coefficient(f, a, b, cvec, "AB", e1, e2)
        return cache[key]

    terms = [(j, (-1) ** j * binomial(k, j)) for j in range(k + 1)]
    poly = {}
    # every box point on a graded diagonal is computed; nonzero ones must be in pts
    for e in _box_points(box):
        if e[0] + e[1] not in totals:
            continue
        val = sum((c * s(e[0] - k + j, e[1] - j) for j, c in terms), 0)
        if val:
            if e not in pts:
                raise NotRational(f"coefficient {format_scalar(val)} at {e} outside the predicted support")
            poly[e] = val
    return RationalForm.canonical(poly, -k)


def expand_rational(g: RationalForm, region: str, w: Window) -> LaurentWindow:
    """Formal expansion of ``g`` in a region, restricted to the window box.

    ``Z1_GT_Z2`` expands ``(z1-z2)^k`` in nonnegative powers of ``z2``;
    ``Z2_GT_Z1`` in nonnegative powers of ``z1``.  ``ITERATE`` substitutes
    ``z1 = z2 + z0`` and expands in nonnegative powers of ``z0``, giving keys
    ``(z0 exponent, z2 exponent)``.
    """
    if region not in _REGIONS:
        raise ValueError(f"region must be one of {_REGIONS}")
    box = exponent_box(w)
    (lo1, hi1), (lo2, hi2) = box
    out: dict = {}
    k = g.k
    for i, j, c in g.num:
        a, b = i + g.m, j + g.n
        if region == Z1_GT_Z2:
            # (z1 - z2)^k = sum_t C(k,t) z1^{k-t} (-z2)^t
            t = 0
            while b + t <= hi2 and (k < 0 or t <= k):
                e = (a + k - t, b + t)
                if e[0] < lo1:
                    break
                if _in_box(e, box):
                    accumulate(out, {e: c * (-1) ** t * binomial(k, t)})
                t += 1
        elif region == Z2_GT_Z1:
            # (z1 - z2)^k = (-1)^k sum_t C(k,t) z2^{k-t} (-z1)^t
            t = 0
            while a + t <= hi1 and (k < 0 or t <= k):
                e = (a + t, b + k - t)
                if e[1] < lo2:
                    break
                if _in_box(e, box):
                    accumulate(out, {e: c * (-1) ** ((k + t) % 2) * binomial(k, t)})
                t += 1
        else:
            # z1^a z2^b (z1-z2)^k -> (z2+z0)^a z2^b z0^k, (z2+z0)^a in powers of z0
            t = 0
            while k + t <= hi1 and (a < 0 or t <= a):
                e = (k + t, a - t + b)
                if e[1] < lo2:
                    break
                if _in_box(e, box):
                    accumulate(out, {e: c * binomial(a, t)})
                t += 1
    names = ("z0", "z2") if region == ITERATE else ("z1", "z2")
    return LaurentWindow(names, box, out)


def verify_rationality(f: DualFunctional, a: Field, b: Field, cvec: Combination, w: Window) -> Report:
    """Reconstruct the rational function and compare all three expansions.

    The AB series must match the ``Z1_GT_Z2`` expansion, the BA series the
    ``Z2_GT_Z1`` one, and on vacuum modules the iterate series the
    ``ITERATE`` one.  The reconstructed ``-k`` never exceeds the locality order.
    """
    a._check(b)
    _check_window(a.module, w)
    M = a.module
    params = {"a": a, "b": b, "f": {M.format_monomial(m): format_scalar(c) for m, c in f.entries.items()},
              "c": M.vector_to_json(cvec)}

    def body():
        rep = locality_order(a, b, w)
        if not rep.ok:
            return {"verdict": rep.verdict, "witness": {"locality": rep}}
        try:
            g = two_point_rational(f, a, b, cvec, w, k=rep.order)
        except NotRational as e:
            raise _Failure({"stage": "rational", "reason": str(e)})
        if -g.k > rep.order:
            raise _Failure({"stage": "pole-order", "k": g.k, "locality_order": rep.order})
        pairs = [("AB", matrix_coefficient_series(f, a, b, cvec, "AB", w), Z1_GT_Z2),
                 ("BA", matrix_coefficient_series(f, a, b, cvec, "BA", w), Z2_GT_Z1)]
        if M.has_vacuum:
            pairs.append(("iterate", iterate_series(f, a, b, cvec, w), ITERATE))
        for name, series, region in pairs:
            diff = series.first_difference(expand_rational(g, region, w))
            if diff is not None:
                raise _Failure({"stage": name, "region": region, **diff})
        return {"rational": g.to_json(), "locality_order": rep.order}

    return _run("rationality", params, w, body)
