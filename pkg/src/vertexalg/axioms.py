"""Window-bounded verifiers for the vertex algebra identities.

Every identity is checked through its mode components; the formal delta
function is never built.  Expansion conventions, fixed everywhere:

* ``(z1 - z2)^n``  in nonnegative powers of ``z2``,
* ``(z0 + z2)^n``  in nonnegative powers of ``z2``,
* ``(z2 + z0)^n``  in nonnegative powers of ``z0``.

A verdict is always a statement about the window: basis vectors of degree
``<= max_degree`` and mode or exponent indices in ``[-mode_range, mode_range]``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence

from .exactnum import Combination, Scalar, ScalarLike, accumulate, as_scalar, binomial, format_scalar, frac
from .fields import (
    Field,
    derive,
    mode_on_monomial,
    nth_product,
    state_to_field,
)
from .liealg import LieAlgebraSpec, make_affine
from .pbw import AffineVacuum, Module, WindowOverflow, degree, make_module

__all__ = [
    "Window",
    "Report",
    "VERIFIED",
    "FAILED",
    "OVERFLOW",
    "NOT_LOCAL",
    "locality_order",
    "verify_locality_at",
    "verify_commutator_formula",
    "verify_weak_associativity",
    "verify_iterate_formula",
    "verify_skew_symmetry",
    "dong_bound_check",
    "verify_derivative_locality",
    "verify_creation",
    "verify_rescaling",
    "verify_straightening",
]

VERIFIED = "Verified"
FAILED = "FailedAt"
OVERFLOW = "WindowOverflow"
NOT_LOCAL = "NotLocalWithin"


@dataclass(frozen=True)
class Window:
    max_degree: int = 6
    mode_range: int = 6

    def __post_init__(self):
        if self.max_degree < 0:
            raise ValueError("max_degree must be nonnegative")
        if self.mode_range < 1:
            raise ValueError("mode_range must be at least 1")

    @property
    def modes(self) -> range:
        return range(-self.mode_range, self.mode_range + 1)

    def to_json(self) -> dict:
        return {"max_degree": self.max_degree, "mode_range": self.mode_range}


@dataclass
class Report:
    check: str
    params: dict
    verdict: str
    window: Window
    witness: Optional[dict] = None
    order: Optional[int] = None
    extra: dict = field(default_factory=dict)
    wall_time_ms: Optional[float] = None

    @property
    def ok(self) -> bool:
        return self.verdict == VERIFIED

    def to_json(self, timings: bool = True) -> dict:
        out = {
            "check": self.check,
            "params": _jsonable(self.params),
            "verdict": self.verdict,
            "window": self.window.to_json(),
        }
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.order is not None:
            out["order"] = self.order
        if self.extra:
            out["extra"] = _jsonable(self.extra)
        if timings and self.wall_time_ms is not None:
            out["wall_time_ms"] = round(self.wall_time_ms, 3)
        return out


def _jsonable(x):
    if isinstance(x, (Scalar, Fraction)):
        return format_scalar(x)
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (Field,)):
        return x.expr.text
    if isinstance(x, Report):
        return x.to_json(timings=False)
    if isinstance(x, Window):
        return x.to_json()
    return x


class _Failure(Exception):
    def __init__(self, witness: dict):
        self.witness = witness


def _run(check: str, params: dict, window: Window, body: Callable[[], dict]) -> Report:
    """Run ``body`` and wrap its outcome in a Report.

    ``body`` returns a dict of optional ``order``/``extra`` values, or raises
    ``_Failure`` with a witness.  Window overflow becomes its own verdict.
    """
    t0 = time.perf_counter()
    try:
        res = body() or {}
        rep = Report(check, params, res.pop("verdict", VERIFIED), window,
                     witness=res.pop("witness", None), order=res.pop("order", None), extra=res)
    except _Failure as f:
        rep = Report(check, params, FAILED, window, witness=f.witness)
    except WindowOverflow as e:
        rep = Report(check, params, OVERFLOW, window,
                     witness={"degree": e.degree, "limit": e.limit})
    rep.wall_time_ms = (time.perf_counter() - t0) * 1000.0
    return rep


def _check_window(module: Module, w: Window) -> None:
    if w.max_degree > module.truncation:
        raise ValueError(f"window degree {w.max_degree} exceeds module truncation {module.truncation}")


def _vec_json(module: Module, d) -> dict:
    v = d if isinstance(d, Combination) else Combination(d)
    return module.vector_to_json(v)


def _wmax(f: Field) -> int:
    return f.expr.max_weight if f.expr.max_weight is not None else 0


class _Modes:
    """Memoized products ``a_r b_s v`` for a fixed pair of fields."""

    def __init__(self, a: Field, b: Field):
        self.M = a.module
        self.a, self.b = a.expr, b.expr
        self.wa, self.wb = _wmax(a), _wmax(b)
        self._comm: Dict[tuple, dict] = {}

    def ab(self, r: int, s: int, mono) -> dict:
        out: dict = {}
        for m2, c in mode_on_monomial(self.M, self.b, s, mono).items():
            accumulate(out, mode_on_monomial(self.M, self.a, r, m2), c)
        return out

    def ba(self, r: int, s: int, mono) -> dict:
        out: dict = {}
        for m2, c in mode_on_monomial(self.M, self.a, r, mono).items():
            accumulate(out, mode_on_monomial(self.M, self.b, s, m2), c)
        return out

    def comm(self, r: int, s: int, mono) -> dict:
        key = (r, s, mono)
        res = self._comm.get(key)
        if res is None:
            if degree(mono) + self.wa + self.wb - r - s - 2 < 0:
                res = {}
            else:
                res = self.ab(r, s, mono)
                accumulate(res, self.ba(r, s, mono), -1)
            self._comm[key] = res
        return res


# ---------------------------------------------------------------------------
# locality


def _locality_witness(modes: _Modes, k: int, w: Window):
    # coefficient of z1^{-p-1} z2^{-q-1} in (z1-z2)^k [a(z1), b(z2)];
    # components are scanned in (basis vector, p, q) order, cheapest vectors first
    coeffs = [(j, (-1) ** j * binomial(k, j)) for j in range(k + 1)]
    basis = modes.M.basis_upto(w.max_degree)
    for mono in basis:
        for p in w.modes:
            for q in w.modes:
                total: dict = {}
                for j, c in coeffs:
                    accumulate(total, modes.comm(p + k - j, q + j, mono), c)
                if total:
                    return {"k": k, "p": p, "q": q, "vector": modes.M.format_monomial(mono),
                            "lhs": _vec_json(modes.M, total), "rhs": {}}
    return None


def verify_locality_at(a: Field, b: Field, k: int, w: Window) -> Report:
    """Check ``(z1-z2)^k [a(z1), b(z2)] = 0`` on the window for one fixed k."""
    a._check(b)
    _check_window(a.module, w)

    def body():
        wit = _locality_witness(_Modes(a, b), k, w)
        if wit is not None:
            raise _Failure(wit)
        return {}

    return _run("locality-at", {"a": a, "b": b, "k": k}, w, body)


def locality_order(a: Field, b: Field, w: Window, k_max: Optional[int] = None) -> Report:
    """Smallest k making ``(z1-z2)^k [a(z1), b(z2)]`` vanish on the window.

    The report's ``order`` is that k; ``extra["minimality_witness"]`` holds a
    nonzero component for ``k - 1`` when ``k > 0``.
    """
    a._check(b)
    _check_window(a.module, w)
    if k_max is None:
        k_max = 2 * (_wmax(a) + _wmax(b)) + 2
    cache = a.module.field_cache
    key = ("locality", a.expr, b.expr, w, k_max)
    hit = cache.get(key)
    if hit is not None:
        return hit
    params = {"a": a, "b": b, "k_max": k_max}

    def body():
        modes = _Modes(a, b)
        prev = None
        for k in range(k_max + 1):
            wit = _locality_witness(modes, k, w)
            if wit is None:
                out = {"order": k}
                if prev is not None:
                    out["minimality_witness"] = prev
                return out
            prev = wit
        return {"verdict": NOT_LOCAL, "witness": prev}

    rep = _run("locality", params, w, body)
    cache[key] = rep
    return rep


# ---------------------------------------------------------------------------
# commutator formula


def verify_commutator_formula(a: Field, b: Field, m: int, w: Window) -> Report:
    """Components of ``(z1-z2)^m [Y(a,z1), Y(b,z2)] = sum_i Y(a_{m+i} b, z2) d^i delta / i!``.

    Coefficient of ``z1^{-p-1} z2^{-q-1}``::

        sum_j (-1)^j C(m,j) [a_{p+m-j}, b_{q+j}] v = sum_{i>=0} C(p,i) (a_{m+i} b)_{p+q-i} v

    The right side uses the vertex operators of the states ``a_{m+i} b``.
    """
    a._check(b)
    V = a.module
    _check_window(V, w)
    if m < 0:
        raise ValueError("m must be nonnegative")

    def body():
        modes = _Modes(a, b)
        b_state = b.state()
        wa, wb = modes.wa, modes.wb
        iterates = []
        for i in range(max(0, wa + wb - m)):
            st = a.mode(m + i, b_state)
            iterates.append(state_to_field(V, st) if st else None)
        coeffs = [(j, (-1) ** j * binomial(m, j)) for j in range(m + 1)]
        for p in w.modes:
            for q in w.modes:
                for mono in V.basis_upto(w.max_degree):
                    lhs: dict = {}
                    for j, c in coeffs:
                        accumulate(lhs, modes.comm(p + m - j, q + j, mono), c)
                    rhs: dict = {}
                    for i, f in enumerate(iterates):
                        if f is not None:
                            accumulate(rhs, mode_on_monomial(V, f.expr, p + q - i, mono), binomial(p, i))
                    if lhs != rhs:
                        raise _Failure({"p": p, "q": q, "vector": V.format_monomial(mono),
                                        "lhs": _vec_json(V, lhs), "rhs": _vec_json(V, rhs)})
        return {}

    return _run("commutator", {"a": a, "b": b, "m": m}, w, body)


# ---------------------------------------------------------------------------
# associativity and the iterate formula


class _Iterates:
    """Vertex operators of the states ``a_n b`` keyed by n, realized on ``target``."""

    def __init__(self, a: Field, b: Field, target: Module):
        self.V = a.module
        self.a = a
        self.b_state = b.state()
        self.target = target
        self._f: Dict[int, Optional[Field]] = {}

    def field(self, n: int) -> Optional[Field]:
        if n not in self._f:
            st = self.a.mode(n, self.b_state)
            self._f[n] = state_to_field(self.V, st, on=self.target) if st else None
        return self._f[n]

    def mode(self, n: int, t: int, mono) -> dict:
        f = self.field(n)
        if f is None:
            return {}
        return mode_on_monomial(self.target, f.expr, t, mono)


def _on(a: Field, target: Optional[Module]) -> Field:
    if target is None or target is a.module:
        return a
    return state_to_field(a.module, a.state(), on=target)


def _annihilation_order(a: Field, mono_vec: Combination) -> int:
    """Least k >= 0 with a_n c = 0 for all n >= k."""
    M = a.module
    top = M.vector_degree(mono_vec) + _wmax(a) - 1
    for n in range(top, -1, -1):
        if a.mode(n, mono_vec):
            return n + 1
    return 0


def verify_weak_associativity(a: Field, b: Field, cvec: Combination, w: Window,
                              on: Optional[Module] = None) -> Report:
    """``(z0+z2)^k Y(Y(a,z0)b,z2)c = (z0+z2)^k Y(a,z0+z2) Y(b,z2) c`` on exponents in the window.

    ``k`` is the least integer with ``a_n c = 0`` for ``n >= k``.  Coefficient
    of ``z0^A z2^B``::

        LHS = sum_{i=0..k} C(k,i) (a_{i-A-1} b)_{k-i-B-1} c
        RHS = sum_{l>=0} C(k-r-1, l) a_r b_s c,   r = k-1-l-A,  s = l-B-1

    With ``on`` the fields act on another module of the same algebra and
    ``cvec`` belongs to it.
    """
    a._check(b)
    V = a.module
    target = on or V
    _check_window(target, w)
    A_t, B_t = _on(a, target), _on(b, target)

    def body():
        k = _annihilation_order(A_t, cvec)
        its = _Iterates(a, b, target)
        dc = target.vector_degree(cvec)
        wb = _wmax(b)
        items = list(cvec.items())
        for A in w.modes:
            for B in w.modes:
                lhs: dict = {}
                for i in range(k + 1):
                    c1 = binomial(k, i)
                    for mono, cc in items:
                        accumulate(lhs, its.mode(i - A - 1, k - i - B - 1, mono), c1 * cc)
                rhs: dict = {}
                for l in range(0, dc + wb + B + 1):
                    r, s = k - 1 - l - A, l - B - 1
                    c1 = binomial(k - r - 1, l)
                    if not c1:
                        continue
                    bc = B_t.mode(s, cvec)
                    if bc:
                        accumulate(rhs, A_t.mode(r, bc)._terms, c1)
                if lhs != rhs:
                    raise _Failure({"z0_exp": A, "z2_exp": B, "k": k,
                                    "vector": target.format_vector(cvec),
                                    "lhs": _vec_json(target, lhs), "rhs": _vec_json(target, rhs)})
        return {"k": k}

    return _run("associativity", {"a": a, "b": b, "c": target.format_vector(cvec)}, w, body)


def verify_iterate_formula(a: Field, b: Field, w: Window, vectors: Optional[Sequence] = None,
                           on: Optional[Module] = None) -> Report:
    """``Y(Y(a,z0)b,z2) = Y(a,z0+z2)Y(b,z2) - Y(b,z2)(Y(a,z0+z2) - Y(a,z2+z0))``.

    Compared on the coefficient of ``z0^A z2^B`` applied to each basis vector
    (or each monomial in ``vectors``).  The difference in the last term only
    involves ``a_r`` with ``r >= 0``, since both expansions of a polynomial
    agree, which keeps every sum finite.
    """
    a._check(b)
    V = a.module
    target = on or V
    _check_window(target, w)
    A_t, B_t = _on(a, target), _on(b, target)
    ae, be = A_t.expr, B_t.expr
    wa, wb = _wmax(a), _wmax(b)
    monos = list(vectors) if vectors is not None else target.basis_upto(w.max_degree)

    def ab(r, s, mono):
        out: dict = {}
        for m2, c in mode_on_monomial(target, be, s, mono).items():
            accumulate(out, mode_on_monomial(target, ae, r, m2), c)
        return out

    def ba(r, s, mono):
        out: dict = {}
        for m2, c in mode_on_monomial(target, ae, r, mono).items():
            accumulate(out, mode_on_monomial(target, be, s, m2), c)
        return out

    def body():
        its = _Iterates(a, b, target)
        for mono in monos:
            dv = degree(mono)
            for A in w.modes:
                for B in w.modes:
                    lhs = its.mode(-A - 1, -B - 1, mono)
                    rhs: dict = {}
                    # Y(a, z0+z2) Y(b, z2) v
                    for l in range(0, dv + wb + B + 1):
                        r, s = -A - 1 - l, l - B - 1
                        accumulate(rhs, ab(r, s, mono), binomial(-r - 1, l))
                    # - Y(b, z2) Y(a, z0+z2) v, r >= 0 part
                    for r in range(0, -A):
                        l = -r - 1 - A
                        s = l - B - 1
                        accumulate(rhs, ba(r, s, mono), -binomial(-r - 1, l))
                    # + Y(b, z2) Y(a, z2+z0) v, r >= 0 part
                    if A >= 0:
                        for r in range(0, dv + wa):
                            s = -r - A - 2 - B
                            accumulate(rhs, ba(r, s, mono), binomial(-r - 1, A))
                    if lhs != rhs:
                        raise _Failure({"z0_exp": A, "z2_exp": B, "vector": target.format_monomial(mono),
                                        "lhs": _vec_json(target, lhs), "rhs": _vec_json(target, rhs)})
        return {}

    return _run("iterate", {"a": a, "b": b}, w, body)


# ---------------------------------------------------------------------------
# skew-symmetry


def verify_skew_symmetry(module: Module, a: Combination, b: Combination, w: Window) -> Report:
    """``Y(a,z)b = e^{zD} Y(b,-z)a``, coefficient of ``z^j`` for ``|j| <= mode_range``::

        a_{-j-1} b = sum_{i>=0} (-1)^{j-i} / i! * D^i (b_{i-j-1} a)
    """
    V = module
    _check_window(V, w)

    def body():
        Ya = state_to_field(V, a)
        Yb = state_to_field(V, b)
        da = V.vector_degree(a)
        wb = max(V.vector_degree(b), 0)
        for j in w.modes:
            lhs = Ya.mode(-j - 1, b)
            rhs = Combination.zero()
            fact = 1
            for i in range(0, max(da + wb + j + 1, 0)):
                if i:
                    fact *= i
                term = Yb.mode(i - j - 1, a)
                for _ in range(i):
                    if not term:
                        break
                    term = V.d_operator(term)
                if term:
                    sign = -1 if (j - i) % 2 else 1
                    rhs = rhs + frac(sign, fact) * term
            if lhs != rhs:
                raise _Failure({"z_exp": j, "a": V.format_vector(a), "b": V.format_vector(b),
                                "lhs": V.vector_to_json(lhs), "rhs": V.vector_to_json(rhs)})
        return {}

    return _run("skew-symmetry", {"a": V.format_vector(a), "b": V.format_vector(b)}, w, body)


# ---------------------------------------------------------------------------
# locality of products, and of derivatives


def dong_bound_check(a: Field, b: Field, c: Field, n: int, w: Window) -> Report:
    """Locality order of ``(a_n b, c)`` against the bound ``4r``.

    ``r = max(order(a,b), order(a,c), order(b,c), 1 - n)``.
    """
    a._check(b)
    a._check(c)
    _check_window(a.module, w)
    params = {"a": a, "b": b, "c": c, "n": n}

    def body():
        orders = {}
        for name, (x, y) in {"ab": (a, b), "ac": (a, c), "bc": (b, c)}.items():
            rep = locality_order(x, y, w)
            if rep.verdict == OVERFLOW:
                raise WindowOverflow(rep.witness["degree"], rep.witness["limit"])
            if not rep.ok:
                return {"verdict": rep.verdict, "witness": {"pair": name, "report": rep}}
            orders[name] = rep.order
        r = max(max(orders.values()), 1 - n)
        prod = nth_product(a, b, n)
        rep = locality_order(prod, c, w, k_max=max(4 * r, 2 * (_wmax(prod) + _wmax(c)) + 2))
        if rep.verdict == OVERFLOW:
            raise WindowOverflow(rep.witness["degree"], rep.witness["limit"])
        out = {"pairwise_orders": orders, "r": r, "bound": 4 * r}
        if not rep.ok or rep.order > 4 * r:
            out.update(verdict=FAILED, witness={"order": rep.order, "bound": 4 * r,
                                                "report": rep})
            return out
        out["order"] = rep.order
        return out

    return _run("dong", params, w, body)


def verify_derivative_locality(a: Field, b: Field, w: Window) -> Report:
    """``order(a, b') <= order(a, b) + 1``."""
    a._check(b)

    def body():
        base = locality_order(a, b, w)
        if not base.ok:
            return {"verdict": base.verdict, "witness": {"report": base}}
        der = locality_order(a, derive(b), w, k_max=base.order + 1)
        if not der.ok:
            return {"verdict": FAILED if der.verdict == NOT_LOCAL else der.verdict,
                    "witness": {"base_order": base.order, "report": der}}
        return {"order": der.order, "base_order": base.order}

    return _run("derivative-locality", {"a": a, "b": b}, w, body)


# ---------------------------------------------------------------------------
# creation and rescaling


def verify_creation(module: Module, a: Combination, w: Window) -> Report:
    """``Y(a,z)1 = a + z D(a) + ...``: ``a_{-1}1 = a``, ``a_{-2}1 = D a``, ``a_n 1 = 0`` for ``n >= 0``."""
    V = module
    _check_window(V, w)

    def body():
        Ya = state_to_field(V, a)
        one = V.vacuum
        got = Ya.mode(-1, one)
        if got != a:
            raise _Failure({"mode": -1, "lhs": V.vector_to_json(got), "rhs": V.vector_to_json(a)})
        got = Ya.mode(-2, one)
        want = V.d_operator(a)
        if got != want:
            raise _Failure({"mode": -2, "lhs": V.vector_to_json(got), "rhs": V.vector_to_json(want)})
        for n in range(0, w.mode_range + 1):
            got = Ya.mode(n, one)
            if got:
                raise _Failure({"mode": n, "lhs": V.vector_to_json(got), "rhs": {}})
        return {}

    return _run("creation", {"a": V.format_vector(a)}, w, body)


def verify_rescaling(lie: LieAlgebraSpec, level: ScalarLike, alpha: ScalarLike, w: Window) -> Report:
    """The vacuum modules for ``(B, l)`` and ``(alpha B, l / alpha)`` have equal act tables."""
    level, alpha = as_scalar(level), as_scalar(alpha)
    params = {"level": format_scalar(level), "alpha": format_scalar(alpha), "generators": list(lie.basis)}
    if not alpha:
        raise ValueError("alpha must be nonzero")

    def body():
        trunc = w.max_degree + w.mode_range
        M1 = make_module(make_affine(lie, level), AffineVacuum(), trunc)
        M2 = make_module(make_affine(lie.scaled(alpha), frac(level, alpha)), AffineVacuum(), trunc)
        for d in range(w.max_degree + 1):
            if M1.basis(d) != M2.basis(d):
                raise _Failure({"basis_degree": d})
        entries = 0
        for mono in M1.basis_upto(w.max_degree):
            for g in range(lie.dim):
                for m in w.modes:
                    x = M1.act_mono(m, g, mono)
                    y = M2.act_mono(m, g, mono)
                    entries += 1
                    if x != y:
                        raise _Failure({"mode": f"{lie.basis[g]}({m})", "vector": M1.format_monomial(mono),
                                        "lhs": _vec_json(M1, x), "rhs": _vec_json(M2, y)})
        return {"entries": entries}

    return _run("rescaling", params, w, body)


def verify_straightening(module: Module, w: Window) -> Report:
    """Representation property ``[x, y] v = x(y v) - y(x v)`` on the window.

    Modes of every generator with index in the window, on basis vectors of
    degree ``<= max_degree``; the bracket includes its central scalar.
    """
    from .liealg import bracket

    M = module
    _check_window(M, w)
    spec = M.spec
    modes = [(g, m) for g in M.generators for m in w.modes]

    def body():
        count = 0
        for mono in M.basis_upto(w.max_degree):
            v = M.monomial(mono)
            for x in modes:
                xv = M.act(x, v)
                for y in modes:
                    lhs = M.act(x, M.act(y, v)) - M.act(y, xv)
                    br, central = bracket(spec, x, y)
                    rhs = central * v
                    for z, c in br.items():
                        rhs = rhs + c * M.act(z, v)
                    count += 1
                    if lhs != rhs:
                        raise _Failure({"x": f"{x[0]}({x[1]})", "y": f"{y[0]}({y[1]})",
                                        "vector": M.format_monomial(mono),
                                        "lhs": M.vector_to_json(lhs), "rhs": M.vector_to_json(rhs)})
        return {"checked": count}

    return _run("straightening", {"module": repr(M)}, w, body)
