"""Weak vertex operators on a graded module and their n-th products.

A field ``a(z) = sum_n a_n z^{-n-1}`` is a :class:`Field`: a module plus a
construction tree (:class:`Expr`).  Trees are hash-consed, so structurally
equal constructions are the same object and share mode-action caches.

Modes are always indexed by ``a(z) = sum a_n z^{-n-1}``.  For the Virasoro
field that means ``a_n = L(n-1)``; the shift happens only in
:func:`generating_field`.
"""

from __future__ import annotations
import re
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .exactnum import Combination, RowReducer, Scalar, ScalarLike, accumulate, as_scalar, binomial, format_scalar, frac
from .liealg import UnknownGenerator
from .pbw import Module, degree

__all__ = [
    "Expr",
    "Field",
    "LocalityError",
    "generating_field",
    "identity_field",
    "zero_field",
    "derive",
    "nth_product",
    "linear_combination",
    "state_to_field",
    "field_to_state",
    "field_witness",
    "fields_equal",
    "ClosureElement",
    "close_under_products",
    "FieldSyntaxError",
    "parse_field",
    "parse_state",
]


class LocalityError(ValueError):
    def __init__(self, a, b, report=None):
        super().__init__(f"fields {a} and {b} are not mutually local within the window")
        self.pair = (a, b)
        self.report = report


# ---------------------------------------------------------------------------
# construction trees

_INTERN: Dict[tuple, "Expr"] = {}


class Expr:
    """Interned construction tree node.  Compare with ``is``/``==`` (identity)."""

    __slots__ = ("kind", "args", "text", "min_weight", "max_weight", "__weakref__")

    def __repr__(self) -> str:
        return f"Expr({self.text})"

    def __str__(self) -> str:
        return self.text

    @property
    def weight(self) -> Optional[int]:
        """Conformal weight, or None for the zero field and mixed-weight sums."""
        if self.min_weight is not None and self.min_weight == self.max_weight:
            return self.min_weight
        return None


def _intern(kind: str, args: tuple, text: str, wmin, wmax) -> Expr:
    key = (kind, text, wmin, wmax)
    e = _INTERN.get(key)
    if e is None:
        e = Expr()
        e.kind, e.args, e.text = kind, args, text
        e.min_weight, e.max_weight = wmin, wmax
        _INTERN[key] = e
    return e


def gen_expr(name: str, weight: int) -> Expr:
    return _intern("gen", (name,), name, weight, weight)


def identity_expr() -> Expr:
    return _intern("id", (), "I", 0, 0)


def lin_expr(terms: Iterable[Tuple[Expr, Scalar]]) -> Expr:
    acc: Dict[Expr, Scalar] = {}
    for e, c in terms:
        if e.kind == "lin":
            for e2, c2 in e.args:
                acc[e2] = acc.get(e2, 0) + c * c2
        else:
            acc[e] = acc.get(e, 0) + c
    items = sorted(((e, c) for e, c in acc.items() if c), key=lambda t: t[0].text)
    if len(items) == 1 and items[0][1] == 1:
        return items[0][0]
    if not items:
        return _intern("lin", (), "0", None, None)
    text = " + ".join(e.text if c == 1 else f"{format_scalar(c)}*{e.text}" for e, c in items)
    ws = [e.min_weight for e, _ in items] + [e.max_weight for e, _ in items]
    return _intern("lin", tuple(items), text, min(ws), max(ws))


def der_expr(a: Expr) -> Expr:
    if a.kind == "id":
        return lin_expr(())
    if a.kind == "lin":
        return lin_expr((der_expr(e), c) for e, c in a.args)
    return _intern("der", (a,), f"D({a.text})", a.min_weight + 1, a.max_weight + 1)


def prod_expr(a: Expr, n: int, b: Expr) -> Expr:
    if a.kind == "lin" or b.kind == "lin":
        ta = a.args if a.kind == "lin" else ((a, 1),)
        tb = b.args if b.kind == "lin" else ((b, 1),)
        return lin_expr((prod_expr(x, n, y), c * d) for x, c in ta for y, d in tb)
    text = f"prod({a.text}, {n}, {b.text})"
    return _intern(
        "prod", (a, n, b), text,
        a.min_weight + b.min_weight - n - 1, a.max_weight + b.max_weight - n - 1,
    )


# ---------------------------------------------------------------------------
# mode evaluation


_EMPTY: dict = {}


def mode_on_monomial(module: Module, e: Expr, n: int, mono) -> dict:
    """The mode ``e_n`` applied to a basis monomial, as a read-only dict."""
    key = (e, n, mono)
    cache = module.field_cache
    res = cache.get(key)
    if res is not None:
        return res
    if e.max_weight is None:
        return _EMPTY
    du = degree(mono)
    if du + e.max_weight - n - 1 < 0:
        cache[key] = _EMPTY
        return _EMPTY
    kind = e.kind
    if kind == "gen":
        name = e.args[0]
        g = module.generator_index(name)
        if e.max_weight == 2 and name == "L":
            res = module.act_mono(n - 1, g, mono)
        else:
            res = module.act_mono(n, g, mono)
    elif kind == "id":
        res = {mono: 1} if n == -1 else {}
    elif kind == "der":
        res = {}
        if n:
            accumulate(res, mode_on_monomial(module, e.args[0], n - 1, mono), -n)
    elif kind == "lin":
        res = {}
        for sub, c in e.args:
            accumulate(res, mode_on_monomial(module, sub, n, mono), c)
    else:
        res = _product_mode(module, e, n, mono, du)
    cache[key] = res
    return res


def _product_mode(module: Module, e: Expr, m: int, mono, du: int) -> dict:
    # (a_k b)_m u = sum_i (-1)^i C(k,i) a_{k-i} b_{m+i} u
    #             - sum_i (-1)^{k-i} C(k,i) b_{k+m-i} a_i u
    a, k, b = e.args
    out: dict = {}
    get = out.get
    imax = du + b.max_weight - 1 - m
    if k >= 0:
        imax = min(imax, k)
    for i in range(imax + 1):
        coef = binomial(k, i)
        if i & 1:
            coef = -coef
        if not coef:
            continue
        for mono2, c in mode_on_monomial(module, b, m + i, mono).items():
            s = coef * c
            for mono3, c3 in mode_on_monomial(module, a, k - i, mono2).items():
                t = get(mono3, 0) + s * c3
                if t:
                    out[mono3] = t
                else:
                    del out[mono3]
    imax = du + a.max_weight - 1
    if k >= 0:
        imax = min(imax, k)
    for i in range(imax + 1):
        coef = binomial(k, i)
        if not (k - i) & 1:
            coef = -coef
        if not coef:
            continue
        for mono2, c in mode_on_monomial(module, a, i, mono).items():
            s = coef * c
            for mono3, c3 in mode_on_monomial(module, b, k + m - i, mono2).items():
                t = get(mono3, 0) + s * c3
                if t:
                    out[mono3] = t
                else:
                    del out[mono3]
    return out


class Field:
    """A weak vertex operator on ``module`` described by ``expr``."""

    __slots__ = ("module", "expr")

    def __init__(self, module: Module, expr: Expr):
        self.module = module
        self.expr = expr

    @property
    def weight(self) -> Optional[int]:
        return self.expr.weight

    def mode(self, n: int, v: Combination) -> Combination:
        """``a_n v`` for a vector ``v``."""
        out: dict = {}
        for mono, c in v.items():
            accumulate(out, mode_on_monomial(self.module, self.expr, n, mono), c)
        return Combination._from_clean(out)

    def mode_mono(self, n: int, mono) -> Combination:
        return Combination(mode_on_monomial(self.module, self.expr, n, mono))

    def state(self) -> Combination:
        """``a_{-1}`` applied to the cyclic vector."""
        return self.mode(-1, self.module.vacuum)

    def is_zero(self) -> bool:
        return self.expr.max_weight is None

    # algebra on fields
    def derive(self) -> "Field":
        return derive(self)

    def product(self, other: "Field", n: int) -> "Field":
        return nth_product(self, other, n)

    def _check(self, other: "Field"):
        if other.module is not self.module:
            raise ValueError("fields live on different modules")

    def __add__(self, other: "Field") -> "Field":
        self._check(other)
        return Field(self.module, lin_expr([(self.expr, 1), (other.expr, 1)]))

    def __sub__(self, other: "Field") -> "Field":
        self._check(other)
        return Field(self.module, lin_expr([(self.expr, 1), (other.expr, -1)]))

    def __neg__(self) -> "Field":
        return Field(self.module, lin_expr([(self.expr, -1)]))

    def __rmul__(self, s: ScalarLike) -> "Field":
        return Field(self.module, lin_expr([(self.expr, as_scalar(s))]))

    __mul__ = __rmul__

    def __str__(self) -> str:
        return self.expr.text

    def __repr__(self) -> str:
        return f"Field({self.expr.text})"


def generating_field(module: Module, name: str) -> Field:
    """``L(z)`` (weight 2) on Virasoro modules, ``x(z)`` (weight 1) on affine ones."""
    if name not in module.generators:
        raise UnknownGenerator(name)
    return Field(module, gen_expr(name, module.generator_weight(name)))


def identity_field(module: Module) -> Field:
    return Field(module, identity_expr())


def zero_field(module: Module) -> Field:
    return Field(module, lin_expr(()))


def derive(a: Field) -> Field:
    """``a'(z)``: modes ``(a')_n = -n a_{n-1}``, weight raised by one."""
    return Field(a.module, der_expr(a.expr))


def nth_product(a: Field, b: Field, n: int) -> Field:
    a._check(b)
    return Field(a.module, prod_expr(a.expr, int(n), b.expr))


def linear_combination(module: Module, terms: Sequence[Tuple[ScalarLike, Field]]) -> Field:
    return Field(module, lin_expr((f.expr, as_scalar(c)) for c, f in terms))


# ---------------------------------------------------------------------------
# state-field correspondence


def _monomial_expr(source: Module, mono) -> Expr:
    e = identity_expr()
    gens = source.generators
    for n, g in reversed(mono):
        name = gens[g]
        w = source.generator_weight(name)
        # x_{-n} is field mode -n for currents; L(-n) is field mode -n+1
        p = -n + 1 if w == 2 and name == "L" else -n
        e = prod_expr(gen_expr(name, w), p, e)
    return e


def state_to_field(module: Module, s: Combination, on: Optional[Module] = None) -> Field:
    """The vertex operator ``Y(s, z)`` of a state in a vacuum module.

    Each PBW monomial ``x_{-n} w`` maps to the n-th product of the generating
    field of ``x`` with the field of ``w``.  With ``on`` the same expression
    is realized on another module of the same algebra (for example a Verma
    module viewed as a module over the vacuum algebra).
    """
    if not module.has_vacuum:
        raise ValueError("state_to_field needs a vacuum module (QuotientVacuum or AffineVacuum)")
    target = module if on is None else on
    if target.spec != module.spec:
        raise ValueError("target module must carry the same algebra")
    if module.vector_degree(s) > module.truncation:
        raise ValueError("state lies outside the module truncation")
    expr = lin_expr((_monomial_expr(module, mono), c) for mono, c in s.items())
    return Field(target, expr)


def field_to_state(a: Field) -> Combination:
    return a.state()


# ---------------------------------------------------------------------------
# extensional comparison


def field_witness(a: Field, b: Field, max_degree: int, mode_range: int):
    """First ``(n, monomial, a_n v, b_n v)`` where the fields differ, else None.

    Modes ``|n| <= mode_range`` on every basis monomial of degree ``<= max_degree``.
    """
    a._check(b)
    M = a.module
    for mono in M.basis_upto(max_degree):
        for n in range(-mode_range, mode_range + 1):
            x = a.mode_mono(n, mono)
            y = b.mode_mono(n, mono)
            if x != y:
                return n, mono, x, y
    return None


def fields_equal(a: Field, b: Field, max_degree: int = 6, mode_range: int = 6) -> bool:
    return field_witness(a, b, max_degree, mode_range) is None


# ---------------------------------------------------------------------------
# local-system closure


class ClosureElement(NamedTuple):
    field: Field
    state: Combination
    weight: int


def close_under_products(
    S: Sequence[Field],
    weight_bound: int,
    module: Optional[Module] = None,
    window=None,
    check_locality: bool = True,
) -> List[ClosureElement]:
    """Spanning set of the vertex algebra generated by ``S`` and ``I``, up to a weight.

    The seeds are ``I`` and the scaled derivatives ``a^{(j)}/j!`` of each
    ``a`` in ``S`` (these are the products ``a_{-j-1} I``).  Further fields are
    products ``a_n b`` with ``a`` in ``S`` and ``b`` already found.  Fields are kept when their state ``F_{-1} 1`` is independent of
    the states already kept at that weight; on a vacuum module the state
    determines the field.
    """
    S = list(S)
    if module is None:
        if not S:
            raise ValueError("need a module when S is empty")
        module = S[0].module
    if not module.has_vacuum:
        raise ValueError("closure needs a vacuum module")
    if check_locality and S:
        from .axioms import Window, locality_order

        w = window or Window(max_degree=min(4, module.truncation), mode_range=4)
        for i, a in enumerate(S):
            for b in S[i:]:
                rep = locality_order(a, b, w)
                if rep.verdict != "Verified":
                    raise LocalityError(a, b, rep)
    reducers: Dict[int, RowReducer] = {}
    found: List[ClosureElement] = []

    def offer(f: Field) -> bool:
        w = f.weight
        if w is None or w > weight_bound:
            return False
        st = f.state()
        red = reducers.setdefault(w, RowReducer())
        if red.add(st):
            found.append(ClosureElement(f, st, w))
            return True
        return False

    offer(identity_field(module))
    # a_{-j-1} I = a^{(j)} / j!; seeding these directly keeps expressions shallow
    for a in S:
        der, fact = a, 1
        for j in range(weight_bound + 1):
            if j:
                der, fact = derive(der), fact * j
            if a.weight + j > weight_bound:
                break
            offer(Field(module, lin_expr([(der.expr, frac(1, fact))])) if fact > 1 else der)
    queue = list(found)
    while queue:
        b = queue.pop(0)
        for a in S:
            wa, wb = a.weight, b.weight
            # weight of a_n b is wa + wb - n - 1; products above n = wa+wb-1 vanish on states
            if b.field.expr.kind == "id":
                continue
            for n in range(wa + wb - 1, wa + wb - 2 - weight_bound, -1):
                f = nth_product(a, b.field, n)
                if offer(f):
                    queue.append(found[-1])
    found.sort(key=lambda el: el.weight)
    return found


# ---------------------------------------------------------------------------
# text form
#
#   expr  := term (("+" | "-") term)*
#   term  := [scalar "*"] atom
#   atom  := "I" | "0" | generator | "D(" expr ")" | "prod(" expr "," int "," expr ")"
#          | "mono(" [gen "," int (";" gen "," int)*] ")" | "(" expr ")"
#
# The text of every Expr parses back to the same Expr.


class FieldSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<num>-?\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[()+,;*-]))")


def _tokenize(text: str) -> List[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FieldSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        out.append(m.group(m.lastgroup))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, module: Module, text: str):
        self.M = module
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> Optional[str]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, want: Optional[str] = None) -> str:
        t = self.peek()
        if t is None or (want is not None and t != want):
            raise FieldSyntaxError(f"expected {want or 'a token'}, got {t!r}")
        self.i += 1
        return t

    def integer(self) -> int:
        t = self.take()
        if not re.fullmatch(r"-?\d+", t):
            raise FieldSyntaxError(f"expected an integer, got {t!r}")
        return int(t)

    def expr(self) -> Expr:
        terms = [self.term(1)]
        while True:
            t = self.peek()
            if t in ("+", "-"):
                sign = 1 if self.take() == "+" else -1
                terms.append(self.term(sign))
            elif t is not None and t.startswith("-") and len(t) > 1:
                terms.append(self.term(1))  # "a -2*b" tokenizes the sign into the number
            else:
                break
        return lin_expr(terms)

    def term(self, sign: Scalar) -> Tuple[Expr, Scalar]:
        t = self.peek()
        if t is not None and re.fullmatch(r"-?\d+(/\d+)?", t) and t != "0":
            self.take()
            self.take("*")
            return self.atom(), sign * as_scalar(t)
        return self.atom(), sign

    def atom(self) -> Expr:
        t = self.take()
        if t == "0":
            return lin_expr(())
        if t == "I":
            return identity_expr()
        if t == "(":
            e = self.expr()
            self.take(")")
            return e
        if t == "D" and self.peek() == "(":
            self.take("(")
            e = self.expr()
            self.take(")")
            return der_expr(e)
        if t == "prod" and self.peek() == "(":
            self.take("(")
            a = self.expr()
            self.take(",")
            n = self.integer()
            self.take(",")
            b = self.expr()
            self.take(")")
            return prod_expr(a, n, b)
        if t == "mono" and self.peek() == "(":
            return state_to_field(self.M, self.state_body()).expr
        if t in self.M.generators:
            return gen_expr(t, self.M.generator_weight(t))
        raise FieldSyntaxError(f"unknown name {t!r}")

    def state_body(self) -> Combination:
        self.take("(")
        modes = []
        while self.peek() != ")":
            g = self.take()
            if g not in self.M.generators:
                raise FieldSyntaxError(f"unknown generator {g!r} in mono(...)")
            self.take(",")
            modes.append((g, self.integer()))
            if self.peek() == ";":
                self.take()
        self.take(")")
        return self.M.word(modes)

    def done(self):
        if self.peek() is not None:
            raise FieldSyntaxError(f"trailing input at {self.peek()!r}")


def parse_field(module: Module, text: str) -> Field:
    """Parse the text form of a field, e.g. ``"prod(L, -1, prod(L, -1, I))"``.

    ``mono(x,n;...)`` names the vertex operator of a PBW state.
    """
    p = _Parser(module, text)
    e = p.expr()
    p.done()
    return Field(module, e)


def parse_state(module: Module, text: str) -> Combination:
    """A state from ``mono(...)`` text, or the state ``F_{-1} 1`` of any field text."""
    stripped = text.strip()
    if stripped.startswith("mono(") and stripped.endswith(")") and ";" not in stripped.split(")", 1)[1]:
        p = _Parser(module, stripped)
        p.take("mono")
        try:
            v = p.state_body()
            p.done()
            return v
        except FieldSyntaxError:
            pass
    return parse_field(module, text).state()
