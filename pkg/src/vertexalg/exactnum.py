"""Exact scalars and sparse linear combinations.

A scalar is a Python ``int`` when it is integral and a GMP rational
(``gmpy2.mpq``) otherwise.  Both are exact, always in lowest terms, and equal
and hash-equal to the matching :class:`fractions.Fraction`.  Keeping
integers as ``int`` matters for speed: integer arithmetic is several times
cheaper than ``mpq`` arithmetic, and many computations never leave the
integers.  :class:`Combination` is an immutable sparse
vector over an arbitrary hashable basis.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Mapping, Tuple, Union

from gmpy2 import mpq

Scalar = type(mpq(0))  # the rational class; integral scalars are plain ints
ScalarLike = Union[Fraction, int, str]

__all__ = [
    "Scalar",
    "Combination",
    "as_scalar",
    "frac",
    "format_scalar",
    "binomial",
    "falling_factorial",
    "combine",
]


def as_scalar(x: ScalarLike):
    """Coerce ints, Fractions, mpqs and ``"p/q"`` strings to an exact scalar.

    Integral values come back as ``int``.  Floats are rejected: they would
    smuggle rounding error into exact work.
    """
    if type(x) is int:
        return x
    if isinstance(x, Scalar):
        return int(x) if x.denominator == 1 else x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return int(x)
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else mpq(x)
    if isinstance(x, str):
        try:
            return as_scalar(Fraction(x.strip()))
        except ValueError:
            raise ValueError(f"not an exact scalar: {x!r}") from None
    raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")


def frac(p, q=1):
    """Exact ``p / q``; never produces a float."""
    r = mpq(p) / q
    return int(r) if r.denominator == 1 else r


def is_scalar(x) -> bool:
    return (type(x) is int) or isinstance(x, Scalar)


def format_scalar(x: ScalarLike) -> str:
    """Canonical ``"p/q"`` text, with ``q`` omitted when it is 1."""
    x = as_scalar(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def falling_factorial(p: int, i: int) -> int:
    out = 1
    for t in range(i):
        out *= p - t
    return out


_ZERO = 0
_BINOM_CACHE: dict = {}


def binomial(p: int, i: int) -> int:
    """Generalized binomial coefficient p(p-1)...(p-i+1)/i! for any integer p."""
    if i < 0:
        raise ValueError("binomial: lower index must be nonnegative")
    key = (p, i)
    val = _BINOM_CACHE.get(key)
    if val is None:
        num = falling_factorial(p, i)
        den = 1
        for t in range(2, i + 1):
            den *= t
        val = num // den  # always integral for integer p
        _BINOM_CACHE[key] = val
    return val


class Combination:
    """Finite linear combination ``sum c_k * k`` with exact coefficients.

    Zero coefficients are never stored, so two combinations are equal exactly
    when their term maps are equal.  Instances are immutable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Union[Mapping, Iterable[Tuple[Hashable, ScalarLike]], None] = None):
        d = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for k, c in items:
                c = as_scalar(c)
                if c:
                    s = d.get(k, 0) + c
                    if s:
                        d[k] = s
                    else:
                        d.pop(k, None)
        self._terms = d
        self._hash = None

    @classmethod
    def _from_clean(cls, d: dict) -> "Combination":
        # d must already be pruned; ownership passes to the new object
        obj = cls.__new__(cls)
        obj._terms = d
        obj._hash = None
        return obj

    @classmethod
    def single(cls, key: Hashable, coeff: ScalarLike = 1) -> "Combination":
        return cls({key: coeff})

    @classmethod
    def zero(cls) -> "Combination":
        return cls._from_clean({})

    # mapping-like access
    def __getitem__(self, key) -> Scalar:
        return self._terms.get(key, _ZERO)

    def __contains__(self, key) -> bool:
        return key in self._terms

    def __iter__(self) -> Iterator:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    @property
    def terms(self) -> dict:
        """A copy of the term map."""
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    # arithmetic
    def __add__(self, other: "Combination") -> "Combination":
        if not isinstance(other, Combination):
            return NotImplemented
        return combine(self, other, 1)

    def __sub__(self, other: "Combination") -> "Combination":
        if not isinstance(other, Combination):
            return NotImplemented
        return combine(self, other, -1)

    def __neg__(self) -> "Combination":
        return Combination._from_clean({k: -c for k, c in self._terms.items()})

    def __mul__(self, s) -> "Combination":
        try:
            s = as_scalar(s)
        except TypeError:
            return NotImplemented
        if not s:
            return Combination.zero()
        return Combination._from_clean({k: c * s for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, Combination):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def map_keys(self, f) -> "Combination":
        """Apply ``f`` to every basis key, merging coefficients that collide."""
        return Combination((f(k), c) for k, c in self._terms.items())

    def __repr__(self) -> str:
        if not self._terms:
            return "Combination(0)"
        inner = ", ".join(f"{k!r}: {format_scalar(c)}" for k, c in self._terms.items())
        return f"Combination({{{inner}}})"


def combine(u: Combination, v: Combination, s: ScalarLike = 1) -> Combination:
    """Return ``u + s*v`` with zero terms pruned."""
    s = as_scalar(s)
    d = dict(u._terms)
    if s:
        for k, c in v._terms.items():
            t = d.get(k, 0) + s * c
            if t:
                d[k] = t
            else:
                d.pop(k, None)
    return Combination._from_clean(d)


def accumulate(target: dict, src: Mapping, s=1) -> None:
    """In-place ``target += s*src`` on plain dicts, pruning zeros.

    Hot loops work on dicts and wrap the result once at the end.
    """
    if not s:
        return
    get = target.get
    if s == 1:
        for k, c in src.items():
            t = get(k, 0) + c
            if t:
                target[k] = t
            else:
                del target[k]
        return
    for k, c in src.items():
        t = get(k, 0) + s * c
        if t:
            target[k] = t
        else:
            del target[k]  # t == 0 with s*c != 0 means k was present


class RowReducer:
    """Incremental exact row echelon form over sparse vectors.

    ``add`` reports whether a vector is independent of everything added so
    far, keeping it if so.
    """

    def __init__(self):
        self._rows: dict = {}  # pivot key -> row with coefficient 1 at pivot
        self._order: list = []

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, v: Mapping) -> dict:
        w = dict(v._terms if isinstance(v, Combination) else v)
        for piv in self._order:
            c = w.get(piv)
            if c:
                accumulate(w, self._rows[piv], -c)
        return w

    def add(self, v: Mapping) -> bool:
        w = self.reduce(v)
        if not w:
            return False
        piv = min(w, key=repr)
        inv = frac(1, w[piv])
        row = {k: c * inv for k, c in w.items()}
        for p in self._order:
            c = self._rows[p].get(piv)
            if c:
                accumulate(self._rows[p], row, -c)
        self._rows[piv] = row
        self._order.append(piv)
        return True

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)
