"""Graded modules on PBW bases and mode action by straightening.

Three modules are provided:

* the Virasoro Verma module ``M(c, h)``,
* the vacuum quotient ``M(c, 0) / <L(-1)1>``, realized as the span of
  monomials with all parts >= 2,
* the affine vacuum module at level ``l`` induced from the trivial module.

A PBW monomial is stored as a tuple of ``(n, g)`` pairs, one per creation
mode ``x_{-n}`` (``g`` is the generator's position; always 0 for Virasoro),
in normal order: ``n`` descending, then ``g`` ascending.  The empty tuple is
the cyclic vector.  Vectors are :class:`~vertexalg.exactnum.Combination`
objects over these tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple, Union

from .exactnum import Combination, Scalar, ScalarLike, accumulate, as_scalar, format_scalar
from .liealg import Affine, AlgebraSpec, ModeTerm, UnknownGenerator, Virasoro, virasoro_bracket_raw

__all__ = [
    "WindowOverflow",
    "IncompatibleModule",
    "Verma",
    "QuotientVacuum",
    "AffineVacuum",
    "Module",
    "make_module",
    "DualFunctional",
    "dual_pair",
    "degree",
]

Monomial = Tuple[Tuple[int, int], ...]


class WindowOverflow(ArithmeticError):
    """A result would leave the module's degree truncation."""

    def __init__(self, degree: int, limit: int):
        super().__init__(f"result degree {degree} exceeds module truncation {limit}")
        self.degree = degree
        self.limit = limit


class IncompatibleModule(ValueError):
    pass


@dataclass(frozen=True)
class Verma:
    h: Scalar = 0

    def __post_init__(self):
        object.__setattr__(self, "h", as_scalar(self.h))


@dataclass(frozen=True)
class QuotientVacuum:
    pass


@dataclass(frozen=True)
class AffineVacuum:
    pass


ModuleKind = Union[Verma, QuotientVacuum, AffineVacuum]


_DEGREE: Dict[Monomial, int] = {}


def degree(mono: Monomial) -> int:
    d = _DEGREE.get(mono)
    if d is None:
        d = _DEGREE[mono] = sum([n for n, _ in mono])
    return d


def _partitions(d: int, max_part: int, min_part: int) -> Iterator[Tuple[int, ...]]:
    if d == 0:
        yield ()
        return
    for p in range(min(d, max_part), min_part - 1, -1):
        for rest in _partitions(d - p, p, min_part):
            yield (p,) + rest


def _colored(d: int, ncol: int, last: Tuple[int, int]) -> Iterator[Monomial]:
    # parts (n, g) with sort key (-n, g) nondecreasing
    if d == 0:
        yield ()
        return
    last_n, last_g = last
    for n in range(min(d, last_n), 0, -1):
        g0 = last_g if n == last_n else 0
        for g in range(g0, ncol):
            for rest in _colored(d - n, ncol, (n, g)):
                yield ((n, g),) + rest


class Module:
    """A graded module with a cyclic vector, truncated at ``truncation``.

    Build with :func:`make_module`.  Mode actions are memoized per module;
    the cache only ever grows with values that are pure functions of the key.
    """

    def __init__(self, spec: AlgebraSpec, kind: ModuleKind, truncation: int):
        if isinstance(kind, (Verma, QuotientVacuum)) and not isinstance(spec, Virasoro):
            raise IncompatibleModule(f"{type(kind).__name__} needs a Virasoro algebra")
        if isinstance(kind, AffineVacuum) and not isinstance(spec, Affine):
            raise IncompatibleModule("AffineVacuum needs an affine algebra")
        if truncation < 0:
            raise ValueError("truncation must be nonnegative")
        self.spec = spec
        self.kind = kind
        self.truncation = int(truncation)
        self._virasoro = isinstance(spec, Virasoro)
        if self._virasoro:
            self._h = kind.h if isinstance(kind, Verma) else 0
            self._min_part = 2 if isinstance(kind, QuotientVacuum) else 1
            self._c = spec.central_charge
        else:
            self._lie = spec.lie
            self._level = spec.level
        self._act_cache: Dict[tuple, dict] = {}
        self._d_cache: Dict[Monomial, dict] = {}
        self.field_cache: Dict[tuple, dict] = {}

    # ---- description -------------------------------------------------
    @property
    def generators(self) -> Tuple[str, ...]:
        return self.spec.generators

    @property
    def has_vacuum(self) -> bool:
        """True when the cyclic vector is a vacuum of a vertex algebra."""
        return isinstance(self.kind, (QuotientVacuum, AffineVacuum))

    @property
    def lowest_weight(self) -> Scalar:
        return self._h if self._virasoro else 0

    def generator_index(self, name: str) -> int:
        gens = self.generators
        if name not in gens:
            raise UnknownGenerator(name)
        return gens.index(name)

    def generator_weight(self, name: str) -> int:
        self.generator_index(name)
        return 2 if self._virasoro else 1

    def __repr__(self) -> str:
        kind = self.kind
        if isinstance(kind, Verma):
            k = f"Verma(h={format_scalar(kind.h)})"
        else:
            k = type(kind).__name__
        return f"Module({self.spec.describe()}, {k}, truncation={self.truncation})"

    # ---- basis --------------------------------------------------------
    def basis(self, d: int) -> List[Monomial]:
        """PBW monomials of degree ``d`` in normal order."""
        if d < 0:
            return []
        if self._virasoro:
            return [tuple((p, 0) for p in part) for part in _partitions(d, d, self._min_part)]
        return list(_colored(d, self._lie.dim, (d, 0)))

    def basis_upto(self, d: int) -> List[Monomial]:
        return [m for k in range(d + 1) for m in self.basis(k)]

    def graded_dimension(self, n: int) -> int:
        if not 0 <= n <= self.truncation:
            raise ValueError(f"degree {n} outside 0..{self.truncation}")
        return len(self.basis(n))

    def is_valid_monomial(self, mono: Monomial) -> bool:
        keys = [(-n, g) for n, g in mono]
        if keys != sorted(keys):
            return False
        if self._virasoro:
            return all(g == 0 and n >= self._min_part for n, g in mono)
        return all(n >= 1 and 0 <= g < self._lie.dim for n, g in mono)

    def format_monomial(self, mono: Monomial) -> str:
        if self._virasoro:
            return "".join(f"L({-n})" for n, _ in mono) + "1"
        return "".join(f"{self._lie.basis[g]}({-n})" for n, g in mono) + "1"

    def monomial_modes(self, mono: Monomial) -> Tuple[ModeTerm, ...]:
        gens = self.generators
        return tuple(ModeTerm(gens[g], -n) for n, g in mono)

    def format_vector(self, v: Combination) -> str:
        if not v:
            return "0"
        parts = []
        for mono in sorted(v.keys(), key=lambda m: (degree(m), m)):
            c = v[mono]
            name = self.format_monomial(mono)
            parts.append(name if c == 1 else f"{format_scalar(c)}*{name}")
        return " + ".join(parts)

    def vector_to_json(self, v: Combination) -> Dict[str, str]:
        return {self.format_monomial(m): format_scalar(c) for m, c in sorted(v.items())}

    # ---- vectors ------------------------------------------------------
    @property
    def vacuum(self) -> Combination:
        return Combination({(): 1})

    def monomial(self, mono: Monomial) -> Combination:
        if not self.is_valid_monomial(mono):
            raise ValueError(f"{mono!r} is not a normal-ordered basis monomial")
        return Combination({tuple(mono): 1})

    def word(self, modes: Sequence) -> Combination:
        """The vector ``x1 x2 ... xk 1`` for a word of modes (leftmost acts last)."""
        v = self.vacuum
        for x in reversed(list(modes)):
            v = self.act(x, v)
        return v

    def vector_degree(self, v: Combination) -> int:
        """Largest degree present (``-1`` for the zero vector)."""
        return max((degree(m) for m in v.keys()), default=-1)

    def homogeneous_components(self, v: Combination) -> Dict[int, Combination]:
        out: Dict[int, dict] = {}
        for m, c in v.items():
            out.setdefault(degree(m), {})[m] = c
        return {d: Combination._from_clean(t) for d, t in out.items()}

    # ---- action -------------------------------------------------------
    def _mode_key(self, x) -> Tuple[int, int]:
        x = ModeTerm(*x)
        return x.index, self.generator_index(x.generator)

    def act(self, x, v: Combination) -> Combination:
        """Apply the mode ``x`` (a :class:`ModeTerm` or ``(gen, index)``) to ``v``."""
        m, g = self._mode_key(x)
        out: dict = {}
        for mono, c in v.items():
            accumulate(out, self.act_mono(m, g, mono), c)
        return Combination._from_clean(out)

    def act_mono(self, m: int, g: int, mono: Monomial) -> dict:
        """Mode ``(index m, generator g)`` on a basis monomial; result must not be mutated."""
        key = (m, g, mono)
        res = self._act_cache.get(key)
        if res is not None:
            return res
        target = degree(mono) - m
        if target < 0:
            res = {}
        elif target > self.truncation:
            raise WindowOverflow(target, self.truncation)
        else:
            res = self._straighten(m, g, mono)
        self._act_cache[key] = res
        return res

    def _straighten(self, m: int, g: int, mono: Monomial) -> dict:
        if self._virasoro and m == 0:
            ev = self._h + degree(mono)
            return {mono: ev} if ev else {}
        if not mono:
            return self._on_cyclic(m, g)
        n1, g1 = mono[0]
        rest = mono[1:]
        n = -m
        if n > n1 or (n == n1 and g <= g1):
            return {((n, g),) + mono: 1}
        # x y rest = y (x rest) + [x, y] rest
        out: dict = {}
        for mono2, c in self.act_mono(m, g, rest).items():
            accumulate(out, self.act_mono(-n1, g1, mono2), c)
        s = m - n1
        if self._virasoro:
            coeff, central = virasoro_bracket_raw(self._c, m, -n1)
            if coeff:
                accumulate(out, self.act_mono(s, 0, rest), coeff)
        else:
            for k, c in self._lie.bracket_basis(g, g1).items():
                accumulate(out, self.act_mono(s, k, rest), c)
            central = 0
            if s == 0:
                central = m * self._lie.pairing(g, g1) * self._level
        if central:
            accumulate(out, {rest: central})
        return out

    def _on_cyclic(self, m: int, g: int) -> dict:
        if m >= 0:
            # m == 0 on the Virasoro cyclic vector is handled by the L(0) shortcut
            return {}
        n = -m
        if self._virasoro and n < self._min_part:
            return {}
        return {((n, g),): 1}

    # ---- translation operator ----------------------------------------
    def d_operator(self, v: Combination) -> Combination:
        """The translation endomorphism: ``L(-1)`` or the affine ``d``."""
        out: dict = {}
        for mono, c in v.items():
            accumulate(out, self._d_mono(mono), c)
        return Combination._from_clean(out)

    def _d_mono(self, mono: Monomial) -> dict:
        if self._virasoro:
            return self.act_mono(-1, 0, mono)
        res = self._d_cache.get(mono)
        if res is not None:
            return res
        if degree(mono) + 1 > self.truncation:
            raise WindowOverflow(degree(mono) + 1, self.truncation)
        res = {}
        if mono:
            # d x_{-n} w = n x_{-n-1} w + x_{-n} d w
            (n1, g1), rest = mono[0], mono[1:]
            accumulate(res, self.act_mono(-n1 - 1, g1, rest), n1)
            for mono2, c in self._d_mono(rest).items():
                accumulate(res, self.act_mono(-n1, g1, mono2), c)
        self._d_cache[mono] = res
        return res


def make_module(spec: AlgebraSpec, kind: ModuleKind = None, truncation: int = 24) -> Module:
    """Construct a module; ``kind`` defaults to the algebra's vacuum module."""
    if kind is None:
        kind = QuotientVacuum() if isinstance(spec, Virasoro) else AffineVacuum()
    return Module(spec, kind, truncation)


class DualFunctional:
    """Finite combination of dual-basis functionals on PBW monomials."""

    __slots__ = ("entries",)

    def __init__(self, entries: Mapping[Monomial, ScalarLike] = None):
        self.entries = {tuple(k): as_scalar(c) for k, c in (entries or {}).items() if as_scalar(c)}

    @classmethod
    def dual_of(cls, mono: Monomial, coeff: ScalarLike = 1) -> "DualFunctional":
        return cls({tuple(mono): coeff})

    def __call__(self, v: Combination) -> Scalar:
        return dual_pair(self, v)

    def degrees(self) -> List[int]:
        return sorted({degree(m) for m in self.entries})

    def __repr__(self) -> str:
        return f"DualFunctional({self.entries!r})"


def dual_pair(f: DualFunctional, v: Combination) -> Scalar:
    total = 0
    for mono, c in f.entries.items():
        total += c * v[mono]
    return total
