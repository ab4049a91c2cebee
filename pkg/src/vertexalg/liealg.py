"""Virasoro and affine Lie algebras, with exact brackets on modes.

A mode is a :class:`ModeTerm` ``(generator, index)``: ``L(m)`` for Virasoro,
``x_m = t^m (x) x`` for an affinization.  The central element is never a
mode; brackets return it already multiplied by the central charge or level.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, NamedTuple, Sequence, Tuple, Union

from .exactnum import Combination, Scalar, ScalarLike, as_scalar, format_scalar, frac

__all__ = [
    "AlgebraSpecError",
    "UnknownGenerator",
    "ModeTerm",
    "LieAlgebraSpec",
    "Virasoro",
    "Affine",
    "AlgebraSpec",
    "make_lie_algebra",
    "make_virasoro",
    "make_affine",
    "bracket",
    "builtin_sl2",
    "builtin_abelian",
    "builtin_lie",
    "load_lie_algebra",
    "parse_lie_algebra",
]


class AlgebraSpecError(ValueError):
    """Invalid Lie algebra data (bracket table or invariant form)."""


class UnknownGenerator(KeyError):
    pass


class ModeTerm(NamedTuple):
    generator: str
    index: int

    def __str__(self) -> str:
        if self.generator == "L":
            return f"L({self.index})"
        return f"{self.generator}({self.index})"


@dataclass(frozen=True)
class LieAlgebraSpec:
    """Finite-dimensional Lie algebra with a symmetric invariant form.

    ``structure`` maps an index pair ``(i, j)`` to ``{k: coeff}`` meaning
    ``[x_i, x_j] = sum coeff * x_k``; absent pairs bracket to zero.  Use
    :func:`make_lie_algebra` to build a validated instance.
    """

    basis: Tuple[str, ...]
    structure: Dict[Tuple[int, int], Dict[int, Scalar]] = field(compare=False)
    form: Tuple[Tuple[Scalar, ...], ...]

    def index(self, name: str) -> int:
        try:
            return self.basis.index(name)
        except ValueError:
            raise UnknownGenerator(name) from None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def bracket_basis(self, i: int, j: int) -> Dict[int, Scalar]:
        return self.structure.get((i, j), {})

    def pairing(self, i: int, j: int) -> Scalar:
        return self.form[i][j]

    def scaled(self, alpha: ScalarLike) -> "LieAlgebraSpec":
        """Same algebra with the form replaced by ``alpha * form``."""
        alpha = as_scalar(alpha)
        if not alpha:
            raise AlgebraSpecError("form rescaling factor must be nonzero")
        form = tuple(tuple(alpha * x for x in row) for row in self.form)
        return LieAlgebraSpec(self.basis, self.structure, form)

    def _key(self):
        return (
            self.basis,
            tuple(sorted((k, tuple(sorted(v.items()))) for k, v in self.structure.items())),
            self.form,
        )

    def __eq__(self, other):
        return isinstance(other, LieAlgebraSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


def _det(rows) -> Scalar:
    m = [list(r) for r in rows]
    n = len(m)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = frac(m[r][c], m[c][c])
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


def form_determinant(lie: LieAlgebraSpec) -> Scalar:
    return _det(lie.form)


def _add_into(d: Dict[int, Scalar], k: int, c: Scalar) -> None:
    t = d.get(k, 0) + c
    if t:
        d[k] = t
    else:
        d.pop(k, None)


def _bracket_vec(lie, u: Dict[int, Scalar], v: Dict[int, Scalar]) -> Dict[int, Scalar]:
    out: Dict[int, Scalar] = {}
    for i, a in u.items():
        for j, b in v.items():
            for k, c in lie.bracket_basis(i, j).items():
                _add_into(out, k, a * b * c)
    return out


def validate_lie_algebra(lie: LieAlgebraSpec) -> None:
    """Raise :class:`AlgebraSpecError` naming the first failing basis pair or triple."""
    n = lie.dim
    names = lie.basis
    if len(set(names)) != n:
        raise AlgebraSpecError("duplicate generator names")
    if "L" in names:
        raise AlgebraSpecError("generator name 'L' is reserved for the Virasoro field")
    if len(lie.form) != n or any(len(r) != n for r in lie.form):
        raise AlgebraSpecError(f"form must be a {n}x{n} matrix")
    for i, j in itertools.product(range(n), repeat=2):
        if lie.form[i][j] != lie.form[j][i]:
            raise AlgebraSpecError(f"form not symmetric at ({names[i]}, {names[j]})")
    if _det(lie.form) == 0:
        raise AlgebraSpecError("form is degenerate (zero determinant)")
    for i, j in itertools.product(range(n), repeat=2):
        a = lie.bracket_basis(i, j)
        b = lie.bracket_basis(j, i)
        if any(a.get(k, 0) != -b.get(k, 0) for k in set(a) | set(b)):
            raise AlgebraSpecError(f"bracket not antisymmetric on ({names[i]}, {names[j]})")
    for i, j, k in itertools.product(range(n), repeat=3):
        # [x,[y,z]] + [y,[z,x]] + [z,[x,y]]
        total: Dict[int, Scalar] = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for t, s in _bracket_vec(lie, {a: 1}, lie.bracket_basis(b, c)).items():
                _add_into(total, t, s)
        if total:
            raise AlgebraSpecError(
                f"Jacobi identity fails on ({names[i]}, {names[j]}, {names[k]})"
            )
    for i, j, k in itertools.product(range(n), repeat=3):
        # B([x_i, x_j], x_k) == B(x_i, [x_j, x_k])
        lhs = sum((c * lie.form[t][k] for t, c in lie.bracket_basis(i, j).items()), 0)
        rhs = sum((c * lie.form[i][t] for t, c in lie.bracket_basis(j, k).items()), 0)
        if lhs != rhs:
            raise AlgebraSpecError(
                f"form not invariant on ({names[i]}, {names[j]}, {names[k]})"
            )


def make_lie_algebra(
    basis: Sequence[str],
    brackets: Dict[Tuple[str, str], Dict[str, ScalarLike]],
    form: Sequence[Sequence[ScalarLike]],
    complete_antisymmetric: bool = True,
) -> LieAlgebraSpec:
    """Build and validate a Lie algebra from named bracket data.

    With ``complete_antisymmetric`` a pair given in one order only gets its
    partner filled in as the negative.
    """
    basis = tuple(basis)
    idx = {name: i for i, name in enumerate(basis)}

    def ix(name):
        if name not in idx:
            raise UnknownGenerator(name)
        return idx[name]

    structure: Dict[Tuple[int, int], Dict[int, Scalar]] = {}
    for (x, y), out in brackets.items():
        d = {}
        for z, c in out.items():
            c = as_scalar(c)
            if c:
                d[ix(z)] = c
        if d:
            structure[(ix(x), ix(y))] = d
    if complete_antisymmetric:
        for (i, j), d in list(structure.items()):
            if (j, i) not in structure and i != j:
                structure[(j, i)] = {k: -c for k, c in d.items()}
    form_t = tuple(tuple(as_scalar(x) for x in row) for row in form)
    lie = LieAlgebraSpec(basis, structure, form_t)
    validate_lie_algebra(lie)
    return lie


def builtin_sl2() -> LieAlgebraSpec:
    """sl2 with basis (e, h, f) and form B(e,f) = 1, B(h,h) = 2."""
    return make_lie_algebra(
        ("e", "h", "f"),
        {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}},
        [[0, 0, 1], [0, 2, 0], [1, 0, 0]],
    )


def builtin_abelian(d: int) -> LieAlgebraSpec:
    """Abelian Lie algebra of dimension ``d`` with the identity form.

    Generators are ``a`` for ``d == 1`` and ``a1 .. ad`` otherwise.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    names = ("a",) if d == 1 else tuple(f"a{i + 1}" for i in range(d))
    form = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    return make_lie_algebra(names, {}, form)


def builtin_lie(name: str) -> LieAlgebraSpec:
    """Look up a builtin by name: ``sl2``, ``heisenberg``, ``abelian`` or ``abelian:<d>``."""
    key = name.strip().lower()
    if key == "sl2":
        return builtin_sl2()
    if key in ("heisenberg", "abelian"):
        return builtin_abelian(1)
    if key.startswith("abelian:") or key.startswith("abelian"):
        tail = key.split(":", 1)[1] if ":" in key else key[len("abelian"):]
        return builtin_abelian(int(tail))
    raise AlgebraSpecError(f"unknown builtin Lie algebra {name!r}")


def parse_lie_algebra(text: str) -> LieAlgebraSpec:
    """Parse the plain-text description format.

    ::

        # comments start with '#'
        generators e h f
        h e -> 2 e
        h f -> -2 f
        e f -> 1 h
        form
        0 0 1
        0 2 0
        1 0 0

    Bracket lines read ``x y -> coeff z``; several lines for the same pair
    add up.  Generators may be given by name or by 0-based position.
    """
    basis = None
    brackets: Dict[Tuple[str, str], Dict[str, Scalar]] = {}
    form_rows = []
    in_form = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "generators":
            basis = tuple(words[1:])
            if not basis:
                raise AlgebraSpecError(f"line {lineno}: empty generator list")
            continue
        if words[0] == "form":
            in_form = True
            continue
        if basis is None:
            raise AlgebraSpecError(f"line {lineno}: 'generators' must come first")

        def name_of(tok):
            if tok in basis:
                return tok
            if tok.isdigit() and int(tok) < len(basis):
                return basis[int(tok)]
            raise AlgebraSpecError(f"line {lineno}: unknown generator {tok!r}")

        if in_form:
            try:
                form_rows.append([as_scalar(w) for w in words])
            except ValueError:
                raise AlgebraSpecError(f"line {lineno}: bad form entry") from None
            continue
        if len(words) != 5 or words[2] != "->":
            raise AlgebraSpecError(f"line {lineno}: expected 'x y -> coeff z'")
        x, y, z = name_of(words[0]), name_of(words[1]), name_of(words[4])
        try:
            c = as_scalar(words[3])
        except ValueError:
            raise AlgebraSpecError(f"line {lineno}: bad coefficient {words[3]!r}") from None
        d = brackets.setdefault((x, y), {})
        d[z] = d.get(z, 0) + c
    if basis is None:
        raise AlgebraSpecError("missing 'generators' line")
    if len(form_rows) != len(basis):
        raise AlgebraSpecError(f"form needs {len(basis)} rows, got {len(form_rows)}")
    # fill partners first so a table listing both orders is checked, not overwritten
    return make_lie_algebra(basis, brackets, form_rows, complete_antisymmetric=True)


def load_lie_algebra(path: Union[str, Path]) -> LieAlgebraSpec:
    return parse_lie_algebra(Path(path).read_text())


def format_lie_algebra(lie: LieAlgebraSpec) -> str:
    lines = ["generators " + " ".join(lie.basis)]
    for (i, j), d in sorted(lie.structure.items()):
        for k, c in sorted(d.items()):
            lines.append(f"{lie.basis[i]} {lie.basis[j]} -> {format_scalar(c)} {lie.basis[k]}")
    lines.append("form")
    for row in lie.form:
        lines.append(" ".join(format_scalar(x) for x in row))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Virasoro:
    central_charge: Scalar

    @property
    def generators(self) -> Tuple[str, ...]:
        return ("L",)

    def describe(self) -> str:
        return f"Virasoro(c={format_scalar(self.central_charge)})"


@dataclass(frozen=True)
class Affine:
    lie: LieAlgebraSpec
    level: Scalar

    @property
    def generators(self) -> Tuple[str, ...]:
        return self.lie.basis

    def describe(self) -> str:
        return f"Affine({'/'.join(self.lie.basis)}, level={format_scalar(self.level)})"


AlgebraSpec = Union[Virasoro, Affine]


def make_virasoro(c: ScalarLike) -> Virasoro:
    return Virasoro(as_scalar(c))


def make_affine(lie: LieAlgebraSpec, level: ScalarLike) -> Affine:
    validate_lie_algebra(lie)
    return Affine(lie, as_scalar(level))


def virasoro_bracket_raw(c: Scalar, m: int, n: int):
    """``[L(m), L(n)]`` as ``(coeff of L(m+n), central scalar)``."""
    central = frac(c * (m ** 3 - m), 12) if m + n == 0 else 0
    return m - n, central


def bracket(spec: AlgebraSpec, x: ModeTerm, y: ModeTerm) -> Tuple[Combination, Scalar]:
    """Bracket of two modes: a combination of modes plus a central scalar."""
    x, y = ModeTerm(*x), ModeTerm(*y)
    if isinstance(spec, Virasoro):
        for t in (x, y):
            if t.generator != "L":
                raise UnknownGenerator(t.generator)
        coeff, central = virasoro_bracket_raw(spec.central_charge, x.index, y.index)
        modes = Combination({ModeTerm("L", x.index + y.index): coeff})
        return modes, central
    lie = spec.lie
    i, j = lie.index(x.generator), lie.index(y.generator)
    s = x.index + y.index
    modes = Combination({ModeTerm(lie.basis[k], s): c for k, c in lie.bracket_basis(i, j).items()})
    central = 0
    if s == 0:
        central = x.index * lie.pairing(i, j) * spec.level
    return modes, central
