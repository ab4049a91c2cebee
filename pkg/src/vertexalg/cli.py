"""Command-line front end.

    vertexalg dims    --algebra virasoro --c 1/2 --max-degree 8
    vertexalg basis   --algebra affine --lie sl2 --level 1 --max-degree 2
    vertexalg verify  --algebra virasoro --c 1/2 --check locality:L,L
    vertexalg product L L 1 --algebra virasoro --c 1/2

Output is JSON on stdout (JSON Lines for ``verify``), keys sorted, scalars
as ``"p/q"`` strings.  Exit codes: 0 all verified, 1 an identity failed,
2 usage or configuration error, 3 window overflow.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .axioms import (
    FAILED,
    NOT_LOCAL,
    OVERFLOW,
    VERIFIED,
    Report,
    Window,
    dong_bound_check,
    locality_order,
    verify_commutator_formula,
    verify_creation,
    verify_derivative_locality,
    verify_iterate_formula,
    verify_rescaling,
    verify_skew_symmetry,
    verify_straightening,
    verify_weak_associativity,
)
from .exactnum import as_scalar, format_scalar
from .fields import Field, FieldSyntaxError, generating_field, parse_field, parse_state
from .liealg import (
    AlgebraSpecError,
    Affine,
    builtin_lie,
    load_lie_algebra,
    make_affine,
    make_virasoro,
)
from .npoint import verify_rationality
from .pbw import (
    AffineVacuum,
    DualFunctional,
    IncompatibleModule,
    Module,
    QuotientVacuum,
    Verma,
    WindowOverflow,
    make_module,
)

MAX_DEGREE_CAP = 16
MODE_RANGE_CAP = 16
JOBS_ENV = "VERTEXALG_JOBS"

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_OVERFLOW = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration

_KEYS = {
    "algebra": str, "c": str, "h": str, "kind": str, "lie": str, "lie_file": str,
    "level": str, "max_degree": int, "mode_range": int, "output": str, "jobs": int,
    "timings": bool,
}


@dataclass
class RunConfig:
    algebra: str = "virasoro"
    c: str = "0"
    h: str = "0"
    kind: Optional[str] = None
    lie: str = "sl2"
    lie_file: Optional[str] = None
    level: str = "1"
    max_degree: int = 6
    mode_range: int = 6
    output: Optional[str] = None
    jobs: int = 1
    timings: bool = False
    checks: List[str] = field(default_factory=list)

    def validate(self) -> None:
        if self.algebra not in ("virasoro", "affine"):
            raise ConfigError(f"--algebra must be virasoro or affine, not {self.algebra!r}")
        kinds = ("verma", "quotient-vacuum") if self.algebra == "virasoro" else ("affine-vacuum",)
        if self.kind is not None and self.kind not in kinds:
            raise ConfigError(f"--kind {self.kind} is not available for {self.algebra}")
        if not 0 <= self.max_degree <= MAX_DEGREE_CAP:
            raise ConfigError(f"--max-degree must be in 0..{MAX_DEGREE_CAP}")
        if not 1 <= self.mode_range <= MODE_RANGE_CAP:
            raise ConfigError(f"--mode-range must be in 1..{MODE_RANGE_CAP}")
        if self.jobs < 1:
            raise ConfigError("--jobs must be positive")
        for name in ("c", "h", "level"):
            try:
                as_scalar(getattr(self, name))
            except (TypeError, ValueError):
                raise ConfigError(f"--{name} must be an exact rational like 1/2") from None

    @property
    def window(self) -> Window:
        return Window(self.max_degree, self.mode_range)


def read_config_file(path: str) -> Dict[str, object]:
    """Flat ``key = value`` text; ``#`` starts a comment; ``check`` may repeat."""
    out: Dict[str, object] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "check":
            out.setdefault("checks", []).append(value)
            continue
        if key not in _KEYS:
            raise ConfigError(f"{path}:{no}: unknown key {key!r}")
        typ = _KEYS[key]
        try:
            if typ is bool:
                out[key] = value.lower() in ("1", "true", "yes", "on")
            else:
                out[key] = typ(value)
        except ValueError:
            raise ConfigError(f"{path}:{no}: bad value for {key}: {value!r}") from None
    return out


def build_config(ns: argparse.Namespace) -> RunConfig:
    values: Dict[str, object] = {}
    env_jobs = os.environ.get(JOBS_ENV)
    if env_jobs:
        try:
            values["jobs"] = int(env_jobs)
        except ValueError:
            raise ConfigError(f"{JOBS_ENV} must be an integer") from None
    if ns.config:
        values.update(read_config_file(ns.config))
    for key in _KEYS:
        v = getattr(ns, key, None)
        if v is not None and v is not False:
            values[key] = v
    if getattr(ns, "check", None):
        values["checks"] = list(ns.check)
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# algebra and module


def build_algebra(cfg: RunConfig):
    if cfg.algebra == "virasoro":
        return make_virasoro(cfg.c)
    lie = load_lie_algebra(cfg.lie_file) if cfg.lie_file else builtin_lie(cfg.lie)
    return make_affine(lie, cfg.level)


def _truncation(cfg: RunConfig) -> int:
    # intermediate vectors a_p b_q v climb above the window before coming back
    return cfg.max_degree + 3 * cfg.mode_range + 12


def build_modules(cfg: RunConfig) -> Tuple[Module, Module]:
    """``(M, V)``: the module acted on, and the vacuum module carrying the states."""
    spec = build_algebra(cfg)
    trunc = _truncation(cfg)
    if isinstance(spec, Affine):
        V = make_module(spec, AffineVacuum(), trunc)
        return V, V
    V = make_module(spec, QuotientVacuum(), trunc)
    if cfg.kind == "verma":
        return make_module(spec, Verma(as_scalar(cfg.h)), trunc), V
    return V, V


# ---------------------------------------------------------------------------
# checks


def split_args(text: str) -> List[str]:
    """Split on commas outside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    tail = "".join(cur).strip()
    if tail or parts:
        parts.append(tail)
    return parts


def parse_check(text: str) -> Tuple[str, List[str], Dict[str, str]]:
    name, _, rest = text.partition(":")
    pos, kw = [], {}
    for item in split_args(rest):
        key, eq, val = item.partition("=")
        if eq and key.strip().isidentifier() and "(" not in key:
            kw[key.strip()] = val.strip()
        elif item:
            pos.append(item)
    return name.strip(), pos, kw


class _Context:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.w = cfg.window
        self.M, self.V = build_modules(cfg)

    def field(self, text: str) -> Field:
        f = parse_field(self.V, text)
        return f if self.M is self.V else Field(self.M, f.expr)

    def vfield(self, text: str) -> Field:
        return parse_field(self.V, text)

    def gen_pairs(self) -> List[Tuple[Field, Field]]:
        gs = [generating_field(self.M, g) for g in self.M.generators]
        return [(a, b) for a in gs for b in gs]

    def vgen_pairs(self) -> List[Tuple[Field, Field]]:
        gs = [generating_field(self.V, g) for g in self.V.generators]
        return [(a, b) for a in gs for b in gs]

    def require_vacuum(self, check: str) -> None:
        if not self.M.has_vacuum:
            raise ConfigError(f"{check} needs a vacuum module, not a Verma module")


def _merge(check: str, reports: Sequence[Report], w: Window, params: dict) -> Report:
    """Collapse a sweep into one report: the first non-verified one, else a summary."""
    for r in reports:
        if not r.ok:
            return r
    total = sum(r.wall_time_ms or 0.0 for r in reports)
    rep = Report(check, params, VERIFIED, w, extra={"instances": len(reports)})
    rep.wall_time_ms = total
    return rep


def _int_kw(kw: Dict[str, str], key: str, default: Optional[int]) -> Optional[int]:
    if key not in kw:
        return default
    try:
        return int(kw[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {kw[key]!r}") from None


def _two(pos: List[str], ctx: _Context, vacuum: bool = False) -> List[Tuple[Field, Field]]:
    if not pos:
        return ctx.vgen_pairs() if vacuum else ctx.gen_pairs()
    if len(pos) != 2:
        raise ConfigError("expected two field arguments")
    mk = ctx.vfield if vacuum else ctx.field
    return [(mk(pos[0]), mk(pos[1]))]


def _check_locality(ctx, pos, kw):
    pairs = _two(pos, ctx)
    k_max = _int_kw(kw, "k_max", None)
    reps = [locality_order(a, b, ctx.w, k_max=k_max) for a, b in pairs]
    return reps[0] if len(reps) == 1 else _merge("locality", reps, ctx.w, {"pairs": "generators"})


def _check_commutator(ctx, pos, kw):
    ctx.require_vacuum("commutator")
    ms = [_int_kw(kw, "m", 0)] if "m" in kw else [0, 1, 2]
    reps = [verify_commutator_formula(a, b, m, ctx.w) for a, b in _two(pos, ctx) for m in ms]
    return reps[0] if len(reps) == 1 else _merge("commutator", reps, ctx.w, {"m": ms})


def _check_associativity(ctx, pos, kw):
    on = None if ctx.M is ctx.V else ctx.M
    if "c" in kw:
        cvecs = [parse_state(ctx.M, kw["c"]) if on is None else _verma_state(ctx, kw["c"])]
    else:
        cvecs = [ctx.M.monomial(m) for m in ctx.M.basis_upto(ctx.w.max_degree)]
    reps = [verify_weak_associativity(a, b, c, ctx.w, on=on)
            for a, b in _two(pos, ctx, vacuum=True) for c in cvecs]
    return reps[0] if len(reps) == 1 else _merge("associativity", reps, ctx.w, {"vectors": len(cvecs)})


def _verma_state(ctx, text: str):
    p = parse_state(ctx.V, text) if not text.strip().startswith("mono(") else None
    if p is not None:
        raise ConfigError("on a Verma module give c as mono(...)")
    from .fields import _Parser

    parser = _Parser(ctx.M, text.strip())
    parser.take("mono")
    v = parser.state_body()
    parser.done()
    return v


def _check_iterate(ctx, pos, kw):
    on = None if ctx.M is ctx.V else ctx.M
    reps = [verify_iterate_formula(a, b, ctx.w, on=on) for a, b in _two(pos, ctx, vacuum=True)]
    return reps[0] if len(reps) == 1 else _merge("iterate", reps, ctx.w, {"pairs": "generators"})


def _check_skew(ctx, pos, kw):
    ctx.require_vacuum("skew-symmetry")
    V = ctx.V
    if pos:
        if len(pos) != 2:
            raise ConfigError("skew-symmetry takes two states")
        pairs = [(parse_state(V, pos[0]), parse_state(V, pos[1]))]
    else:
        basis = V.basis_upto(ctx.w.max_degree)
        pairs = [(V.monomial(x), V.monomial(y)) for x in basis for y in basis
                 if sum(n for n, _ in x) + sum(n for n, _ in y) <= ctx.w.max_degree]
    reps = [verify_skew_symmetry(V, a, b, ctx.w) for a, b in pairs]
    return reps[0] if len(reps) == 1 else _merge("skew-symmetry", reps, ctx.w, {"pairs": len(pairs)})


def _check_dong(ctx, pos, kw):
    if len(pos) != 3:
        raise ConfigError("dong needs three fields, e.g. dong:L,L,L,n=0")
    a, b, c = (ctx.field(t) for t in pos)
    return dong_bound_check(a, b, c, _int_kw(kw, "n", 0), ctx.w)


def _check_derivative_locality(ctx, pos, kw):
    reps = [verify_derivative_locality(a, b, ctx.w) for a, b in _two(pos, ctx)]
    return reps[0] if len(reps) == 1 else _merge("derivative-locality", reps, ctx.w, {"pairs": "generators"})


def _check_creation(ctx, pos, kw):
    ctx.require_vacuum("creation")
    V = ctx.V
    states = [parse_state(V, t) for t in pos] or [V.monomial(m) for m in V.basis_upto(ctx.w.max_degree)]
    reps = [verify_creation(V, s, ctx.w) for s in states]
    return reps[0] if len(reps) == 1 else _merge("creation", reps, ctx.w, {"states": len(states)})


def _check_rescaling(ctx, pos, kw):
    spec = ctx.M.spec
    if not isinstance(spec, Affine):
        raise ConfigError("rescaling needs an affine algebra")
    alpha = kw.get("alpha", pos[0] if pos else "2")
    try:
        alpha = as_scalar(alpha)
    except (TypeError, ValueError):
        raise ConfigError(f"alpha must be an exact rational, got {alpha!r}") from None
    if not alpha:
        raise ConfigError("alpha must be nonzero")
    return verify_rescaling(spec.lie, spec.level, alpha, ctx.w)


def _check_rationality(ctx, pos, kw):
    M = ctx.M
    if pos:
        if len(pos) != 2:
            raise ConfigError("rationality takes two fields")
        a, b = ctx.field(pos[0]), ctx.field(pos[1])
    else:
        g = generating_field(M, M.generators[0])
        a, b = g, g
    cvec = M.vacuum if "c" not in kw else (
        parse_state(M, kw["c"]) if M is ctx.V else _verma_state(ctx, kw["c"]))
    fvec = M.vacuum if "f" not in kw else (
        parse_state(M, kw["f"]) if M is ctx.V else _verma_state(ctx, kw["f"]))
    return verify_rationality(DualFunctional(fvec.terms), a, b, cvec, ctx.w)


def _check_straightening(ctx, pos, kw):
    return verify_straightening(ctx.M, ctx.w)


CHECKS: Dict[str, Callable] = {
    "locality": _check_locality,
    "commutator": _check_commutator,
    "associativity": _check_associativity,
    "iterate": _check_iterate,
    "skew-symmetry": _check_skew,
    "dong": _check_dong,
    "derivative-locality": _check_derivative_locality,
    "creation": _check_creation,
    "rescaling": _check_rescaling,
    "rationality": _check_rationality,
    "straightening": _check_straightening,
}


def run_check(cfg: RunConfig, text: str, ctx: Optional[_Context] = None) -> dict:
    """Run one ``--check`` and return its JSON report."""
    name, pos, kw = parse_check(text)
    if name not in CHECKS:
        raise ConfigError(f"unknown check {name!r}; known: {', '.join(sorted(CHECKS))}")
    ctx = ctx or _Context(cfg)
    rep = CHECKS[name](ctx, pos, kw)
    out = rep.to_json(timings=cfg.timings)
    out["spec"] = text
    return out


_WORKER_CTX: Optional[_Context] = None


def _worker_init(cfg: RunConfig) -> None:
    global _WORKER_CTX
    _WORKER_CTX = _Context(cfg)


def _worker_run(cfg: RunConfig, text: str):
    try:
        return "ok", run_check(cfg, text, _WORKER_CTX)
    except (ConfigError, FieldSyntaxError, AlgebraSpecError, IncompatibleModule, KeyError) as e:
        return "usage", f"{text}: {e}"


def exit_code_for(verdicts: Sequence[str]) -> int:
    if any(v in (FAILED, NOT_LOCAL) for v in verdicts):
        return EXIT_FAILED
    if any(v == OVERFLOW for v in verdicts):
        return EXIT_OVERFLOW
    return EXIT_OK


# ---------------------------------------------------------------------------
# commands


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(", ", ": "))


def _emit(cfg: RunConfig, lines: Sequence[str]) -> None:
    text = "".join(line + "\n" for line in lines)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _header(cfg: RunConfig, M: Module) -> dict:
    kind = {Verma: "verma", QuotientVacuum: "quotient-vacuum", AffineVacuum: "affine-vacuum"}[type(M.kind)]
    out = {"algebra": M.spec.describe(), "kind": kind}
    if isinstance(M.kind, Verma):
        out["h"] = format_scalar(M.kind.h)
    return out


def cmd_dims(cfg: RunConfig) -> int:
    M, _ = build_modules(cfg)
    out = _header(cfg, M)
    out["max_degree"] = cfg.max_degree
    out["dimensions"] = [M.graded_dimension(d) for d in range(cfg.max_degree + 1)]
    _emit(cfg, [_dump(out)])
    return EXIT_OK


def cmd_basis(cfg: RunConfig) -> int:
    M, _ = build_modules(cfg)
    out = _header(cfg, M)
    out["basis"] = {str(d): [M.format_monomial(m) for m in M.basis(d)]
                    for d in range(cfg.max_degree + 1)}
    _emit(cfg, [_dump(out)])
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    if not cfg.checks:
        raise ConfigError("verify needs at least one --check")
    for text in cfg.checks:
        name = parse_check(text)[0]
        if name not in CHECKS:
            raise ConfigError(f"unknown check {name!r}; known: {', '.join(sorted(CHECKS))}")
    if cfg.jobs > 1 and len(cfg.checks) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(cfg.checks)),
                                 initializer=_worker_init, initargs=(cfg,)) as pool:
            results = list(pool.map(_worker_run, [cfg] * len(cfg.checks), cfg.checks))
        for status, payload in results:
            if status == "usage":
                raise ConfigError(payload)
        reports = [payload for _, payload in results]
    else:
        ctx = _Context(cfg)
        reports = [run_check(cfg, t, ctx) for t in cfg.checks]
    for rep in reports:
        if rep["verdict"] != VERIFIED:
            print(f"vertexalg: check {rep['spec']} -> {rep['verdict']}", file=sys.stderr)
    _emit(cfg, [_dump(r) for r in reports])
    return exit_code_for([r["verdict"] for r in reports])


def cmd_product(cfg: RunConfig, a_text: str, b_text: str, n: int) -> int:
    _, V = build_modules(cfg)
    a, b = parse_field(V, a_text), parse_field(V, b_text)
    f = a.product(b, n)
    state = f.state()
    out = _header(cfg, V)
    out.update({
        "a": a.expr.text, "b": b.expr.text, "n": n, "field": f.expr.text,
        "state": V.vector_to_json(state), "state_text": V.format_vector(state),
        "weight": f.weight,
    })
    _emit(cfg, [_dump(out)])
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("algebra and window")
    g.add_argument("--config", help="flat key = value file; flags override it")
    g.add_argument("--algebra", choices=("virasoro", "affine"))
    g.add_argument("--c", help="Virasoro central charge, p/q")
    g.add_argument("--h", help="lowest weight of the Verma module, p/q")
    g.add_argument("--kind", choices=("verma", "quotient-vacuum", "affine-vacuum"))
    g.add_argument("--lie", help="builtin Lie algebra: sl2, heisenberg, abelian:<d>")
    g.add_argument("--lie-file", dest="lie_file", help="Lie algebra description file")
    g.add_argument("--level", help="affine level, p/q")
    g.add_argument("--max-degree", dest="max_degree", type=int, help=f"window degree N (<= {MAX_DEGREE_CAP})")
    g.add_argument("--mode-range", dest="mode_range", type=int, help=f"window modes P (<= {MODE_RANGE_CAP})")
    g.add_argument("--output", help="write JSON here instead of stdout")
    g.add_argument("--jobs", type=int, help=f"parallel checks (default ${JOBS_ENV} or 1)")
    g.add_argument("--timings", action="store_true", default=None,
                   help="include wall_time_ms in reports (output is then not byte-stable)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="vertexalg", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("dims", parents=[common], help="graded dimensions 0..N")
    sub.add_parser("basis", parents=[common], help="PBW basis by degree")
    v = sub.add_parser("verify", parents=[common], help="run verification checks")
    v.add_argument("--check", action="append", metavar="NAME[:ARGS]",
                   help=f"repeatable; one of {', '.join(CHECKS)}")
    pr = sub.add_parser("product", parents=[common], help="n-th product of two fields")
    pr.add_argument("a")
    pr.add_argument("b")
    pr.add_argument("n", type=int)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        cfg = build_config(ns)
        if ns.command == "dims":
            return cmd_dims(cfg)
        if ns.command == "basis":
            return cmd_basis(cfg)
        if ns.command == "verify":
            return cmd_verify(cfg)
        return cmd_product(cfg, ns.a, ns.b, ns.n)
    except (ConfigError, FieldSyntaxError, AlgebraSpecError, IncompatibleModule, KeyError) as e:
        print(f"vertexalg: {e}", file=sys.stderr)
        return EXIT_USAGE
    except WindowOverflow as e:
        print(f"vertexalg: window overflow: {e}", file=sys.stderr)
        return EXIT_OVERFLOW


if __name__ == "__main__":
    sys.exit(main())
