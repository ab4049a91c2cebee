import sys
from fractions import Fraction

import pytest

from vertexalg import (
    AffineVacuum,
    QuotientVacuum,
    Verma,
    builtin_abelian,
    builtin_sl2,
    generating_field,
    make_affine,
    make_module,
    make_virasoro,
)


@pytest.fixture(scope="session")
def vir():
    """M-bar(1/2, 0) with room for intermediate degrees."""
    return make_module(make_virasoro(Fraction(1, 2)), QuotientVacuum(), 40)


@pytest.fixture(scope="session")
def vir0():
    return make_module(make_virasoro(0), QuotientVacuum(), 40)


@pytest.fixture(scope="session")
def verma0():
    return make_module(make_virasoro(Fraction(1, 2)), Verma(0), 30)


@pytest.fixture(scope="session")
def sl2():
    return make_module(make_affine(builtin_sl2(), 1), AffineVacuum(), 30)


@pytest.fixture(scope="session")
def heis():
    return make_module(make_affine(builtin_abelian(1), 1), AffineVacuum(), 30)


@pytest.fixture(scope="session")
def L(vir):
    return generating_field(vir, "L")


@pytest.fixture(scope="session")
def currents(sl2):
    return {g: generating_field(sl2, g) for g in sl2.generators}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
