import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from twistcalc.automorphism import NormalFormAuto
from twistcalc.rings import Q, Z, gaussian, quadratic, units
from twistcalc.unitriangular import UniTriMatrix, _layout

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

LATTICE_RINGS = [Z, gaussian(), quadratic(2), quadratic(3), quadratic(-5)]
ALL_RINGS = LATTICE_RINGS + [Q]

small = st.integers(-6, 6)


def elems(R, bound=6):
    if R.is_field:
        return st.builds(lambda p, q: R(Fraction(p, q)), st.integers(-bound, bound), st.integers(1, bound))
    if R.rank == 1:
        return st.integers(-bound, bound).map(R)
    return st.tuples(st.integers(-bound, bound), st.integers(-bound, bound)).map(lambda t: R(*t))


def unitri(R, n, bound=4):
    size = len(_layout(n)[1])
    return st.lists(elems(R, bound), min_size=size, max_size=size).map(lambda v: UniTriMatrix(n, R, v))


def unit_elems(R):
    if R.is_field:
        return st.builds(lambda p, q, s: R(Fraction(s * p, q)), st.integers(1, 5), st.integers(1, 5),
                         st.sampled_from([1, -1]))
    return st.sampled_from(list(units(R, count=6).units))


@st.composite
def normal_forms(draw, rings=LATTICE_RINGS, ns=(3, 4, 5), inner=True, lam=True):
    R = draw(st.sampled_from(rings))
    n = draw(st.sampled_from(ns))
    D = [draw(unit_elems(R)) for _ in range(n)]
    m = draw(st.sampled_from([0, 1]))
    delta = draw(st.sampled_from(["id", "conj"] if R.kind == "Quadratic" else ["id"]))
    A = draw(unitri(R, n, 3)) if inner and draw(st.booleans()) else None
    L = None
    if lam and n >= 3 and draw(st.booleans()):
        if R.is_field:
            L = draw(st.fractions(-5, 5, max_denominator=5))
        else:
            N = R.rank
            L = [[draw(st.integers(-3, 3)) for _ in range(N)] for _ in range(N)]
    return NormalFormAuto(R, D, m=m, delta=delta, inner=A, lam=L)


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[k])
