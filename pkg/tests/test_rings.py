from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twistcalc.rings import (
    CapExceeded,
    NotAUnit,
    Q,
    RingError,
    Z,
    apply_delta,
    format_elem,
    from_lattice,
    fundamental_unit,
    gaussian,
    inverse,
    mul_matrix,
    parse_elem,
    parse_ring,
    quadratic,
    ring_automorphisms,
    to_lattice,
    units,
)

from .conftest import ALL_RINGS, LATTICE_RINGS, elems

R2 = quadratic(2)
G = gaussian()


def test_spec_arith_examples():
    assert R2(1, 1) * R2(-1, 1) == 1
    assert G.omega * G.omega == -1
    assert Z(2) + Z(3) == 5


def test_inverse_examples():
    assert inverse(R2(1, 1)) == R2(-1, 1)
    with pytest.raises(NotAUnit):
        inverse(Z(2))
    assert inverse(Q(2)) == Q(Fraction(1, 2))
    with pytest.raises(ZeroDivisionError):
        inverse(Z(0))


def test_mixed_descriptors_refuse():
    with pytest.raises(RingError):
        Z(1) + G(1)
    with pytest.raises(RingError):
        R2(1) * quadratic(3)(1)


@pytest.mark.parametrize("d", [0, 1, 4, 8, -4, 12])
def test_quadratic_rejects_bad_d(d):
    with pytest.raises(RingError):
        quadratic(d)


def test_units():
    assert list(units(Z)) == [Z(1), Z(-1)] and units(Z).finite
    assert set(units(G)) == {G(1), G(-1), G(0, 1), G(0, -1)} and units(G).finite
    assert set(units(quadratic(-5))) == {quadratic(-5)(1), quadratic(-5)(-1)}
    u = units(R2, 3)
    assert not u.finite and R2(1, 1) in set(units(R2, 6)) and len(u) == 3
    assert not units(Q).finite


@pytest.mark.parametrize("d", [2, 3, 5, 6, 7, 13, 61])
def test_fundamental_unit_minimal(d):
    R = quadratic(d)
    u = fundamental_unit(R)
    assert abs(u.norm()) == 1 and u.a > 0 and u.b > 0
    # nothing smaller on the w-coordinate
    for y in range(1, u.b):
        for s in (d * y * y - 1, d * y * y + 1):
            x = int(round(s ** 0.5))
            assert not (x > 0 and x * x == s)


def test_fundamental_unit_cap():
    with pytest.raises(CapExceeded):
        fundamental_unit(quadratic(61), cap=100)


def test_ring_automorphisms():
    assert ring_automorphisms(Q) == ("id",)
    assert set(ring_automorphisms(G)) == {"id", "conj"}
    x = G(3, -2)
    assert apply_delta("conj", apply_delta("conj", x)) == x


def test_lattice_examples():
    assert to_lattice(R2(3, -2)) == (3, -2)
    assert from_lattice((0, 1), R2) == R2.omega
    with pytest.raises(RingError):
        to_lattice(Q(1))


def test_mul_matrix_examples():
    assert mul_matrix(R2(3, -2)).tolist() == [[3, -4], [-2, 3]]
    assert mul_matrix(G(1)).tolist() == [[1, 0], [0, 1]]
    assert mul_matrix(Z(-1)).tolist() == [[-1]]


@pytest.mark.parametrize("text,ring", [("Z", Z), ("Q", Q), ("Z[i]", G), ("Z[isqrt,1]", G),
                                       ("Z[sqrt,2]", R2), ("Z[isqrt,5]", quadratic(-5))])
def test_parse_ring(text, ring):
    assert parse_ring(text) == ring
    assert parse_ring(str(ring)) == ring


@pytest.mark.parametrize("bad", ["R", "Z[sqrt,1]", "Z[sqrt,4]", "Z[isqrt,0]", "Z[cbrt,2]"])
def test_parse_ring_rejects(bad):
    with pytest.raises(RingError):
        parse_ring(bad)


@given(st.sampled_from(ALL_RINGS).flatmap(lambda R: elems(R, 50)))
def test_format_parse_round_trip(x):
    assert parse_elem(format_elem(x), x.desc) == x


# ring axioms and structure on samples


@given(st.sampled_from(ALL_RINGS).flatmap(lambda R: st.tuples(elems(R), elems(R), elems(R))))
def test_ring_axioms(t):
    x, y, z = t
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert x + (-x) == 0
    if x and y:
        assert x * y


@given(st.sampled_from(LATTICE_RINGS + [Q]).flatmap(lambda R: st.sampled_from(list(units(R, 8).units) or [R(3)])))
def test_units_invert(u):
    assert u * inverse(u) == 1


@given(st.sampled_from(LATTICE_RINGS).flatmap(lambda R: st.tuples(elems(R), elems(R))))
def test_regular_representation_multiplicative(t):
    a, b = t
    assert (mul_matrix(a).dot(mul_matrix(b)) == mul_matrix(a * b)).all()


@given(st.sampled_from([G, R2, quadratic(-5)]).flatmap(lambda R: st.tuples(elems(R), elems(R))))
def test_conj_is_involutive_ring_automorphism(t):
    x, y = t
    c = lambda v: apply_delta("conj", v)
    assert c(x + y) == c(x) + c(y)
    assert c(x * y) == c(x) * c(y)
    assert c(c(x)) == x


@given(st.sampled_from(LATTICE_RINGS).flatmap(
    lambda R: st.lists(st.integers(-100, 100), min_size=R.rank, max_size=R.rank).map(lambda v: (R, v))))
def test_lattice_round_trip(t):
    R, v = t
    assert list(to_lattice(from_lattice(v, R))) == v


@given(st.sampled_from(LATTICE_RINGS).flatmap(lambda R: st.tuples(elems(R), elems(R), st.sampled_from(["id", "conj"]))))
def test_mul_matrix_columns(t):
    c, x, delta = t
    if delta == "conj" and c.desc.kind != "Quadratic":
        delta = "id"
    M = mul_matrix(c, delta)
    got = M.dot(np.array(to_lattice(x), dtype=object))
    assert tuple(got) == to_lattice(c * apply_delta(delta, x))
