from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twistcalc import field_solver as fs
from twistcalc import lattice
from twistcalc.automorphism import NormalFormAuto, closed_form_action
from twistcalc.lattice import INF
from twistcalc.rings import Q, RingError, Z
from twistcalc.unitriangular import UniTriMatrix, central_level, inv, random_unitri, transvection

from .conftest import normal_forms, unitri


def diag(*xs):
    return tuple(Q(F(x)) for x in xs)


def test_classify_examples():
    assert fs.classify(NormalFormAuto(Q, diag(1, 1, 1))).value == INF
    assert fs.classify(NormalFormAuto(Q, diag(1, 2, 4))).value == 1
    c = fs.classify(NormalFormAuto(Q, diag(1, 2, 1)))
    assert c.value == INF and c.singular_layer == 0 and c.fixed_vector == [1]


def test_classify_refuses_lattice_rings():
    with pytest.raises(RingError):
        fs.classify(NormalFormAuto(Z, (Z(1),) * 3))


def test_solve_examples():
    phi = NormalFormAuto(Q, diag(1, 2, 4))
    I = UniTriMatrix.identity(3, Q)
    assert fs.solve_twisted(phi, I).is_identity()
    Zm = fs.solve_twisted(phi, transvection(3, 1, 3, Q(1)))
    assert Zm == transvection(3, 1, 3, Q(F(4, 3)))
    assert Zm * inv(phi(Zm)) == transvection(3, 1, 3, Q(1))


def test_solve_refuses_singular():
    with pytest.raises(fs.SingularLayer) as e:
        fs.solve_twisted(NormalFormAuto(Q, diag(1, 2, 1)), transvection(3, 1, 2, Q(1)))
    assert e.value.layer == 0


def test_solve_random_instances(rng):
    for _ in range(100):
        n = rng.randint(3, 5)
        D = [Q(F(rng.choice([1, -1]) * rng.randint(1, 5), rng.randint(1, 5))) for _ in range(n)]
        phi = NormalFormAuto(Q, D, m=rng.randint(0, 1), lam=F(rng.randint(-3, 3), rng.randint(1, 3)),
                             inner=random_unitri(n, Q, rng, bound=3))
        if fs.classify(phi).value != 1:
            continue
        X = random_unitri(n, Q, rng)
        Zm = fs.solve_twisted(phi, X)
        assert Zm * inv(phi(Zm)) == X


def test_center_examples():
    phi = NormalFormAuto(Q, diag(1, 2, 4, 8))
    X = transvection(4, 1, 4, Q(7))
    Y, W = fs.conjugate_into_center(phi, X)
    assert Y == X and W.is_identity()
    with pytest.raises(fs.SingularLayer):
        fs.conjugate_into_center(NormalFormAuto(Q, diag(1, 1, 1, 1)), X)


def test_center_random(rng):
    phi = NormalFormAuto(Q, diag(1, 2, 4, 8))
    for _ in range(30):
        X = random_unitri(4, Q, rng)
        Y, W = fs.conjugate_into_center(phi, X)
        assert central_level(Y) <= 1
        assert inv(W) * X * phi(W) == Y


def test_center_layer_zero_unconstrained(rng):
    # d_1 = d_n makes the centre layer singular; the upper layers are not
    phi = NormalFormAuto(Q, diag(1, 2, 3, 1))
    assert fs.classify(phi).singular_layer == 0
    X = random_unitri(4, Q, rng)
    Y, W = fs.conjugate_into_center(phi, X)
    assert central_level(Y) <= 1


@given(normal_forms(rings=[Q], inner=False, lam=False), st.data())
def test_classify_invariant_under_inner_and_lambda(phi, data):
    base = fs.classify(phi).value
    A = data.draw(unitri(Q, phi.n, 3))
    c = data.draw(st.fractions(-4, 4, max_denominator=4))
    assert fs.classify(phi.with_(inner=A, lam=c)).value == base


@given(normal_forms(rings=[Q]))
def test_dichotomy_and_closed_form_agreement(phi):
    v = fs.classify(phi).value
    assert v in (1, INF)
    singular = any(lattice.has_fixed_vector(closed_form_action(phi, k).matrix) for k in range(phi.n - 1))
    assert (v == INF) == singular


def test_dimension_mismatch():
    phi = NormalFormAuto(Q, diag(1, 2, 4))
    with pytest.raises(ValueError):
        fs.solve_twisted(phi, transvection(4, 1, 2, Q(1)))
