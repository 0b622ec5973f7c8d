
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form

from twistcalc import lattice
from twistcalc.lattice import (
    INF,
    block_diag,
    det,
    has_fixed_vector,
    identity,
    int_matrix,
    kernel_basis,
    reidemeister_abelian,
    snf,
    solve_integer,
    subgroup_index,
)
from twistcalc.rings import mul_matrix, quadratic


def mats(rmax=5, cmax=5, bound=9):
    return st.tuples(st.integers(1, rmax), st.integers(1, cmax)).flatmap(
        lambda rc: st.lists(st.lists(st.integers(-bound, bound), min_size=rc[1], max_size=rc[1]),
                            min_size=rc[0], max_size=rc[0]))


def squares(nmax=5, bound=9):
    return st.integers(1, nmax).flatmap(
        lambda n: st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n), min_size=n, max_size=n))


def unimodular(n, rng, steps=12):
    P = identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            P[0] = -P[0]
            continue
        P[i] = P[i] + rng.choice([-2, -1, 1, 2]) * P[j]
    return P


def check_snf(M):
    M = int_matrix(M)
    res = snf(M)
    assert (res.U.dot(M).dot(res.V) == res.S).all()
    assert abs(det(res.U)) == 1 and abs(det(res.V)) == 1
    r, c = M.shape
    S = res.S
    off = [S[i, j] for i in range(r) for j in range(c) if i != j]
    assert not any(off)
    f = res.factors
    assert all(s >= 0 for s in f)
    for a, b in zip(f, f[1:]):
        assert (b == 0) if a == 0 else (b % a == 0)
    return res


def test_snf_examples():
    assert snf([[2, 0], [0, 2]]).factors == [2, 2]
    assert snf([[2, 4], [6, 8]]).factors == [2, 4]
    assert snf(identity(3)).factors == [1, 1, 1]


@given(mats())
def test_snf_identities(M):
    check_snf(M)


@given(mats())
def test_snf_matches_sympy(M):
    ours = [s for s in snf(M).factors if s]
    S = smith_normal_form(sympy.Matrix(M), domain=sympy.ZZ)
    theirs = sorted(abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i])
    assert sorted(ours) == theirs


@given(squares(6))
def test_det_matches_sympy(M):
    assert det(M) == sympy.Matrix(M).det()


def test_reidemeister_abelian_examples():
    v = reidemeister_abelian(identity(2))
    assert v.infinite and v.fixed_vector is not None
    assert reidemeister_abelian([[-1]]).value == 2
    assert reidemeister_abelian([[1, 1], [1, 0]]).value == 1
    with pytest.raises(ValueError):
        reidemeister_abelian([[1, 2, 3], [4, 5, 6]])


def test_has_fixed_vector_examples():
    assert has_fixed_vector([[0, 1], [1, 0]])
    assert not has_fixed_vector(-identity(3))
    R2 = quadratic(2)
    M = mul_matrix(R2(1, 1))
    assert M.tolist() == [[1, 2], [1, 1]]
    assert not has_fixed_vector(M)


def test_subgroup_index_examples():
    assert subgroup_index([(2, 0), (0, 2)], 2) == 4
    assert subgroup_index([(1, 0)], 2) == INF
    assert subgroup_index([(2, 4), (6, 8)], 2) == 8
    assert subgroup_index([], 0) == 1
    with pytest.raises(ValueError):
        subgroup_index([(1, 2, 3)], 2)


def test_kernel_basis_examples():
    K = identity(2) - int_matrix([[0, 1], [1, 0]])
    (v,) = kernel_basis(K)
    assert v in ((1, 1), (-1, -1))
    assert kernel_basis(2 * identity(3)) == []


@given(mats())
def test_kernel_vectors_are_killed(M):
    M = int_matrix(M)
    ker = kernel_basis(M)
    for v in ker:
        assert not any(M.dot(int_matrix([v]).T)[:, 0])
    assert len(ker) == M.shape[1] - snf(M).rank


@given(mats(4, 4), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_solve_integer(M, c):
    G = int_matrix(M)
    c = c[:G.shape[1]]
    v = G.dot(int_matrix([c]).T)[:, 0]
    sol = solve_integer(G, v)
    assert sol is not None
    assert list(G.dot(int_matrix([sol]).T)[:, 0]) == list(v)


def test_solve_integer_no_solution():
    assert solve_integer([[2, 0], [0, 2]], (1, 0)) is None
    assert solve_integer([[1, 0], [0, 0]], (0, 1)) is None


# abelian Reidemeister numbers


def _auto_matrix(n, rng):
    # unimodular matrices are automorphisms of Z^n
    return unimodular(n, rng)


def test_block_sum_multiplicative(rng):
    for _ in range(200):
        A = _auto_matrix(rng.randint(1, 3), rng)
        B = _auto_matrix(rng.randint(1, 3), rng)
        a, b = reidemeister_abelian(A).value, reidemeister_abelian(B).value
        ab = reidemeister_abelian(block_diag(A, B)).value
        assert ab == a * b


def test_conjugation_invariance(rng):
    for _ in range(200):
        n = rng.randint(1, 4)
        M = _auto_matrix(n, rng)
        P = unimodular(n, rng)
        Pinv = int_matrix(sympy.Matrix(P.tolist()).inv().tolist())
        assert reidemeister_abelian(P.dot(M).dot(Pinv)).value == reidemeister_abelian(M).value


@given(squares(4, 4))
def test_index_equals_det(M):
    """|det(I - M)| is the product of the invariant factors of I - M."""
    K = identity(len(M)) - int_matrix(M)
    f = snf(K).factors
    prod = 1
    for s in f:
        prod *= s
    assert prod == abs(det(K))


def test_rational_helpers():
    from fractions import Fraction as F
    A = [[F(1), F(2)], [F(3), F(4)]]
    x = lattice.solve_rational(A, [F(5), F(6)])
    assert [sum(a * b for a, b in zip(row, x)) for row in A] == [5, 6]
    assert lattice.rational_kernel_vector(A) is None
    v = lattice.rational_kernel_vector([[F(1), F(2)], [F(2), F(4)]])
    assert v is not None and v[0] + 2 * v[1] == 0 and any(v)
    assert lattice.rational_rank([[1, 2], [2, 4]]) == 1
