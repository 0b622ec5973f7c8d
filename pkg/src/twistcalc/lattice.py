"""Integer matrix algebra: Smith normal form, indices and fixed vectors.

Matrices are numpy arrays of dtype=object holding Python ints, so nothing
ever overflows. The int64 fast paths live in :mod:`twistcalc._accel`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

import numpy as np

INF = float("inf")


def int_matrix(rows) -> np.ndarray:
    """Exact integer matrix (object dtype) from nested sequences or an array."""
    arr = np.asarray(rows, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"non-integer entry {x}")
            x = x.numerator
        out[idx] = int(x)
    return out


def identity(n: int) -> np.ndarray:
    return int_matrix([[int(i == j) for j in range(n)] for i in range(n)]) if n else np.zeros((0, 0), dtype=object)


def block_diag(*blocks) -> np.ndarray:
    r = sum(b.shape[0] for b in blocks)
    c = sum(b.shape[1] for b in blocks)
    out = int_matrix(np.zeros((r, c), dtype=int))
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


def det(M) -> int | Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Works for integer and Fraction entries; integer input gives an int.
    """
    a = [list(row) for row in np.asarray(M, dtype=object)]
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    if any(isinstance(x, Fraction) for row in a for x in row):
        return _det_fraction(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pk - aik * row_k[j]) // prev
        prev = pk
    return sign * a[n - 1][n - 1]


def _det_fraction(a) -> Fraction:
    n = len(a)
    a = [[Fraction(x) for x in row] for row in a]
    out = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            out = -out
        out *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return out


# ------------------------------------------------------------------- SNF


@dataclass
class SnfResult:
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    factors: list[int] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return sum(1 for s in self.factors if s != 0)


def _swap_rows(a, i, j):
    a[i], a[j] = a[j], a[i]


def _swap_cols(a, i, j):
    for row in a:
        row[i], row[j] = row[j], row[i]


def snf(M) -> SnfResult:
    """Smith normal form U M V = S with U, V unimodular.

    Pivots on the smallest nonzero absolute value of the remaining block.
    """
    M = int_matrix(M)
    r, c = M.shape
    a = [list(row) for row in M]
    u = [[int(i == j) for j in range(r)] for i in range(r)]
    v = [[int(i == j) for j in range(c)] for i in range(c)]

    for t in range(min(r, c)):
        while True:
            piv = None
            for i in range(t, r):
                for j in range(t, c):
                    x = a[i][j]
                    if x and (piv is None or abs(x) < abs(a[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                break
            pi, pj = piv
            if pi != t:
                _swap_rows(a, t, pi)
                _swap_rows(u, t, pi)
            if pj != t:
                _swap_cols(a, t, pj)
                _swap_cols(v, t, pj)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, r):
                q = a[i][t] // p
                if q:
                    ai, at = a[i], a[t]
                    for j in range(t, c):
                        ai[j] -= q * at[j]
                    ui, ut = u[i], u[t]
                    for j in range(r):
                        ui[j] -= q * ut[j]
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, c):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                    for row in v:
                        row[j] -= q * row[t]
                if a[t][j]:
                    dirty = True
            if dirty:
                continue
            # divisibility: fold an offending row into row t and go again
            bad = next((i for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % p), None)
            if bad is None:
                break
            at, ab = a[t], a[bad]
            for j in range(t, c):
                at[j] += ab[j]
            ut, ub = u[t], u[bad]
            for j in range(r):
                ut[j] += ub[j]
        if t < r and t < c and a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    factors = [a[i][i] for i in range(min(r, c))]
    return SnfResult(int_matrix(u) if r else np.zeros((0, 0), dtype=object),
                     int_matrix(a) if r and c else np.zeros((r, c), dtype=object),
                     int_matrix(v) if c else np.zeros((0, 0), dtype=object),
                     factors)


# ---------------------------------------------------- Reidemeister layers


@dataclass(frozen=True)
class AbelianValue:
    """R of an automorphism of Z^d: a positive int, or INF with a fixed vector."""

    value: int | float
    fixed_vector: tuple[int, ...] | None = None

    @property
    def infinite(self) -> bool:
        return self.value == INF


def reidemeister_abelian(M) -> AbelianValue:
    """|det(I - M)|, or infinity when I - M is singular."""
    M = int_matrix(M)
    n, c = M.shape
    if n != c:
        raise ValueError("automorphism matrix must be square")
    K = identity(n) - M
    dk = det(K)
    if dk == 0:
        kern = kernel_basis(K)
        return AbelianValue(INF, tuple(int(x) for x in kern[0]))
    return AbelianValue(abs(dk))


def has_fixed_vector(M) -> bool:
    """True iff det(I - M) = 0; accepts int or Fraction entries."""
    M = np.asarray(M, dtype=object)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("square matrix required")
    return det(identity(n) - M) == 0


def subgroup_index(generators, d: int) -> int | float:
    """Index in Z^d of the subgroup spanned by the given vectors."""
    gens = [list(g) for g in generators]
    if any(len(g) != d for g in gens):
        raise ValueError(f"generators must have length {d}")
    if not gens:
        return INF if d else 1
    G = int_matrix(gens).T
    res = snf(G)
    if res.rank < d:
        return INF
    return prod(res.factors[:d])


def kernel_basis(M) -> list[tuple[int, ...]]:
    """Z-basis of {v : M v = 0}: trailing columns of V past the rank."""
    M = int_matrix(M)
    res = snf(M)
    c = M.shape[1]
    return [tuple(int(x) for x in res.V[:, j]) for j in range(res.rank, c)]


def solve_integer(G, v) -> tuple[int, ...] | None:
    """Some integer c with G c = v, or None if there is none."""
    G = int_matrix(G)
    r, c = G.shape
    res = snf(G)
    w = res.U.dot(int_matrix([list(v)]).T)[:, 0] if r else []
    sol = [0] * c
    for i in range(r):
        s = res.factors[i] if i < len(res.factors) else 0
        if s == 0:
            if w[i] != 0:
                return None
        else:
            if w[i] % s:
                return None
            sol[i] = w[i] // s
    x = res.V.dot(int_matrix([sol]).T)[:, 0] if c else []
    return tuple(int(t) for t in x)


def rational_rank(M) -> int:
    """Rank over Q of a matrix with int or Fraction entries."""
    a = [[Fraction(x) for x in row] for row in np.asarray(M, dtype=object)]
    rank = 0
    rows = len(a)
    cols = len(a[0]) if rows else 0
    for col in range(cols):
        piv = next((i for i in range(rank, rows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(rows):
            if i != rank and a[i][col] != 0:
                f = a[i][col] / a[rank][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def solve_rational(A, b) -> list[Fraction]:
    """Unique solution of A x = b over Q; A must be invertible."""
    n = len(A)
    a = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(A, b)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [row[n] for row in a]


def rational_kernel_vector(A) -> list[Fraction] | None:
    """A nonzero vector in the kernel of A over Q, if one exists."""
    a = [[Fraction(x) for x in row] for row in A]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for col in range(cols):
        piv = next((i for i in range(r, rows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][col]
        a[r] = [x / p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    if not free:
        return None
    f = free[0]
    vec = [Fraction(0)] * cols
    vec[f] = Fraction(1)
    for i, pc in enumerate(pivots):
        vec[pc] = -a[i][f]
    return vec
