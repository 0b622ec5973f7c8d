"""Hot integer kernels, compiled with numba when available.

Set TWISTCALC_NO_JIT=1 to force the pure-numpy implementations. Both
paths return identical results; ``benchmarks/bench_kernels.py`` compares
their speed.

Kernels:
  batch_det        determinants of a stack of small int64 matrices
  twisted_labels   twisted-conjugacy class labels on a multiplication table
  ut_mul_table     multiplication table of UT_n(Z/mZ)
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_JIT = numba is not None and os.environ.get("TWISTCALC_NO_JIT", "") in ("", "0")

# Bareiss intermediates are products of two minors; keep minors below 2^30.
_HADAMARD_LIMIT = 30.0


def _njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ------------------------------------------------------------ determinants


def _batch_det_numpy(A: np.ndarray) -> np.ndarray:
    A = np.array(A, dtype=np.int64, copy=True)
    B, n, _ = A.shape
    if n == 0:
        return np.ones(B, dtype=np.int64)
    sign = np.ones(B, dtype=np.int64)
    prev = np.ones(B, dtype=np.int64)
    dead = np.zeros(B, dtype=bool)
    idx = np.arange(B)
    for k in range(n - 1):
        nz = A[:, k:, k] != 0
        has = nz.any(axis=1)
        dead |= ~has
        p = np.argmax(nz, axis=1) + k
        swap = has & (p != k)
        if swap.any():
            rows_k = A[idx, k].copy()
            A[idx, k] = A[idx, p]
            A[idx, p] = rows_k
            sign[swap] = -sign[swap]
        pk = np.where(has, A[:, k, k], 1)
        sub = A[:, k + 1:, k + 1:] * pk[:, None, None] - A[:, k + 1:, k:k + 1] * A[:, k:k + 1, k + 1:]
        A[:, k + 1:, k + 1:] = sub // prev[:, None, None]
        prev = pk
    out = sign * A[:, n - 1, n - 1]
    out[dead] = 0
    return out


def _batch_det_loops(A):
    B, n, _ = A.shape
    out = np.zeros(B, dtype=np.int64)
    a = np.empty((n, n), dtype=np.int64)
    for b in range(B):
        for i in range(n):
            for j in range(n):
                a[i, j] = A[b, i, j]
        sign = 1
        prev = 1
        singular = False
        for k in range(n - 1):
            if a[k, k] == 0:
                piv = -1
                for i in range(k + 1, n):
                    if a[i, k] != 0:
                        piv = i
                        break
                if piv < 0:
                    singular = True
                    break
                for j in range(n):
                    t = a[k, j]
                    a[k, j] = a[piv, j]
                    a[piv, j] = t
                sign = -sign
            pk = a[k, k]
            for i in range(k + 1, n):
                aik = a[i, k]
                for j in range(k + 1, n):
                    a[i, j] = (a[i, j] * pk - aik * a[k, j]) // prev
            prev = pk
        if singular:
            out[b] = 0
        else:
            out[b] = sign * a[n - 1, n - 1]
    return out


_batch_det_jit = _njit(_batch_det_loops)


def hadamard_log2(A: np.ndarray) -> float:
    """log2 of the largest Hadamard bound over the stack."""
    if A.size == 0:
        return 0.0
    norms = np.sqrt((A.astype(np.float64) ** 2).sum(axis=2))
    with np.errstate(divide="ignore"):
        logs = np.log2(np.maximum(norms, 1.0)).sum(axis=1)
    return float(logs.max())


def batch_det(A: np.ndarray, jit: bool | None = None) -> np.ndarray:
    """Exact determinants of an int64 stack (B, d, d).

    Falls back to Python integers for stacks whose Hadamard bound could
    overflow int64 during elimination; the result then has dtype object.
    """
    A = np.asarray(A)
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise ValueError("expected a stack of square matrices")
    if A.dtype == object or hadamard_log2(A) > _HADAMARD_LIMIT:
        from .lattice import det

        return np.array([det(m) for m in A.astype(object)], dtype=object)
    A = A.astype(np.int64)
    use = USE_JIT if jit is None else (jit and numba is not None)
    if use:
        return _batch_det_jit(A)
    return _batch_det_numpy(A)


# ---------------------------------------------------- twisted class labels


def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


_find_jit = _njit(_find)


def _make_labels_loops(find):
    def labels(mul, inv, phi, gens):
        s = mul.shape[0]
        parent = np.arange(s)
        for g in gens:
            tail = inv[phi[g]]
            for x in range(s):
                y = mul[mul[g, x], tail]
                rx = find(parent, x)
                ry = find(parent, y)
                # smaller index wins, so roots are class minima
                if rx < ry:
                    parent[ry] = rx
                elif ry < rx:
                    parent[rx] = ry
        out = np.empty(s, dtype=np.int64)
        for x in range(s):
            out[x] = find(parent, x)
        return out

    return labels


_labels_py = _make_labels_loops(_find)
_labels_jit = _njit(_make_labels_loops(_find_jit)) if numba is not None else _labels_py


def _labels_numpy(mul, inv, phi, gens):
    s = mul.shape[0]
    gens = np.asarray(gens, dtype=np.int64)
    src = np.tile(np.arange(s), len(gens))
    dst = mul[mul[gens][:, :], inv[phi[gens]][:, None]].reshape(-1)
    lab = np.arange(s)
    while True:
        new = lab.copy()
        np.minimum.at(new, src, lab[dst])
        np.minimum.at(new, dst, lab[src])
        while True:
            jumped = new[new]
            if np.array_equal(jumped, new):
                break
            new = jumped
        if np.array_equal(new, lab):
            return lab
        lab = new


def twisted_labels(mul, inv, phi, gens, jit: bool | None = None) -> np.ndarray:
    """Label x by the least element of its class under x ~ g x phi(g)^-1.

    ``mul`` is the (s, s) table, ``inv`` and ``phi`` are index arrays,
    ``gens`` generates the group.
    """
    mul = np.ascontiguousarray(mul, dtype=np.int64)
    inv = np.ascontiguousarray(inv, dtype=np.int64)
    phi = np.ascontiguousarray(phi, dtype=np.int64)
    gens = np.ascontiguousarray(gens, dtype=np.int64)
    use = USE_JIT if jit is None else (jit and numba is not None)
    if use:
        return _labels_jit(mul, inv, phi, gens)
    return _labels_numpy(mul, inv, phi, gens)


# ----------------------------------------------------- UT_n(Z/m) tables


def ut_positions(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def ut_decode(codes: np.ndarray, n: int, m: int) -> np.ndarray:
    """Full (len, n, n) matrices from base-m codes of the strict upper part."""
    codes = np.asarray(codes, dtype=np.int64)
    pos = ut_positions(n)
    F = np.zeros((len(codes), n, n), dtype=np.int64)
    F[:, range(n), range(n)] = 1
    rest = codes.copy()
    for i, j in pos:
        F[:, i, j] = rest % m
        rest //= m
    return F


def ut_encode(F: np.ndarray, n: int, m: int) -> np.ndarray:
    pos = ut_positions(n)
    w = m ** np.arange(len(pos), dtype=np.int64)
    digits = np.stack([F[..., i, j] % m for i, j in pos], axis=-1)
    return (digits * w).sum(axis=-1)


def _ut_table_numpy(n: int, m: int) -> np.ndarray:
    P = n * (n - 1) // 2
    s = m**P
    F = ut_decode(np.arange(s), n, m)
    table = np.empty((s, s), dtype=np.int64)
    chunk = max(1, int(4e6 // max(1, s * n * n)))
    for a0 in range(0, s, chunk):
        prod = np.matmul(F[a0:a0 + chunk, None], F[None, :]) % m
        table[a0:a0 + chunk] = ut_encode(prod, n, m)
    return table


def _ut_table_loops(n, m, F, w, pi, pj):
    s = F.shape[0]
    P = pi.shape[0]
    table = np.empty((s, s), dtype=np.int64)
    for a in range(s):
        for b in range(s):
            code = 0
            for p in range(P):
                i = pi[p]
                j = pj[p]
                acc = F[a, i, j] + F[b, i, j]
                for l in range(i + 1, j):
                    acc += F[a, i, l] * F[b, l, j]
                code += (acc % m) * w[p]
            table[a, b] = code
    return table


_ut_table_jit = _njit(_ut_table_loops)


def ut_mul_table(n: int, m: int, jit: bool | None = None) -> np.ndarray:
    use = USE_JIT if jit is None else (jit and numba is not None)
    if not use:
        return _ut_table_numpy(n, m)
    pos = ut_positions(n)
    P = len(pos)
    F = ut_decode(np.arange(m**P), n, m)
    w = m ** np.arange(P, dtype=np.int64)
    pi = np.array([p[0] for p in pos], dtype=np.int64)
    pj = np.array([p[1] for p in pos], dtype=np.int64)
    return _ut_table_jit(n, m, F, w, pi, pj)


def table_size(n: int, m: int) -> int:
    return m ** (n * (n - 1) // 2)


def log2_size(n: int, m: int) -> float:
    return n * (n - 1) / 2 * math.log2(m)
