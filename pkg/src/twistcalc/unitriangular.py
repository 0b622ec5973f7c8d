"""Upper unitriangular matrices over the rings in :mod:`twistcalc.rings`.

Indices are 1-based throughout to match the usual (i, j) convention.
Only the strict upper triangle is stored; the unit diagonal is implicit.
"""

from __future__ import annotations

import random
from functools import lru_cache

from .rings import RingDescriptor, RingElem, RingError, format_elem, parse_elem


class NotInSubgroup(ValueError):
    pass


@lru_cache(maxsize=None)
def _layout(n: int) -> tuple[dict, tuple]:
    pos = {}
    keys = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            pos[(i, j)] = len(keys)
            keys.append((i, j))
    return pos, tuple(keys)


class UniTriMatrix:
    __slots__ = ("n", "desc", "_e", "_hash")

    def __init__(self, n: int, desc: RingDescriptor, entries=None):
        if n < 2:
            raise ValueError("UT_n needs n >= 2")
        self.n = n
        self.desc = desc
        pos, keys = _layout(n)
        if entries is None:
            self._e = (desc.zero,) * len(keys)
        elif isinstance(entries, dict):
            vals = [desc.zero] * len(keys)
            for (i, j), x in entries.items():
                if (i, j) not in pos:
                    raise IndexError(f"({i}, {j}) is not strictly upper triangular for n={n}")
                if x.desc != desc:
                    raise RingError("entry from a different ring")
                vals[pos[(i, j)]] = x
            self._e = tuple(vals)
        else:
            vals = tuple(entries)
            if len(vals) != len(keys):
                raise ValueError("wrong number of entries")
            self._e = vals
        self._hash = None

    @classmethod
    def identity(cls, n: int, desc: RingDescriptor) -> UniTriMatrix:
        return cls(n, desc)

    def __getitem__(self, ij) -> RingElem:
        i, j = ij
        if i == j:
            return self.desc.one
        if j < i:
            return self.desc.zero
        return self._e[_layout(self.n)[0][(i, j)]]

    def items(self):
        return zip(_layout(self.n)[1], self._e)

    def nonzero(self) -> dict:
        return {ij: x for ij, x in self.items() if x}

    def is_identity(self) -> bool:
        return not any(self._e)

    def _same(self, other: UniTriMatrix):
        if self.n != other.n:
            raise ValueError(f"dimension mismatch {self.n} != {other.n}")
        if self.desc != other.desc:
            raise RingError(f"ring mismatch {self.desc} != {other.desc}")

    def __mul__(self, other: UniTriMatrix) -> UniTriMatrix:
        return mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, UniTriMatrix):
            return NotImplemented
        return self.n == other.n and self.desc == other.desc and self._e == other._e

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self._e))
        return self._hash

    def inv(self) -> UniTriMatrix:
        return inv(self)

    def rows(self) -> list[list[RingElem]]:
        return [[self[i, j] for j in range(1, self.n + 1)] for i in range(1, self.n + 1)]

    def __repr__(self) -> str:
        body = ", ".join(f"({i},{j}): {format_elem(x)}" for (i, j), x in self.nonzero().items())
        return f"UniTriMatrix(n={self.n}, {self.desc}, {{{body}}})"


def transvection(n: int, i: int, j: int, x: RingElem) -> UniTriMatrix:
    if not (1 <= i < j <= n):
        raise IndexError(f"T_({i},{j}) needs 1 <= i < j <= {n}")
    return UniTriMatrix(n, x.desc, {(i, j): x})


def mul(X: UniTriMatrix, Y: UniTriMatrix) -> UniTriMatrix:
    X._same(Y)
    n = X.n
    pos, keys = _layout(n)
    xe, ye = X._e, Y._e
    out = []
    for i, j in keys:
        s = xe[pos[(i, j)]] + ye[pos[(i, j)]]
        for l in range(i + 1, j):
            a = xe[pos[(i, l)]]
            if a:
                b = ye[pos[(l, j)]]
                if b:
                    s = s + a * b
        out.append(s)
    return UniTriMatrix(n, X.desc, out)


def inv(X: UniTriMatrix) -> UniTriMatrix:
    """Back substitution from X Z = I: z_ij = -x_ij - sum_{i<l<j} x_il z_lj."""
    n = X.n
    pos, keys = _layout(n)
    xe = X._e
    z = {}
    for d in range(1, n):
        for i in range(1, n - d + 1):
            j = i + d
            s = -xe[pos[(i, j)]]
            for l in range(i + 1, j):
                a = xe[pos[(i, l)]]
                if a:
                    s = s - a * z[(l, j)]
            z[(i, j)] = s
    return UniTriMatrix(n, X.desc, [z[k] for k in keys])


def commutator(X: UniTriMatrix, Y: UniTriMatrix) -> UniTriMatrix:
    """[X, Y] = X^-1 Y^-1 X Y."""
    return inv(X) * inv(Y) * X * Y


def power(X: UniTriMatrix, e: int) -> UniTriMatrix:
    base = X if e >= 0 else inv(X)
    out = UniTriMatrix.identity(X.n, X.desc)
    e = abs(e)
    while e:
        if e & 1:
            out = out * base
        base = base * base
        e >>= 1
    return out


def central_level(X: UniTriMatrix) -> int:
    """Smallest k with X in Z_k; Z_k kills superdiagonals 1 .. n-1-k."""
    n = X.n
    for s in range(1, n):
        if any(X[i, i + s] for i in range(1, n - s + 1)):
            return n - s
    return 0


def quotient_coords(X: UniTriMatrix, k: int) -> list[RingElem]:
    """Coordinates of X in Z_{k+1}/Z_k, read off superdiagonal n-k-1."""
    n = X.n
    if not 0 <= k <= n - 2:
        raise ValueError(f"layer k={k} out of range for n={n}")
    if central_level(X) > k + 1:
        raise NotInSubgroup(f"matrix is not in Z_{k + 1}")
    s = n - k - 1
    return [X[r, r + s] for r in range(1, k + 2)]


def quotient_rep(v, k: int, n: int) -> UniTriMatrix:
    """Section Z_{k+1}/Z_k -> UT_n placing v on superdiagonal n-k-1."""
    if not 0 <= k <= n - 2:
        raise ValueError(f"layer k={k} out of range for n={n}")
    v = list(v)
    if len(v) != k + 1:
        raise ValueError(f"layer {k} has {k + 1} coordinates, got {len(v)}")
    s = n - k - 1
    return UniTriMatrix(n, v[0].desc, {(r, r + s): x for r, x in enumerate(v, start=1)})


def antitranspose(X: UniTriMatrix) -> UniTriMatrix:
    n = X.n
    return UniTriMatrix(n, X.desc, {(n + 1 - j, n + 1 - i): x for (i, j), x in X.items()})


def flip_sigma(X: UniTriMatrix) -> UniTriMatrix:
    """Reflect in the antidiagonal, then invert."""
    return inv(antitranspose(X))


def random_unitri(n: int, desc: RingDescriptor, rng: random.Random, bound: int = 5,
                  level: int | None = None) -> UniTriMatrix:
    """Random element of Z_level (default: all of UT_n) with small entries."""
    level = n - 1 if level is None else level
    _, keys = _layout(n)
    vals = []
    for i, j in keys:
        if j - i < n - level:
            vals.append(desc.zero)
        else:
            vals.append(random_elem(desc, rng, bound))
    return UniTriMatrix(n, desc, vals)


def random_elem(desc: RingDescriptor, rng: random.Random, bound: int = 5) -> RingElem:
    from fractions import Fraction

    if desc.is_field:
        return desc(Fraction(rng.randint(-bound, bound), rng.randint(1, bound)))
    if desc.rank == 1:
        return desc(rng.randint(-bound, bound))
    return desc(rng.randint(-bound, bound), rng.randint(-bound, bound))


# ------------------------------------------------------------------ JSON


def to_json(X: UniTriMatrix) -> dict:
    return {"n": X.n, "entries": [[i, j, format_elem(x)] for (i, j), x in X.nonzero().items()]}


def from_json(obj: dict, desc: RingDescriptor) -> UniTriMatrix:
    n = int(obj["n"])
    entries = {}
    for i, j, x in obj.get("entries", []):
        entries[(int(i), int(j))] = parse_elem(str(x), desc)
    return UniTriMatrix(n, desc, entries)
