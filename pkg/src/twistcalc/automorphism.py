"""Automorphisms of UT_n(R) and their actions on central-series layers.

A :class:`NormalFormAuto` is the composite

    X -> A * Lam(sigma^m(D * delta(X) * D^-1)) * A^-1

with Lam(Y) = Y * T_{1,n}(lam(y_12 + y_23 + ... + y_{n-1,n})). For n = 3
over Z or Q the monomial normal forms miss the GL_2-type automorphisms of
the Heisenberg group, which :class:`HeisenbergAuto` supplies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import lattice
from .rings import (
    INTEGERS,
    RATIONALS,
    RingDescriptor,
    RingElem,
    RingError,
    apply_delta,
    basis,
    compose_delta,
    from_lattice,
    inverse,
    mul_matrix,
    parse_elem,
    to_lattice,
)
from .unitriangular import (
    UniTriMatrix,
    flip_sigma,
    from_json as matrix_from_json,
    inv,
    quotient_coords,
    quotient_rep,
    to_json as matrix_to_json,
    transvection,
)


class AutomorphismError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NormalFormAuto:
    ring: RingDescriptor
    D: tuple[RingElem, ...]
    m: int = 0
    delta: str = "id"
    inner: UniTriMatrix | None = None
    lam: object = None  # N x N int matrix on the lattice, or a Fraction over Q

    def __post_init__(self):
        object.__setattr__(self, "D", tuple(self.D))
        if len(self.D) < 2:
            raise AutomorphismError("need n >= 2 diagonal entries")
        if self.m not in (0, 1):
            raise AutomorphismError("flip exponent m must be 0 or 1")
        for d in self.D:
            if d.desc != self.ring:
                raise RingError("diagonal entry from another ring")
            if not d.is_unit():
                raise AutomorphismError(f"diagonal entry {d} is not a unit")
        if self.delta not in ("id", "conj"):
            raise AutomorphismError(f"unknown ring automorphism {self.delta!r}")
        if self.delta == "conj" and self.ring.kind != "Quadratic":
            raise AutomorphismError("conj needs a quadratic ring")
        if self.inner is not None and (self.inner.n != self.n or self.inner.desc != self.ring):
            raise AutomorphismError("inner matrix does not match n / ring")
        if self.lam is not None:
            if self.n < 3:
                raise AutomorphismError("central automorphisms need n >= 3")
            if self.ring.is_field:
                object.__setattr__(self, "lam", Fraction(self.lam))
            else:
                L = lattice.int_matrix(self.lam)
                N = self.ring.rank
                if L.shape != (N, N):
                    raise AutomorphismError(f"lambda must be {N}x{N}")
                object.__setattr__(self, "lam", L)
        object.__setattr__(self, "_Dinv", tuple(inverse(d) for d in self.D))

    @property
    def n(self) -> int:
        return len(self.D)

    def lam_of(self, x: RingElem) -> RingElem:
        if self.lam is None:
            return self.ring.zero
        if self.ring.is_field:
            return self.ring(self.lam * x.a)
        return from_lattice(self.lam.dot(lattice.int_matrix([to_lattice(x)]).T)[:, 0], self.ring)

    def __call__(self, X: UniTriMatrix) -> UniTriMatrix:
        return apply(self, X)

    def with_(self, **kw) -> NormalFormAuto:
        args = dict(ring=self.ring, D=self.D, m=self.m, delta=self.delta, inner=self.inner, lam=self.lam)
        args.update(kw)
        return NormalFormAuto(**args)

    def __repr__(self):
        D = ",".join(str(d) for d in self.D)
        extra = ""
        if self.inner is not None:
            extra += ", inner"
        if self.lam is not None:
            extra += ", lam"
        return f"NormalFormAuto({self.ring}, D=[{D}], m={self.m}, delta={self.delta}{extra})"


@dataclass(frozen=True, eq=False)
class HeisenbergAuto:
    """Automorphism of UT_3(R), R in {Z, Q}, acting as M on the abelianization."""

    ring: RingDescriptor
    M: tuple[tuple, tuple]
    delta: str = "id"

    def __post_init__(self):
        if self.ring.kind not in (INTEGERS, RATIONALS):
            raise AutomorphismError("Heisenberg automorphisms are supported over Z and Q only")
        if self.delta != "id":
            raise AutomorphismError("Z and Q have no nontrivial ring automorphisms")
        conv = Fraction if self.ring.is_field else int
        M = tuple(tuple(conv(x) for x in row) for row in self.M)
        if len(M) != 2 or any(len(r) != 2 for r in M):
            raise AutomorphismError("M must be 2x2")
        object.__setattr__(self, "M", M)
        dt = self.det
        if dt == 0 or (not self.ring.is_field and dt not in (1, -1)):
            raise AutomorphismError(f"det(M) = {dt} is not a unit")

    @property
    def n(self) -> int:
        return 3

    @property
    def det(self):
        (p, q), (r, s) = self.M
        return p * s - q * r

    def __call__(self, X: UniTriMatrix) -> UniTriMatrix:
        return apply_heisenberg(self, X)


@dataclass(frozen=True)
class Pointwise:
    """Any map UT_n(R) -> UT_n(R) given as a callable, e.g. a composite."""

    ring: RingDescriptor
    n: int
    fn: Callable[[UniTriMatrix], UniTriMatrix]

    def __call__(self, X):
        return self.fn(X)


def compose(f, g) -> Pointwise:
    """f o g (apply g first)."""
    if f.n != g.n or f.ring != g.ring:
        raise AutomorphismError("cannot compose maps on different groups")
    return Pointwise(f.ring, f.n, lambda X: f(g(X)))


@dataclass(frozen=True)
class QuotientAction:
    k: int
    matrix: np.ndarray


# ------------------------------------------------------------- applying


def _check_matrix(phi, X: UniTriMatrix):
    if X.n != phi.n:
        raise AutomorphismError(f"matrix has n={X.n}, automorphism has n={phi.n}")
    if X.desc != phi.ring:
        raise RingError("matrix over a different ring")


def apply(phi: NormalFormAuto, X: UniTriMatrix) -> UniTriMatrix:
    _check_matrix(phi, X)
    n, D, Dinv = phi.n, phi.D, phi._Dinv
    vals = {}
    for (i, j), x in X.items():
        if x:
            vals[(i, j)] = D[i - 1] * apply_delta(phi.delta, x) * Dinv[j - 1]
    Y = UniTriMatrix(n, phi.ring, vals)
    if phi.m:
        Y = flip_sigma(Y)
    if phi.lam is not None:
        s = phi.ring.zero
        for i in range(1, n):
            s = s + Y[i, i + 1]
        c = phi.lam_of(s)
        if c:
            Y = Y * transvection(n, 1, n, c)
    if phi.inner is not None:
        Y = phi.inner * Y * inv(phi.inner)
    return Y


def _half_binom(x):
    """x(x - 1)/2 for an int or Fraction."""
    if isinstance(x, Fraction):
        return x * (x - 1) / 2
    return x * (x - 1) // 2


def apply_heisenberg(psi: HeisenbergAuto, X: UniTriMatrix) -> UniTriMatrix:
    if X.n != 3:
        raise AutomorphismError("Heisenberg automorphisms act on UT_3 only")
    if X.desc != psi.ring:
        raise RingError("matrix over a different ring")
    R = psi.ring
    (p, q), (r, s) = psi.M
    a, b, c = X[1, 2].a, X[2, 3].a, X[1, 3].a
    # q(a, b) makes the map multiplicative: its polarization is the
    # cross term (pa + qb)(ra' + sb') - det * ab'
    corr = p * r * _half_binom(a) + q * r * a * b + q * s * _half_binom(b)
    return UniTriMatrix(3, R, {
        (1, 2): R(p * a + q * b),
        (2, 3): R(r * a + s * b),
        (1, 3): R(psi.det * c + corr),
    })


def square_flip(phi: NormalFormAuto) -> NormalFormAuto:
    """phi^2 for phi = sigma psi_D Delta, as psi_A Delta^2 with A = sigma(D) Delta(D)."""
    if phi.m != 1 or phi.inner is not None or phi.lam is not None:
        raise AutomorphismError("square_flip needs phi = sigma psi_D Delta")
    n = phi.n
    A = tuple(apply_delta(phi.delta, phi.D[r]) * phi._Dinv[n - 1 - r] for r in range(n))
    return NormalFormAuto(phi.ring, A, m=0, delta=compose_delta(phi.delta, phi.delta))


def sigma_of_diag(D) -> tuple[RingElem, ...]:
    return tuple(inverse(d) for d in reversed(D))


def delta_of_diag(delta: str, D) -> tuple[RingElem, ...]:
    return tuple(apply_delta(delta, d) for d in D)


def multiply_diag(D1, D2) -> tuple[RingElem, ...]:
    return tuple(a * b for a, b in zip(D1, D2))


# ------------------------------------------------------ quotient actions


def induced_quotient_action(phi, k: int) -> QuotientAction:
    """Matrix of the map induced by phi on Z_{k+1}/Z_k.

    Computed by pushing each basis vector of the layer through phi. Over
    integer rings the layer is identified with Z^{(k+1)N} (coordinate r,
    then lattice basis); over Q with Q^{k+1}.
    """
    n, R = phi.n, phi.ring
    if not 0 <= k <= n - 2:
        raise ValueError(f"layer k={k} out of range for n={n}")
    zero = R.zero
    if R.is_field:
        cols = []
        for r in range(k + 1):
            v = [zero] * (k + 1)
            v[r] = R.one
            img = quotient_coords(phi(quotient_rep(v, k, n)), k)
            cols.append([x.a for x in img])
        return QuotientAction(k, np.array(cols, dtype=object).T.copy())
    cols = []
    for r in range(k + 1):
        for b in basis(R):
            v = [zero] * (k + 1)
            v[r] = b
            img = quotient_coords(phi(quotient_rep(v, k, n)), k)
            col = []
            for x in img:
                col.extend(to_lattice(x))
            cols.append(col)
    return QuotientAction(k, lattice.int_matrix(cols).T.copy())


def layer_scalar(phi: NormalFormAuto, k: int, r: int) -> RingElem:
    """d_r / d_{r+n-k-1} for 0-based coordinate r of layer k."""
    n = phi.n
    return phi.D[r] * phi._Dinv[r + n - k - 1]


def closed_form_action(phi, k: int) -> QuotientAction:
    """Layer matrix from the explicit formulas rather than by evaluation.

    m = 0: x_r e_r -> c_r delta(x_r) e_r,
    m = 1: x_r e_r -> -c_r delta(x_r) e_{k+2-r},  c_r = d_r d_{n+r-(k+1)}^-1.
    """
    if isinstance(phi, HeisenbergAuto):
        if k == 0:
            M = [[phi.det]]
        elif k == 1:
            M = [list(row) for row in phi.M]
        else:
            raise ValueError("UT_3 has layers 0 and 1")
        conv = (lambda x: x) if phi.ring.is_field else int
        return QuotientAction(k, np.array([[conv(x) for x in row] for row in M], dtype=object))
    n, R = phi.n, phi.ring
    if not 0 <= k <= n - 2:
        raise ValueError(f"layer k={k} out of range for n={n}")
    if R.is_field:
        M = np.array([[Fraction(0)] * (k + 1) for _ in range(k + 1)], dtype=object)
        for r in range(k + 1):
            c = layer_scalar(phi, k, r).a
            if phi.m:
                M[k - r, r] = -c
            else:
                M[r, r] = c
        return QuotientAction(k, M)
    N = R.rank
    size = (k + 1) * N
    M = lattice.int_matrix(np.zeros((size, size), dtype=int))
    for r in range(k + 1):
        blk = mul_matrix(layer_scalar(phi, k, r), phi.delta)
        if phi.m:
            t = k - r
            M[t * N:(t + 1) * N, r * N:(r + 1) * N] = -blk
        else:
            M[r * N:(r + 1) * N, r * N:(r + 1) * N] = blk
    return QuotientAction(k, M)


# ------------------------------------------------------------------ JSON


def _lam_from_json(obj, ring: RingDescriptor):
    if obj is None:
        return None
    if ring.is_field:
        return Fraction(str(obj))
    if isinstance(obj, list):
        return lattice.int_matrix([[int(str(x)) for x in row] for row in obj])
    c = int(str(obj))
    return lattice.identity(ring.rank) * c


def auto_from_json(obj: dict, ring: RingDescriptor):
    if "heisenberg" in obj:
        h = obj["heisenberg"]
        conv = Fraction if ring.is_field else int
        M = [[conv(str(x)) for x in row] for row in h["M"]]
        return HeisenbergAuto(ring, M, h.get("delta", "id"))
    D = [parse_elem(str(x), ring) for x in obj["D"]]
    inner = obj.get("inner")
    if inner is not None:
        inner = matrix_from_json(inner, ring)
    return NormalFormAuto(ring, D, m=int(obj.get("m", 0)), delta=obj.get("delta", "id"),
                          inner=inner, lam=_lam_from_json(obj.get("lambda"), ring))


def auto_to_json(phi) -> dict:
    if isinstance(phi, HeisenbergAuto):
        return {"heisenberg": {"M": [[str(x) for x in row] for row in phi.M], "delta": phi.delta}}
    lam = None
    if phi.lam is not None:
        lam = str(phi.lam) if phi.ring.is_field else [[str(x) for x in row] for row in phi.lam]
    return {
        "inner": matrix_to_json(phi.inner) if phi.inner is not None else None,
        "lambda": lam,
        "m": phi.m,
        "D": [str(d) for d in phi.D],
        "delta": phi.delta,
    }
