"""Twisted conjugacy in UT_n(Q).

Over a field every layer is a Q-vector space, so R(phi) is 1 when every
I - M_k is invertible and infinite otherwise. When it is 1, the layers
can be peeled top-down: at layer k one solves (I - M_k) w = v and
twists by the layer representative of w, which pushes the residual one
step down the central series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lattice
from .automorphism import induced_quotient_action
from .lattice import INF
from .rings import RingError
from .unitriangular import UniTriMatrix, central_level, inv, quotient_coords, quotient_rep


class SingularLayer(ArithmeticError):
    def __init__(self, layer: int, vector):
        super().__init__(f"I - M_{layer} is singular (fixed vector {[str(x) for x in vector]})")
        self.layer = layer
        self.vector = vector


@dataclass
class Classification:
    value: int | float
    singular_layer: int | None = None
    fixed_vector: list[Fraction] | None = None

    def to_json(self) -> dict:
        return {
            "value": "inf" if self.value == INF else str(self.value),
            "singular_layer": self.singular_layer,
            "fixed_vector": None if self.fixed_vector is None else [str(x) for x in self.fixed_vector],
        }


def _check(phi):
    if not phi.ring.is_field:
        raise RingError("the field solver works over Q; use engine.reidemeister_number")
    if phi.n < 2:
        raise ValueError("n >= 2")


def _gap(phi, k):
    """I - M_k over Q."""
    M = induced_quotient_action(phi, k).matrix
    return lattice.identity(M.shape[0]) - M


def _layer_fixed(phi, k):
    return lattice.rational_kernel_vector(_gap(phi, k).tolist())


def classify(phi) -> Classification:
    """1 if every layer map I - M_k is invertible, else infinity.

    A singular layer carries a nonzero fixed vector of M_k, recorded
    together with its index.
    """
    _check(phi)
    for k in range(phi.n - 1):
        v = _layer_fixed(phi, k)
        if v is not None:
            return Classification(INF, k, v)
    return Classification(1)


def _peel(phi, X: UniTriMatrix, stop: int):
    n = phi.n
    Y = X
    W = UniTriMatrix.identity(n, phi.ring)
    for k in range(n - 2, stop - 1, -1):
        if central_level(Y) <= k:
            continue
        A = _gap(phi, k)
        v = [x.a for x in quotient_coords(Y, k)]
        try:
            w = lattice.solve_rational(A.tolist(), v)
        except ZeroDivisionError:
            raise SingularLayer(k, lattice.rational_kernel_vector(A.tolist())) from None
        step = quotient_rep([phi.ring(x) for x in w], k, n)
        Y = inv(step) * Y * phi(step)
        W = W * step
    return Y, W


def solve_twisted(phi, X: UniTriMatrix) -> UniTriMatrix:
    """Z with X = Z phi(Z)^-1, checked by exact multiplication."""
    _check(phi)
    if X.n != phi.n or X.desc != phi.ring:
        raise ValueError("matrix does not match the automorphism's n / ring")
    c = classify(phi)
    if c.value != 1:
        raise SingularLayer(c.singular_layer, c.fixed_vector)
    Y, Z = _peel(phi, X, 0)
    if not Y.is_identity() or Z * inv(phi(Z)) != X:
        raise ArithmeticError("lifting failed verification")
    return Z


def conjugate_into_center(phi, X: UniTriMatrix) -> tuple[UniTriMatrix, UniTriMatrix]:
    """(X', W) with X' central and X' = W^-1 X phi(W).

    Needs I - M_k invertible for k >= 1; layer 0 is left alone.
    """
    _check(phi)
    if X.n != phi.n or X.desc != phi.ring:
        raise ValueError("matrix does not match the automorphism's n / ring")
    for k in range(1, phi.n - 1):
        v = _layer_fixed(phi, k)
        if v is not None:
            raise SingularLayer(k, v)
    Y, W = _peel(phi, X, 1)
    if central_level(Y) > 1 or inv(W) * X * phi(W) != Y:
        raise ArithmeticError("lifting failed verification")
    return Y, W
