"""Exact arithmetic in Z, Q and the quadratic rings Z[w] with w^2 = d.

Elements are immutable. Integer rings expose their additive group as a
lattice Z^N over the basis {1, w}, which is what every index computation
downstream works with.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

INTEGERS = "Integers"
RATIONALS = "Rationals"
QUADRATIC = "Quadratic"

PELL_CAP = 10**6


class RingError(ValueError):
    pass


class NotAUnit(RingError):
    pass


class CapExceeded(RuntimeError):
    """A configured resource cap was hit."""


def _squarefree(d: int) -> bool:
    d = abs(d)
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class RingDescriptor:
    kind: str
    d: int = 0

    def __post_init__(self):
        if self.kind not in (INTEGERS, RATIONALS, QUADRATIC):
            raise RingError(f"unknown ring kind {self.kind!r}")
        if self.kind == QUADRATIC:
            if self.d in (0, 1) or not _squarefree(self.d):
                raise RingError(f"Z[w] needs square-free d not in {{0, 1}}, got {self.d}")
        elif self.d != 0:
            raise RingError("d is only meaningful for quadratic rings")

    @property
    def is_field(self) -> bool:
        return self.kind == RATIONALS

    @property
    def rank(self) -> int:
        """Rank N of the additive group (Z-lattice rank)."""
        if self.kind == RATIONALS:
            raise RingError("Q^+ is not finitely generated")
        return 1 if self.kind == INTEGERS else 2

    @property
    def characteristic(self) -> int:
        return 0

    @property
    def zero(self) -> RingElem:
        return RingElem(0, 0, self)

    @property
    def one(self) -> RingElem:
        return RingElem(1, 0, self)

    @property
    def omega(self) -> RingElem:
        if self.kind != QUADRATIC:
            raise RingError("only quadratic rings have w")
        return RingElem(0, 1, self)

    def __call__(self, a, b=0) -> RingElem:
        """Build an element a + b*w, coercing to the ring's coordinate type."""
        if self.kind == RATIONALS:
            if b:
                raise RingError("Q has no w-coordinate")
            return RingElem(Fraction(a), 0, self)
        a, b = Fraction(a), Fraction(b)
        if a.denominator != 1 or b.denominator != 1:
            raise RingError(f"non-integral coordinates for {self}")
        if self.kind == INTEGERS and b:
            raise RingError("Z has no w-coordinate")
        return RingElem(int(a), int(b), self)

    def __str__(self) -> str:
        if self.kind == INTEGERS:
            return "Z"
        if self.kind == RATIONALS:
            return "Q"
        if self.d > 1:
            return f"Z[sqrt,{self.d}]"
        if self.d == -1:
            return "Z[i]"
        return f"Z[isqrt,{-self.d}]"

    def parse(self, text: str) -> RingElem:
        return parse_elem(text, self)


Z = RingDescriptor(INTEGERS)
Q = RingDescriptor(RATIONALS)


def quadratic(d: int) -> RingDescriptor:
    return RingDescriptor(QUADRATIC, d)


def gaussian() -> RingDescriptor:
    return RingDescriptor(QUADRATIC, -1)


_RING_RE = re.compile(r"^Z\[(sqrt|isqrt),\s*(\d+)\]$")


def parse_ring(text: str) -> RingDescriptor:
    """Parse "Z", "Q", "Z[i]", "Z[sqrt,d]" or "Z[isqrt,p]"."""
    text = text.strip()
    if text == "Z[i]":
        return gaussian()
    if text == "Z":
        return Z
    if text == "Q":
        return Q
    m = _RING_RE.match(text.replace(" ", ""))
    if not m:
        raise RingError(f"bad ring descriptor {text!r}")
    kind, val = m.group(1), int(m.group(2))
    if kind == "sqrt":
        if val <= 1:
            raise RingError("Z[sqrt,d] needs d > 1")
        return quadratic(val)
    if val < 1:
        raise RingError("Z[isqrt,p] needs p >= 1")
    return quadratic(-val)


@dataclass(frozen=True, eq=False, slots=True)
class RingElem:
    a: int | Fraction
    b: int | Fraction
    desc: RingDescriptor

    def _check(self, other) -> RingElem:
        if isinstance(other, int):
            return self.desc(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        if other.desc is not self.desc and other.desc != self.desc:
            raise RingError(f"cannot combine elements of {self.desc} and {other.desc}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return RingElem(self.a + other.a, self.b + other.b, self.desc)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return RingElem(self.a - other.a, self.b - other.b, self.desc)

    def __rsub__(self, other):
        return -self + other

    def __neg__(self):
        return RingElem(-self.a, -self.b, self.desc)

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if self.desc.kind != QUADRATIC:
            return RingElem(self.a * other.a, 0, self.desc)
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return RingElem(a1 * a2 + b1 * b2 * self.desc.d, a1 * b2 + a2 * b1, self.desc)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            return self.b == 0 and self.a == other
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.desc == other.desc

    def __hash__(self):
        return hash((self.a, self.b, self.desc))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def conj(self) -> RingElem:
        return RingElem(self.a, -self.b, self.desc)

    def norm(self):
        """Field norm a^2 - d b^2 (just a^2 outside quadratic rings)."""
        return self.a * self.a - self.desc.d * self.b * self.b

    def is_unit(self) -> bool:
        if not self:
            return False
        if self.desc.kind == RATIONALS:
            return True
        return abs(self.norm()) == 1

    def inverse(self) -> RingElem:
        return inverse(self)

    def __str__(self) -> str:
        return format_elem(self)

    def __repr__(self) -> str:
        return f"RingElem({format_elem(self)!r}, {self.desc})"


def inverse(x: RingElem) -> RingElem:
    if not x:
        raise ZeroDivisionError("inverse of zero")
    desc = x.desc
    if desc.kind == RATIONALS:
        return RingElem(1 / Fraction(x.a), 0, desc)
    nrm = x.norm()
    if nrm not in (1, -1):
        raise NotAUnit(f"{x} is not a unit of {desc}")
    # (a + bw)^{-1} = (a - bw) / norm
    return RingElem(x.a * nrm, -x.b * nrm, desc)


# ---------------------------------------------------------------- parsing

_NUM = r"[0-9]+(?:/[0-9]+)?"
_TERM_RE = re.compile(rf"([+-]?)\s*(?:({_NUM})\s*\*?\s*)?(w)?")


def _num(text: str) -> Fraction:
    return Fraction(text)


def parse_elem(text: str, desc: RingDescriptor) -> RingElem:
    """Parse "a", "a+b*w", "w", "-3*w", "1/2" into an element of desc."""
    s = str(text).replace(" ", "")
    if not s:
        raise RingError("empty element")
    a = Fraction(0)
    b = Fraction(0)
    pos = 0
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise RingError(f"cannot parse element {text!r}")
        if pos > 0 and not m.group(1):
            raise RingError(f"cannot parse element {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = _num(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(3):
            b += sign * coeff
        else:
            a += sign * coeff
        pos = m.end()
    return desc(a, b)


def _fmt_num(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_elem(x: RingElem) -> str:
    if x.desc.kind != QUADRATIC or x.b == 0:
        return _fmt_num(x.a)
    bpart = "w" if abs(x.b) == 1 else _fmt_num(abs(x.b)) + "*w"
    if x.a == 0:
        return ("-" if x.b < 0 else "") + bpart
    return _fmt_num(x.a) + ("-" if x.b < 0 else "+") + bpart


# ----------------------------------------------------------------- units


def fundamental_unit(desc: RingDescriptor, cap: int | None = None) -> RingElem:
    """Smallest unit x + y*w with y > 0, x > 0 of Z[sqrt d], d > 1.

    Searches y = 1, 2, ... for d*y^2 +- 1 being a perfect square.
    """
    if desc.kind != QUADRATIC or desc.d <= 1:
        raise RingError("fundamental units only exist for real quadratic rings")
    cap = PELL_CAP if cap is None else cap
    d = desc.d
    for y in range(1, cap + 1):
        t = d * y * y
        for s in (t - 1, t + 1):
            x = math.isqrt(s)
            if x * x == s and x > 0:
                return RingElem(x, y, desc)
    raise CapExceeded(f"no unit of Z[sqrt {d}] with w-coefficient <= {cap}")


@dataclass(frozen=True)
class UnitList:
    units: tuple[RingElem, ...]
    finite: bool

    def __iter__(self) -> Iterator[RingElem]:
        return iter(self.units)

    def __len__(self):
        return len(self.units)


def units(desc: RingDescriptor, count: int = 8, cap: int | None = None) -> UnitList:
    """The unit group R* when finite, else the first `count` units."""
    if desc.kind == RATIONALS:
        return UnitList((), False)
    one = desc.one
    if desc.kind == INTEGERS or desc.d < -1:
        return UnitList((one, -one), True)
    if desc.d == -1:
        i = desc.omega
        return UnitList((one, -one, i, -i), True)
    u = fundamental_unit(desc, cap)
    uinv = inverse(u)
    out = []
    pos, neg = one, one
    k = 0
    while len(out) < count:
        if k == 0:
            cand = [one, -one]
        else:
            pos, neg = pos * u, neg * uinv
            cand = [pos, -pos, neg, -neg]
        for c in cand:
            if len(out) < count:
                out.append(c)
        k += 1
    return UnitList(tuple(out), False)


# ---------------------------------------------------- ring automorphisms

DELTAS = ("id", "conj")


def ring_automorphisms(desc: RingDescriptor) -> tuple[str, ...]:
    if desc.kind == QUADRATIC:
        return DELTAS
    return ("id",)


def apply_delta(delta: str, x: RingElem) -> RingElem:
    if delta == "id":
        return x
    if delta == "conj":
        if x.desc.kind != QUADRATIC:
            raise RingError(f"conjugation is not an automorphism of {x.desc}")
        return x.conj()
    raise RingError(f"unknown ring automorphism {delta!r}")


def compose_delta(d1: str, d2: str) -> str:
    return "id" if d1 == d2 else "conj"


# ----------------------------------------------------------- lattice view


def to_lattice(x: RingElem) -> tuple[int, ...]:
    if x.desc.kind == RATIONALS:
        raise RingError("Q has no lattice coordinates")
    if x.desc.kind == INTEGERS:
        return (x.a,)
    return (x.a, x.b)


def from_lattice(v, desc: RingDescriptor) -> RingElem:
    if desc.kind == RATIONALS:
        raise RingError("Q has no lattice coordinates")
    v = [int(c) for c in v]
    if len(v) != desc.rank:
        raise RingError(f"expected {desc.rank} coordinates, got {len(v)}")
    return RingElem(v[0], v[1] if desc.kind == QUADRATIC else 0, desc)


def basis(desc: RingDescriptor) -> list[RingElem]:
    if desc.kind == INTEGERS:
        return [desc.one]
    if desc.kind == QUADRATIC:
        return [desc.one, desc.omega]
    raise RingError("Q has no lattice basis")


def mul_matrix(c: RingElem, delta: str = "id") -> np.ndarray:
    """Integer matrix of x -> c*delta(x) on the lattice basis (columns = images)."""
    desc = c.desc
    cols = [to_lattice(c * apply_delta(delta, e)) for e in basis(desc)]
    return np.array(cols, dtype=object).T.copy()
