"""Reidemeister numbers of automorphisms of UT_n(R), R with f.g. R^+.

R(phi) is the product of the layer numbers R(phi_k) over the upper central
series, and R(phi_k) = |det(I - M_k)| or infinity. Single computations
evaluate phi on layer representatives; sweeps build the layer matrices
from the closed forms in bulk and hand them to :func:`_accel.batch_det`.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _accel, lattice
from .automorphism import (
    HeisenbergAuto,
    NormalFormAuto,
    closed_form_action,
    induced_quotient_action,
)
from .lattice import INF
from .rings import (
    RingDescriptor,
    RingElem,
    RingError,
    apply_delta,
    from_lattice,
    inverse,
    mul_matrix,
    ring_automorphisms,
    to_lattice,
    units as ring_units,
)
from .unitriangular import UniTriMatrix, inv, transvection

log = logging.getLogger(__name__)


class NotConjugate(Exception):
    pass


@dataclass
class ReidemeisterValue:
    value: int | float
    layers: list = field(default_factory=list)
    witness: tuple[int, tuple] | None = None

    @property
    def infinite(self) -> bool:
        return self.value == INF

    def to_json(self) -> dict:
        w = None
        if self.witness is not None:
            w = {"layer": self.witness[0], "vector": [str(x) for x in self.witness[1]]}
        return {"layers": [fmt_value(v) for v in self.layers], "value": fmt_value(self.value), "witness": w}


def fmt_value(v) -> str:
    return "inf" if v == INF else str(v)


def _layer_count(phi) -> int:
    return phi.n - 1


def reidemeister_number(phi, *, full: bool = False) -> ReidemeisterValue:
    """R(phi) with its layer breakdown.

    Stops at the first layer with a fixed vector unless ``full``; that
    layer and a kernel vector of I - M_k are the witness.
    """
    R = phi.ring
    if R.is_field:
        raise RingError("Q^+ is not finitely generated; use field_solver.classify")
    if isinstance(phi, HeisenbergAuto) and phi.n != 3:
        raise ValueError("Heisenberg automorphisms need n = 3")
    layers = []
    witness = None
    for k in range(_layer_count(phi)):
        M = induced_quotient_action(phi, k).matrix
        v = lattice.reidemeister_abelian(M)
        layers.append(v.value)
        if v.infinite and witness is None:
            witness = (k, v.fixed_vector)
            if not full:
                break
    value = INF if witness else math.prod(layers)
    return ReidemeisterValue(value, layers, witness)


# --------------------------------------------------------------- sweeps


@dataclass
class SweepCase:
    m: int
    delta: str
    D: tuple[RingElem, ...]
    layers: list
    value: int | float
    witness_layer: int | None
    predicted_layer: int | None
    prediction_ok: bool | None
    witness_vector: tuple | None = None

    def params(self) -> dict:
        return {"m": self.m, "delta": self.delta, "D": [str(d) for d in self.D]}

    def to_json(self) -> dict:
        w = None
        if self.witness_layer is not None:
            w = {"layer": self.witness_layer,
                 "vector": [str(x) for x in self.witness_vector] if self.witness_vector else None}
        return {
            "params": self.params(),
            "layers": [fmt_value(v) for v in self.layers],
            "value": fmt_value(self.value),
            "witness": w,
            "predicted_layer": self.predicted_layer,
        }


@dataclass
class SweepReport:
    ring: RingDescriptor
    n: int
    cases: list[SweepCase]
    unit_count: int | None

    @property
    def all_infinite(self) -> bool:
        return all(c.value == INF for c in self.cases)

    @property
    def theorem_applies(self) -> bool:
        return self.unit_count is not None and self.n > 2 * self.unit_count

    @property
    def predictions_ok(self) -> bool:
        return all(c.prediction_ok is not False for c in self.cases)

    @property
    def verdict(self) -> str:
        return "R-infinity holds on tested family" if self.all_infinite else "finite values found"

    def finite_values(self) -> set[int]:
        return {c.value for c in self.cases if c.value != INF}

    def summary(self) -> dict:
        preds = [c for c in self.cases if c.predicted_layer is not None]
        return {
            "ring": str(self.ring),
            "n": self.n,
            "cases": len(self.cases),
            "infinite": sum(1 for c in self.cases if c.value == INF),
            "verdict": self.verdict,
            "theorem_applies": self.theorem_applies,
            "predicted": len(preds),
            "predictions_confirmed": sum(1 for c in preds if c.prediction_ok),
            "finite_values": [str(v) for v in sorted(self.finite_values())],
        }


class _UnitTable:
    """Units by index, with ratios u_a / u_b and the delta permutation.

    Rows of ``ratio`` cover the base units and their delta images; the
    columns cover the base units. Ratios outside the base list are
    appended, so the table works for unit lists that are not subgroups.
    """

    def __init__(self, ring, units):
        self.ring = ring
        self.units = list(units)
        self.index = {u: i for i, u in enumerate(self.units)}
        self.mats = {}
        nbase = len(self.units)
        self.delta_perm = {}
        for delta in ring_automorphisms(ring):
            self.delta_perm[delta] = np.array([self._idx(apply_delta(delta, u)) for u in self.units[:nbase]],
                                              dtype=np.int64)
        nrow = len(self.units)
        self.ratio = np.empty((nrow, nbase), dtype=np.int64)
        for a in range(nrow):
            for b in range(nbase):
                self.ratio[a, b] = self._idx(self.units[a] * inverse(self.units[b]))

    def _idx(self, u):
        if u not in self.index:
            self.index[u] = len(self.units)
            self.units.append(u)
        return self.index[u]

    def mul_stack(self, delta: str) -> np.ndarray:
        if delta not in self.mats:
            M = [mul_matrix(u, delta) for u in self.units]
            big = max((abs(int(x)) for m in M for x in m.flat), default=0)
            dtype = np.int64 if big < 2**40 else object
            self.mats[delta] = np.array(M, dtype=object).astype(dtype)
        return self.mats[delta]


def _layer_stack(Didx, table: _UnitTable, m: int, delta: str, k: int, n: int) -> np.ndarray:
    """I - M_k for every row of Didx (closed forms)."""
    N = table.ring.rank
    mats = table.mul_stack(delta)
    B = Didx.shape[0]
    size = (k + 1) * N
    out = np.zeros((B, size, size), dtype=mats.dtype)
    for r in range(k + 1):
        c = table.ratio[Didx[:, r], Didx[:, r + n - k - 1]]
        blk = mats[c]
        t = k - r if m else r
        out[:, t * N:(t + 1) * N, r * N:(r + 1) * N] = -blk if m else blk
    eye = np.eye(size, dtype=np.int64)
    if out.dtype == object:
        return lattice.int_matrix(eye)[None] - out
    return eye[None] - out


def predicted_layers(Didx, table: _UnitTable, m: int, delta: str, n: int) -> np.ndarray:
    """Layer forced singular by the pigeonhole argument, or -1.

    m = 0: indices j < i with d_i = d_j give k + 1 = n + j - i.
    m = 1: a_r = delta(d_r) / d_{n+1-r}; equal a_j = a_i with i + j != n + 1.
    The first qualifying pair in (i - j, j) order is used.
    """
    B = Didx.shape[0]
    if m == 0:
        key = Didx
    else:
        dd = table.delta_perm[delta][Didx]
        key = table.ratio[dd, Didx[:, ::-1]]
    out = np.full(B, -1, dtype=np.int64)
    for gap in range(1, n):
        for j in range(0, n - gap):
            i = j + gap
            if m == 1 and i + j == n - 1:
                continue
            hit = (out < 0) & (key[:, i] == key[:, j])
            out[hit] = n + j - i - 1
    return out


def _sweep_chunk(args):
    ring, units, m, delta, n, Didx, jit = args
    table = _UnitTable(ring, units)
    dets = np.zeros((Didx.shape[0], n - 1), dtype=object)
    for k in range(n - 1):
        stack = _layer_stack(Didx, table, m, delta, k, n)
        dets[:, k] = _accel.batch_det(stack, jit=jit)
    return dets


def _chunks(total: int, size: int):
    for a in range(0, total, size):
        yield a, min(total, a + size)


def r_infinity_sweep(ring: RingDescriptor, n: int, unit_list=None, *, deltas=None, ms=(0, 1),
                     normalize: bool = True, jobs: int = 1, vectors: bool = False,
                     jit: bool | None = None, progress=None) -> SweepReport:
    """Evaluate every normal form sigma^m psi_D Delta over the given units.

    With ``normalize`` the first diagonal entry is fixed to 1 (scalar
    diagonals act trivially). Unit groups must be finite unless
    ``unit_list`` is supplied.
    """
    if ring.is_field:
        raise RingError("sweeps need a ring with finitely generated R^+")
    if n < 2:
        raise ValueError("n >= 2")
    if unit_list is None:
        ul = ring_units(ring)
        if not ul.finite:
            raise RingError(f"{ring} has infinitely many units; pass an explicit unit list")
        unit_list = list(ul.units)
        unit_count = len(unit_list)
    else:
        unit_list = [ring.parse(u) if isinstance(u, str) else u for u in unit_list]
        ul = ring_units(ring)
        unit_count = len(ul.units) if ul.finite else None
    if ring.one not in unit_list:
        unit_list = [ring.one] + unit_list
    deltas = list(deltas or ring_automorphisms(ring))
    table = _UnitTable(ring, unit_list)
    base = [table.index[u] for u in unit_list]
    first = [table.index[ring.one]] if normalize else base
    Dall = np.array([(f,) + rest for f in first for rest in itertools.product(base, repeat=n - 1)],
                    dtype=np.int64)
    cases = []
    for m in ms:
        for delta in deltas:
            B = len(Dall)
            per = max(1, int(2**24 // max(1, (n - 1) ** 2 * ring.rank**2 * 8)))
            work = [(ring, table.units, m, delta, n, Dall[a:b], jit) for a, b in _chunks(B, per)]
            if jobs > 1 and len(work) > 1:
                with ProcessPoolExecutor(max_workers=jobs) as ex:
                    parts = list(ex.map(_sweep_chunk, work))
            else:
                parts = [_sweep_chunk(w) for w in work]
            dets = np.concatenate(parts, axis=0) if parts else np.zeros((0, n - 1), dtype=object)
            pred = predicted_layers(Dall, table, m, delta, n)
            for row, Drow, p in zip(dets, Dall, pred):
                layers = [INF if x == 0 else abs(int(x)) for x in row]
                wl = next((k for k, v in enumerate(layers) if v == INF), None)
                value = INF if wl is not None else math.prod(layers)
                p = int(p) if p >= 0 else None
                ok = None if p is None else layers[p] == INF
                D = tuple(table.units[i] for i in Drow)
                case = SweepCase(m, delta, D, layers, value, wl, p, ok)
                if vectors and wl is not None:
                    phi = NormalFormAuto(ring, D, m=m, delta=delta)
                    K = lattice.identity((wl + 1) * ring.rank) - closed_form_action(phi, wl).matrix
                    case.witness_vector = lattice.kernel_basis(K)[0]
                cases.append(case)
            if progress is not None:
                progress(f"m={m} delta={delta}: {B} cases")
    return SweepReport(ring, n, cases, unit_count)


# ------------------------------------------------------------- spectrum


@dataclass
class SpectrumSample:
    finite: set
    infinite: bool
    cases: int

    def to_json(self) -> dict:
        return {"finite": [str(v) for v in sorted(self.finite)], "infinity": self.infinite, "cases": self.cases}


def heisenberg_family(ring: RingDescriptor, bound: int):
    """All M in GL_2(Z) with entries in [-bound, bound]."""
    rng = range(-bound, bound + 1)
    for p, q, r, s in itertools.product(rng, repeat=4):
        if p * s - q * r in (1, -1):
            yield HeisenbergAuto(ring, ((p, q), (r, s)))


def spectrum_sample(ring: RingDescriptor, n: int, unit_list=None, *, deltas=None, ms=(0, 1),
                    heisenberg_bound: int | None = None, normal_forms: bool = True,
                    jit: bool | None = None) -> SpectrumSample:
    """Attained Reidemeister numbers over a parametrized family.

    The finite part is a lower bound for Spec(UT_n(R)) intersected with N.
    """
    finite, infinite, count = set(), False, 0
    if normal_forms:
        rep = r_infinity_sweep(ring, n, unit_list, deltas=deltas, ms=ms, jit=jit)
        for c in rep.cases:
            count += 1
            if c.value == INF:
                infinite = True
            else:
                finite.add(c.value)
    if heisenberg_bound is not None:
        if n != 3:
            raise ValueError("the Heisenberg family lives on UT_3")
        for psi in heisenberg_family(ring, heisenberg_bound):
            count += 1
            v = reidemeister_number(psi)
            if v.infinite:
                infinite = True
            else:
                finite.add(v.value)
    return SpectrumSample(finite, infinite, count)


# ------------------------------------------------ central subgroup H


@dataclass
class CentralSubgroupH:
    generators: list
    index: int | float
    # (kind, position, lattice vector) per generator: kind "t" or "y"
    sources: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {"generators": [[str(x) for x in g] for g in self.generators], "index": fmt_value(self.index)}


def _require_m0(phi: NormalFormAuto):
    if not isinstance(phi, NormalFormAuto):
        raise TypeError("central subgroup needs a normal-form automorphism")
    if phi.m != 0:
        raise NotImplementedError(
            "central classes for m = 1 are not described by a linear subgroup of this form; "
            "only m = 0 is supported")
    if phi.inner is not None:
        raise ValueError("strip the inner part first (it shifts central classes)")
    if phi.n < 3:
        raise ValueError("n >= 3 required")


def central_subgroup_H(phi: NormalFormAuto) -> CentralSubgroupH:
    """H with T_{1,n}(a) ~ T_{1,n}(b) iff a - b in H, for phi = Lam psi_D Delta.

    H = sum_i lam(Fix(x -> c_i delta(x))) + image(y -> y - c_0 delta(y)),
    c_i = d_i / d_{i+1}, c_0 = d_1 / d_n.
    """
    _require_m0(phi)
    R, n, D = phi.ring, phi.n, phi.D
    c0 = D[0] * inverse(D[n - 1])
    if R.is_field:
        gens, sources = [], []
        lam = phi.lam if phi.lam is not None else Fraction(0)
        for i in range(n - 1):
            ci = D[i] * inverse(D[i + 1])
            if ci == R.one and lam != 0:
                gens.append((lam,))
                sources.append(("t", i, (Fraction(1),)))
        y = 1 - c0.a
        if y != 0:
            gens.append((y,))
            sources.append(("y", 0, (Fraction(1),)))
        return CentralSubgroupH(gens, 1 if gens else INF, sources)
    N = R.rank
    gens, sources = [], []
    for i in range(n - 1):
        Ci = mul_matrix(D[i] * inverse(D[i + 1]), phi.delta)
        for v in lattice.kernel_basis(lattice.identity(N) - Ci):
            t = from_lattice(v, R)
            g = to_lattice(phi.lam_of(t))
            gens.append(g)
            sources.append(("t", i, v))
    K0 = lattice.identity(N) - mul_matrix(c0, phi.delta)
    for j in range(N):
        gens.append(tuple(int(x) for x in K0[:, j]))
        e = [0] * N
        e[j] = 1
        sources.append(("y", j, tuple(e)))
    nz = [g for g in gens if any(g)]
    index = lattice.subgroup_index(nz, N) if nz else INF
    return CentralSubgroupH(gens, index, sources)


@dataclass
class CentralWitness:
    T: UniTriMatrix
    Y: UniTriMatrix

    @property
    def conjugator(self) -> UniTriMatrix:
        return self.T * self.Y


def central_conjugator(phi: NormalFormAuto, a: RingElem, b: RingElem) -> CentralWitness:
    """T, Y with T_{1,n}(a) = (TY)^-1 T_{1,n}(b) phi(TY), verified exactly."""
    _require_m0(phi)
    R, n = phi.ring, phi.n
    A, B = transvection(n, 1, n, a), transvection(n, 1, n, b)
    if a == b:
        I = UniTriMatrix.identity(n, R)
        return CentralWitness(I, I)
    H = central_subgroup_H(phi)
    diff = a - b
    if R.is_field:
        if not H.generators:
            raise NotConjugate(f"{a} - {b} is not in H = 0")
        coeffs = [Fraction(0)] * len(H.generators)
        coeffs[0] = diff.a / H.generators[0][0]
    else:
        G = lattice.int_matrix(H.generators).T if H.generators else None
        sol = lattice.solve_integer(G, to_lattice(diff)) if G is not None else None
        if sol is None:
            raise NotConjugate(f"{a} - {b} is not in H (index {fmt_value(H.index)})")
        coeffs = sol
    t = [R.zero] * (n - 1)
    y = R.zero
    for c, (kind, pos, vec) in zip(coeffs, H.sources):
        if not c:
            continue
        if R.is_field:
            elem = R(c * vec[0])
        else:
            elem = from_lattice([c * x for x in vec], R)
        if kind == "t":
            t[pos] = t[pos] + elem
        else:
            y = y + elem
    T = UniTriMatrix(n, R, {(i + 1, i + 2): t[i] for i in range(n - 1)})
    # phi(Y) = T_{1,n}(c_0 delta(y)) contributes -(y - c_0 delta(y)) to a - b
    Y = transvection(n, 1, n, -y)
    W = T * Y
    if inv(W) * B * phi(W) != A:
        raise ArithmeticError("constructed conjugator failed verification")
    return CentralWitness(T, Y)
