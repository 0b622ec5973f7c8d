"""Brute-force twisted conjugacy in finite groups.

Ground truth for everything the linearized engine computes. Groups are
multiplication tables; automorphisms are permutations of element indices.

Reduction mod m changes Reidemeister numbers, so these counts never stand
in for R over Z itself. They validate identities that hold in every group
(inner invariance, direct products, the central-extension inequality, the
abelian index formula) and layer-wise linear algebra.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import _accel
from .automorphism import NormalFormAuto
from .rings import CapExceeded, INTEGERS

DEFAULT_CAP = 3**8


def size_cap() -> int:
    env = os.environ.get("TWISTCALC_CAP")
    return int(env) if env else DEFAULT_CAP


class GroupError(ValueError):
    pass


@dataclass
class FiniteGroupTable:
    mul: np.ndarray
    inv: np.ndarray
    identity: int
    generators: list[int]
    labels: list | None = None

    @property
    def size(self) -> int:
        return self.mul.shape[0]

    def elements(self) -> range:
        return range(self.size)

    def is_abelian(self) -> bool:
        return bool((self.mul == self.mul.T).all())

    def center(self) -> list[int]:
        return [z for z in self.elements() if (self.mul[z] == self.mul[:, z]).all()]


@dataclass
class FiniteAutomorphism:
    perm: np.ndarray

    def __call__(self, x: int) -> int:
        return int(self.perm[x])


@dataclass
class TwistedClasses:
    count: int
    representatives: list[int]
    labels: np.ndarray


def group_from_table(mul, generators=None, check: bool = True, rng: random.Random | None = None) -> FiniteGroupTable:
    mul = np.asarray(mul, dtype=np.int64)
    s = mul.shape[0]
    if mul.shape != (s, s) or s == 0:
        raise GroupError("multiplication table must be square and nonempty")
    if mul.min() < 0 or mul.max() >= s:
        raise GroupError("table entries out of range")
    ar = np.arange(s)
    ids = [e for e in range(s) if (mul[e] == ar).all() and (mul[:, e] == ar).all()]
    if not ids:
        raise GroupError("no identity element")
    e = ids[0]
    inv = np.full(s, -1, dtype=np.int64)
    rows, cols = np.nonzero(mul == e)
    inv[rows] = cols
    if (inv < 0).any() or not (mul[ar, inv] == e).all() or not (mul[inv, ar] == e).all():
        raise GroupError("some element has no two-sided inverse")
    if check:
        _check_latin(mul)
        _check_assoc(mul, rng)
    gens = list(range(s)) if generators is None else [int(g) for g in generators]
    G = FiniteGroupTable(mul, inv, e, gens)
    if check and generators is not None and len(closure(G, gens)) != s:
        raise GroupError("generators do not generate the group")
    return G


def _check_latin(mul):
    s = mul.shape[0]
    for row in (mul, mul.T):
        srt = np.sort(row, axis=1)
        if not (srt == np.arange(s)).all():
            raise GroupError("table is not a Latin square")


def _check_assoc(mul, rng=None, samples: int = 20000):
    s = mul.shape[0]
    if s <= 40:
        a = np.arange(s)
        lhs = mul[mul[a[:, None, None], a[None, :, None]], a[None, None, :]]
        rhs = mul[a[:, None, None], mul[a[None, :, None], a[None, None, :]]]
        if not (lhs == rhs).all():
            raise GroupError("table is not associative")
        return
    rng = rng or random.Random(0)
    x = np.array([rng.randrange(s) for _ in range(samples)])
    y = np.array([rng.randrange(s) for _ in range(samples)])
    z = np.array([rng.randrange(s) for _ in range(samples)])
    if not (mul[mul[x, y], z] == mul[x, mul[y, z]]).all():
        raise GroupError("table is not associative")


def closure(G: FiniteGroupTable, gens) -> set[int]:
    seen = {G.identity}
    frontier = [G.identity]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = int(G.mul[x, g])
                if y not in seen:
                    seen.add(y)
                    new.append(y)
        frontier = new
    return seen


def automorphism(G: FiniteGroupTable, images, check: bool = True,
                 rng: random.Random | None = None) -> FiniteAutomorphism:
    perm = np.asarray(images, dtype=np.int64)
    if perm.shape != (G.size,):
        raise GroupError("automorphism must list one image per element")
    if check:
        if len(set(perm.tolist())) != G.size:
            raise GroupError("map is not bijective")
        s = G.size
        if s <= 300:
            ok = (perm[G.mul] == G.mul[perm[:, None], perm[None, :]]).all()
        else:
            rng = rng or random.Random(0)
            x = np.array([rng.randrange(s) for _ in range(20000)])
            y = np.array([rng.randrange(s) for _ in range(20000)])
            ok = (perm[G.mul[x, y]] == G.mul[perm[x], perm[y]]).all()
        if not ok:
            raise GroupError("map is not multiplicative")
    return FiniteAutomorphism(perm)


def identity_auto(G: FiniteGroupTable) -> FiniteAutomorphism:
    return FiniteAutomorphism(np.arange(G.size))


def inversion_auto(G: FiniteGroupTable) -> FiniteAutomorphism:
    if not G.is_abelian():
        raise GroupError("inversion is an automorphism only of abelian groups")
    return FiniteAutomorphism(G.inv.copy())


def inner_auto(G: FiniteGroupTable, z: int) -> FiniteAutomorphism:
    """x -> z x z^-1."""
    return FiniteAutomorphism(G.mul[G.mul[z], G.inv[z]].copy())


def compose_auto(f: FiniteAutomorphism, g: FiniteAutomorphism) -> FiniteAutomorphism:
    """f o g."""
    return FiniteAutomorphism(f.perm[g.perm])


# ------------------------------------------------------------ counting


def twisted_classes(G: FiniteGroupTable, phi: FiniteAutomorphism, jit: bool | None = None) -> TwistedClasses:
    """Classes of x ~ z x phi(z)^-1, by union-find over the generators."""
    labels = _accel.twisted_labels(G.mul, G.inv, phi.perm, G.generators, jit=jit)
    reps = sorted(set(labels.tolist()))
    return TwistedClasses(len(reps), reps, labels)


def twisted_classes_all(G: FiniteGroupTable, phi: FiniteAutomorphism) -> TwistedClasses:
    """Same partition, but joining x with z x phi(z)^-1 for every z."""
    labels = _accel.twisted_labels(G.mul, G.inv, phi.perm, list(G.elements()))
    reps = sorted(set(labels.tolist()))
    return TwistedClasses(len(reps), reps, labels)


def reidemeister(G: FiniteGroupTable, phi: FiniteAutomorphism) -> int:
    return twisted_classes(G, phi).count


# ----------------------------------------------------------- builders


def cyclic(k: int) -> FiniteGroupTable:
    a = np.arange(k)
    return group_from_table((a[:, None] + a[None, :]) % k, generators=[1 % k])


def abelian(moduli) -> FiniteGroupTable:
    """Z/m1 x Z/m2 x ..., elements in mixed radix (first modulus fastest)."""
    moduli = list(moduli)
    elems = list(product(*[range(m) for m in reversed(moduli)]))
    elems = [tuple(reversed(e)) for e in elems]
    index = {e: i for i, e in enumerate(elems)}
    s = len(elems)
    mul = np.empty((s, s), dtype=np.int64)
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            mul[i, j] = index[tuple((a + b) % m for a, b, m in zip(x, y, moduli))]
    gens = []
    for t in range(len(moduli)):
        e = [0] * len(moduli)
        e[t] = 1 % moduli[t]
        gens.append(index[tuple(e)])
    G = group_from_table(mul, generators=gens, check=False)
    G.labels = elems
    return G


def linear_auto(G: FiniteGroupTable, M, modulus: int) -> FiniteAutomorphism:
    """x -> M x on (Z/m)^d built by :func:`abelian` with equal moduli."""
    M = np.asarray(M, dtype=np.int64)
    index = {e: i for i, e in enumerate(G.labels)}
    images = [index[tuple(int(c) for c in (M @ np.array(e)) % modulus)] for e in G.labels]
    return automorphism(G, images)


def direct_product(P: FiniteGroupTable, Q: FiniteGroupTable) -> FiniteGroupTable:
    """P x Q with (p, q) stored at index p * |Q| + q."""
    sp, sq = P.size, Q.size
    a = np.arange(sp * sq)
    p, q = a // sq, a % sq
    mul = P.mul[p[:, None], p[None, :]] * sq + Q.mul[q[:, None], q[None, :]]
    gens = [g * sq + Q.identity for g in P.generators] + [P.identity * sq + h for h in Q.generators]
    return group_from_table(mul, generators=gens, check=False)


def product_auto(phiP: FiniteAutomorphism, phiQ: FiniteAutomorphism) -> FiniteAutomorphism:
    sq = len(phiQ.perm)
    a = np.arange(len(phiP.perm) * sq)
    return FiniteAutomorphism(phiP.perm[a // sq] * sq + phiQ.perm[a % sq])


def load_group_json(obj) -> tuple[FiniteGroupTable, dict]:
    """Read {"size": s, "mul": [[...]], "generators": [...]}; extra keys are returned."""
    if isinstance(obj, (str, os.PathLike)):
        with open(obj) as fh:
            obj = json.load(fh)
    s = int(obj["size"])
    mul = np.array(obj["mul"], dtype=np.int64)
    if mul.shape != (s, s):
        raise GroupError(f"declared size {s} does not match table shape {mul.shape}")
    G = group_from_table(mul, obj.get("generators"))
    return G, obj


# ------------------------------------------------------- UT_n(Z/mZ)


def _unitri_inverse_mod(F: np.ndarray, m: int) -> np.ndarray:
    n = F.shape[-1]
    eye = np.eye(n, dtype=np.int64)
    N = (F - eye) % m
    out = eye.copy() + np.zeros_like(F)
    term = eye + np.zeros_like(F)
    for _ in range(1, n):
        term = np.matmul(term, -N) % m
        out = (out + term) % m
    return out


def reduce_auto_mod(phi: NormalFormAuto, F: np.ndarray, m: int) -> np.ndarray:
    """Apply phi entrywise mod m to a stack of full integer matrices."""
    n = phi.n
    d = np.array([int(x.a) for x in phi.D], dtype=np.int64) % m
    try:
        dinv = np.array([pow(int(x), -1, m) for x in d], dtype=np.int64)
    except ValueError:
        raise GroupError(f"diagonal {d.tolist()} is not invertible mod {m}") from None
    Y = (F * d[:, None] * dinv[None, :]) % m
    if phi.m:
        Y = Y[..., ::-1, ::-1].swapaxes(-1, -2)
        Y = _unitri_inverse_mod(Y, m)
    if phi.lam is not None:
        c = int(phi.lam[0, 0])
        s = sum(Y[..., i, i + 1] for i in range(n - 1))
        Y = Y.copy()
        Y[..., 0, n - 1] = (Y[..., 0, n - 1] + c * s) % m
    if phi.inner is not None:
        A = np.array([[int(x.a) for x in row] for row in phi.inner.rows()], dtype=np.int64)
        Ainv = _unitri_inverse_mod(A[None], m)[0]
        Y = np.matmul(np.matmul(A, Y), Ainv) % m
    return Y


def ut_mod(n: int, modulus: int, phi: NormalFormAuto | None = None,
           jit: bool | None = None) -> tuple[FiniteGroupTable, FiniteAutomorphism]:
    """UT_n(Z/mZ) as a table, with phi reduced mod m (identity if None)."""
    if modulus < 2:
        raise GroupError("modulus must be at least 2")
    if phi is not None:
        if phi.ring.kind != INTEGERS or phi.delta != "id":
            raise GroupError("ut_mod reduces automorphisms of UT_n(Z) only")
        if phi.n != n:
            raise GroupError("automorphism dimension mismatch")
        if phi.lam is not None and phi.lam.shape != (1, 1):
            raise GroupError("lambda must be an integer scalar")
        bad = [int(x.a) for x in phi.D if np.gcd(int(x.a), modulus) != 1]
        if bad:
            raise GroupError(f"diagonal entries {bad} are not units mod {modulus}")
    s = _accel.table_size(n, modulus)
    if s > size_cap():
        raise CapExceeded(f"UT_{n}(Z/{modulus}) has {s} elements, cap is {size_cap()}")
    mul = _accel.ut_mul_table(n, modulus, jit=jit)
    gens = []
    for i in range(n - 1):
        E = np.eye(n, dtype=np.int64)
        E[i, i + 1] = 1
        gens.append(int(_accel.ut_encode(E, n, modulus)))
    G = group_from_table(mul, generators=gens, check=False)
    if phi is None:
        return G, identity_auto(G)
    F = _accel.ut_decode(np.arange(s), n, modulus)
    perm = _accel.ut_encode(reduce_auto_mod(phi, F, modulus), n, modulus)
    return G, automorphism(G, perm)


def ut_element(M: np.ndarray, modulus: int) -> int:
    M = np.asarray(M, dtype=np.int64)
    return int(_accel.ut_encode(M, M.shape[0], modulus))


# ------------------------------------------------ subgroup / quotient


def subgroup_auto(G: FiniteGroupTable, H, phi: FiniteAutomorphism) -> tuple[FiniteGroupTable, FiniteAutomorphism]:
    """Restriction of phi to a phi-invariant subgroup H (list of elements)."""
    H = sorted(set(int(h) for h in H))
    pos = {h: i for i, h in enumerate(H)}
    if G.identity not in pos:
        raise GroupError("subgroup must contain the identity")
    try:
        mul = np.array([[pos[int(G.mul[a, b])] for b in H] for a in H], dtype=np.int64)
        perm = np.array([pos[int(phi.perm[h])] for h in H], dtype=np.int64)
    except KeyError:
        raise GroupError("H is not a phi-invariant subgroup") from None
    sub = group_from_table(mul, check=False)
    return sub, FiniteAutomorphism(perm)


def quotient_auto(G: FiniteGroupTable, H, phi: FiniteAutomorphism) -> tuple[FiniteGroupTable, FiniteAutomorphism]:
    """The automorphism induced on G/H for a normal phi-invariant H."""
    H = sorted(set(int(h) for h in H))
    coset = np.full(G.size, -1, dtype=np.int64)
    reps = []
    for x in G.elements():
        if coset[x] < 0:
            c = len(reps)
            reps.append(x)
            for h in H:
                coset[G.mul[x, h]] = c
    q = len(reps)
    mul = np.array([[coset[G.mul[a, b]] for b in reps] for a in reps], dtype=np.int64)
    if not (coset[G.mul] == mul[coset[:, None], coset[None, :]]).all():
        raise GroupError("H is not normal")
    perm = np.array([coset[phi.perm[r]] for r in reps], dtype=np.int64)
    if len(set(perm.tolist())) != q:
        raise GroupError("H is not phi-invariant")
    quo = group_from_table(mul, generators=sorted(set(coset[g] for g in G.generators)), check=False)
    return quo, FiniteAutomorphism(perm)


def generated_subgroup(G: FiniteGroupTable, gens) -> list[int]:
    return sorted(closure(G, [int(g) for g in gens]))


# ---------------------------------------------- proposition checks


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class CheckReport:
    results: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def by_name(self, name: str) -> CheckResult:
        return next(r for r in self.results if r.name == name)


def check_inner(G, phi, rng: random.Random, samples: int = 50) -> CheckResult:
    base = reidemeister(G, phi)
    bad = []
    for _ in range(samples):
        z = rng.randrange(G.size)
        r = reidemeister(G, compose_auto(inner_auto(G, z), phi))
        if r != base:
            bad.append({"z": z, "R": r})
    return CheckResult("inn", not bad, {"R": base, "samples": samples, "counterexamples": bad})


def image_of_twist(G, phi) -> set[int]:
    """[e]_phi = {z phi(z)^-1}."""
    return set(G.mul[np.arange(G.size), G.inv[phi.perm]].tolist())


def check_index(G, phi) -> CheckResult:
    if not G.is_abelian():
        raise GroupError("the index formula needs an abelian group")
    img = image_of_twist(G, phi)
    index = G.size // len(img)
    r = reidemeister(G, phi)
    return CheckResult("ind", r == index and G.size % len(img) == 0, {"R": r, "index": index})


def check_central_quotient(G, phi, H) -> CheckResult:
    H = generated_subgroup(G, H)
    centre = set(G.center())
    if not set(H) <= centre:
        raise GroupError("declared subgroup is not central")
    sub, phi_sub = subgroup_auto(G, H, phi)
    quo, phi_quo = quotient_auto(G, H, phi)
    r = reidemeister(G, phi)
    r1, r2 = reidemeister(sub, phi_sub), reidemeister(quo, phi_quo)
    return CheckResult("zf", r <= r1 * r2,
                       {"R": r, "R_sub": r1, "R_quotient": r2, "strict": r < r1 * r2})


def check_product(P, phiP, Q, phiQ) -> CheckResult:
    G = direct_product(P, Q)
    phi = product_auto(phiP, phiQ)
    r = reidemeister(G, phi)
    rp, rq = reidemeister(P, phiP), reidemeister(Q, phiQ)
    return CheckResult("prod", r == rp * rq, {"R": r, "R_P": rp, "R_Q": rq})


def check_propositions(G, phi, checks=("inn",), *, rng: random.Random | None = None,
                       samples: int = 50, central=None, factors=None) -> CheckReport:
    """Evaluate the requested identities by independent class counts.

    checks: any of "inn", "ind", "zf" (needs ``central`` generators) and
    "prod" (needs ``factors = (P, phiP, Q, phiQ)``; G, phi are ignored).
    """
    rng = rng or random.Random(0)
    out = []
    for name in checks:
        if name == "inn":
            out.append(check_inner(G, phi, rng, samples))
        elif name == "ind":
            out.append(check_index(G, phi))
        elif name == "zf":
            if central is None:
                raise GroupError("zf needs a declared central subgroup")
            out.append(check_central_quotient(G, phi, central))
        elif name == "prod":
            if factors is None:
                raise GroupError("prod needs a declared direct-product structure")
            out.append(check_product(*factors))
        else:
            raise GroupError(f"unknown check {name!r}")
    return CheckReport(out)


def abelian_index_mod(M, modulus: int) -> int:
    """|(Z/m)^d : image(I - M)| by enumerating the image."""
    M = np.asarray(M, dtype=np.int64)
    d = M.shape[0]
    K = (np.eye(d, dtype=np.int64) - M) % modulus
    vecs = np.array(list(product(range(modulus), repeat=d)), dtype=np.int64).reshape(-1, d)
    img = (vecs @ K.T) % modulus
    return modulus**d // len({tuple(r) for r in img.tolist()})
