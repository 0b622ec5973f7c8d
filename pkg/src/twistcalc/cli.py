"""twistcalc command line.

Exit codes: 0 ok, 1 usage or input error, 2 an --expect assertion failed,
3 a resource cap was exceeded. Results go to stdout, progress to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import engine, field_solver, lattice, oracle
from .automorphism import AutomorphismError, HeisenbergAuto, NormalFormAuto, auto_from_json
from .rings import CapExceeded, RingError, parse_elem, parse_ring
from .unitriangular import from_json as matrix_from_json, to_json as matrix_to_json

EXIT_OK, EXIT_USAGE, EXIT_EXPECT, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(v) -> str:
    return engine.fmt_value(v)


def _load_json(text: str):
    """Inline JSON, or a path to a JSON file."""
    text = text.strip()
    if text[:1] in "{[":
        return json.loads(text)
    with open(text) as fh:
        return json.load(fh)


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


# --------------------------------------------------------- automorphisms


def _add_auto_args(p, ring_default="Z"):
    p.add_argument("--ring", default=ring_default, help="Z, Q, Z[i], Z[sqrt,d] or Z[isqrt,p]")
    p.add_argument("--n", type=int, help="matrix size (defaults to the length of --diag)")
    p.add_argument("--diag", help="comma-separated diagonal units d_1,...,d_n")
    p.add_argument("--m", type=int, default=0, choices=(0, 1), help="flip exponent")
    p.add_argument("--delta", default="id", choices=("id", "conj"), help="ring automorphism")
    p.add_argument("--lambda", dest="lam", help="central map: scalar, or JSON N x N matrix")
    p.add_argument("--inner", help="inner part as matrix JSON (inline or file)")
    p.add_argument("--heisenberg", help="p,q,r,s: Heisenberg automorphism of UT_3 with M=[[p,q],[r,s]]")
    p.add_argument("--auto", help="automorphism JSON (inline or file)")


def _lam(text, ring):
    if text is None:
        return None
    if ring.is_field:
        return Fraction(text)
    text = text.strip()
    if text.startswith("["):
        return lattice.int_matrix(json.loads(text))
    return lattice.identity(ring.rank) * int(text)


def _build_auto(args):
    ring = parse_ring(args.ring)
    if args.auto:
        return ring, auto_from_json(_load_json(args.auto), ring)
    if args.heisenberg:
        conv = Fraction if ring.is_field else int
        p, q, r, s = (conv(x) for x in _split(args.heisenberg))
        return ring, HeisenbergAuto(ring, ((p, q), (r, s)), args.delta)
    if args.diag:
        D = [parse_elem(x, ring) for x in _split(args.diag)]
    elif args.n:
        D = [ring.one] * args.n
    else:
        raise UsageError("give --diag, --n, --heisenberg or --auto")
    if args.n is not None and args.n != len(D):
        raise UsageError(f"--n {args.n} does not match {len(D)} diagonal entries")
    inner = matrix_from_json(_load_json(args.inner), ring) if args.inner else None
    phi = NormalFormAuto(ring, D, m=args.m, delta=args.delta, inner=inner, lam=_lam(args.lam, ring))
    return ring, phi


# ------------------------------------------------------------- output


def _emit(args, obj: dict, lines: list[str]):
    if args.json:
        print(json.dumps(obj, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _expect(args, got: str) -> int:
    if args.expect is None:
        return EXIT_OK
    if got != args.expect:
        print(f"expectation failed: expected {args.expect}, got {got}", file=sys.stderr)
        return EXIT_EXPECT
    return EXIT_OK


# ---------------------------------------------------------- subcommands


def cmd_reid(args) -> int:
    ring, phi = _build_auto(args)
    if ring.is_field:
        c = field_solver.classify(phi)
        _emit(args, c.to_json(), [f"R = {_fmt(c.value)}"]
              + ([f"singular layer {c.singular_layer}"] if c.singular_layer is not None else []))
        return _expect(args, _fmt(c.value))
    v = engine.reidemeister_number(phi, full=args.full)
    lines = [f"R = {_fmt(v.value)}", "layers: " + " ".join(_fmt(x) for x in v.layers)]
    if v.witness:
        lines.append(f"witness: layer {v.witness[0]}, vector {list(v.witness[1])}")
    _emit(args, v.to_json(), lines)
    return _expect(args, _fmt(v.value))


def _unit_list(args, ring):
    if not args.units:
        return None
    return [parse_elem(x, ring) for x in _split(args.units)]


def cmd_sweep(args) -> int:
    ring = parse_ring(args.ring)
    deltas = _split(args.deltas) if args.deltas else None
    ms = [int(x) for x in _split(args.ms)]
    rep = engine.r_infinity_sweep(
        ring, args.n, _unit_list(args, ring), deltas=deltas, ms=ms, normalize=not args.no_normalize,
        jobs=args.jobs, vectors=args.vectors, progress=lambda s: print(s, file=sys.stderr))
    summary = rep.summary()
    summary = {k: (str(v) if isinstance(v, int) and not isinstance(v, bool) else v) for k, v in summary.items()}
    obj = {"summary": summary}
    if args.cases:
        obj["cases"] = [c.to_json() for c in rep.cases]
    lines = [f"{k}: {v}" for k, v in summary.items()]
    if args.cases:
        for c in rep.cases:
            lines.append(f"m={c.m} delta={c.delta} D=[{','.join(str(d) for d in c.D)}] "
                         f"layers={' '.join(_fmt(x) for x in c.layers)} R={_fmt(c.value)}")
    _emit(args, obj, lines)
    if args.expect is not None:
        ok = rep.all_infinite if args.expect == "inf" else args.expect in {str(v) for v in rep.finite_values()}
        if not ok or not rep.predictions_ok:
            print(f"expectation failed: {args.expect}", file=sys.stderr)
            return EXIT_EXPECT
    return EXIT_OK


def cmd_spectrum(args) -> int:
    ring = parse_ring(args.ring)
    s = engine.spectrum_sample(ring, args.n, _unit_list(args, ring), ms=[int(x) for x in _split(args.ms)],
                               heisenberg_bound=args.heisenberg_bound, normal_forms=not args.no_normal_forms)
    obj = s.to_json()
    obj["cases"] = str(obj["cases"])
    lines = ["finite: " + (" ".join(obj["finite"]) or "(none)"), f"infinity: {s.infinite}", f"cases: {s.cases}"]
    _emit(args, obj, lines)
    if args.expect is not None:
        want = _split(args.expect)
        have = set(obj["finite"]) | ({"inf"} if s.infinite else set())
        missing = [w for w in want if w not in have]
        if missing:
            print(f"expectation failed: {missing} not attained", file=sys.stderr)
            return EXIT_EXPECT
    return EXIT_OK


def _find_group(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    packaged = resources.files("twistcalc") / "data" / p.name
    if packaged.is_file():
        return Path(str(packaged))
    raise UsageError(f"no such group file: {path}")


def _finite_auto(G, spec: str | None):
    if spec in (None, "identity", "id"):
        return oracle.identity_auto(G)
    if spec in ("inverse", "inversion"):
        if not G.is_abelian():
            raise UsageError("inversion is an automorphism only of abelian groups")
        return oracle.inversion_auto(G)
    return oracle.automorphism(G, np.array(_load_json(spec), dtype=np.int64))


def cmd_oracle(args) -> int:
    central = None
    if args.group:
        G, meta = oracle.load_group_json(_find_group(args.group))
        central = meta.get("central")
        phi = _finite_auto(G, args.auto)
    elif args.ut:
        n, modulus = (int(x) for x in _split(args.ut))
        nf = None
        if args.diag or args.lam or args.inner or args.m:
            args.ring = "Z"
            args.n = n
            _, nf = _build_auto(args)
        G, phi = oracle.ut_mod(n, modulus, nf)
        if args.auto and nf is None:
            phi = _finite_auto(G, args.auto)
        central = G.center()
    else:
        raise UsageError("give --group FILE or --ut n,modulus")
    if args.central:
        central = [int(x) for x in _split(args.central)]
    classes = oracle.twisted_classes(G, phi)
    obj = {"size": str(G.size), "R": str(classes.count),
           "representatives": [str(r) for r in classes.representatives]}
    lines = [f"|G| = {G.size}", f"R = {classes.count}"]
    if args.check:
        rep = oracle.check_propositions(G, phi, _split(args.check), rng=random.Random(args.seed),
                                        samples=args.samples, central=central)
        obj["checks"] = [{"name": r.name, "passed": r.passed,
                          "detail": json.loads(json.dumps(r.detail, default=str))} for r in rep.results]
        for r in rep.results:
            det = ", ".join(f"{k}={v}" for k, v in r.detail.items() if k != "counterexamples")
            lines.append(f"{r.name}: {'pass' if r.passed else 'FAIL'} ({det})")
        if not rep.passed:
            _emit(args, obj, lines)
            return EXIT_EXPECT
    _emit(args, obj, lines)
    return _expect(args, str(classes.count))


def cmd_solve(args) -> int:
    ring, phi = _build_auto(args)
    if not ring.is_field:
        raise UsageError("solve works over Q")
    c = field_solver.classify(phi)
    if args.target is None:
        _emit(args, c.to_json(), [f"R = {_fmt(c.value)}"])
        return _expect(args, _fmt(c.value))
    X = matrix_from_json(_load_json(args.target), ring)
    if args.center:
        Y, W = field_solver.conjugate_into_center(phi, X)
        obj = {"central": matrix_to_json(Y), "W": matrix_to_json(W), "verified": True}
        _emit(args, obj, [f"X' = {Y}", f"W = {W}", "verified: true"])
        return EXIT_OK
    Zm = field_solver.solve_twisted(phi, X)
    _emit(args, {"Z": matrix_to_json(Zm), "verified": True}, [f"Z = {Zm}", "verified: true"])
    return EXIT_OK


def cmd_hsub(args) -> int:
    ring, phi = _build_auto(args)
    H = engine.central_subgroup_H(phi)
    obj = H.to_json()
    lines = ["H generators: " + " ".join("(" + ",".join(str(x) for x in g) + ")" for g in H.generators),
             f"index: {_fmt(H.index)}"]
    if args.a is not None:
        a, b = parse_elem(args.a, ring), parse_elem(args.b or "0", ring)
        try:
            w = engine.central_conjugator(phi, a, b)
            obj["conjugator"] = {"T": matrix_to_json(w.T), "Y": matrix_to_json(w.Y), "verified": True}
            lines += [f"T = {w.T}", f"Y = {w.Y}", "verified: true"]
        except engine.NotConjugate as e:
            obj["conjugator"] = None
            lines.append(f"not conjugate: {e}")
    _emit(args, obj, lines)
    return _expect(args, _fmt(H.index))


# --------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="twistcalc", description="Reidemeister numbers of unitriangular groups")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--expect", help="assert the headline result (exit 2 on mismatch)")

    r = sub.add_parser("reid", help="one Reidemeister number")
    _add_auto_args(r)
    r.add_argument("--full", action="store_true", help="do not stop at the first infinite layer")
    common(r)

    s = sub.add_parser("sweep", help="R-infinity sweep over normal forms")
    s.add_argument("--ring", default="Z")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--units", help="explicit unit list (needed for infinite unit groups)")
    s.add_argument("--deltas", help="comma list of ring automorphisms (default: all)")
    s.add_argument("--ms", default="0,1")
    s.add_argument("--no-normalize", action="store_true", help="do not fix d_1 = 1")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--vectors", action="store_true", help="attach kernel vectors to witnesses")
    s.add_argument("--cases", action="store_true", help="list every case")
    common(s)

    sp = sub.add_parser("spectrum", help="sample the Reidemeister spectrum")
    sp.add_argument("--ring", default="Z")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--units")
    sp.add_argument("--ms", default="0,1")
    sp.add_argument("--heisenberg-bound", type=int, help="include Heisenberg maps with |entries| <= b")
    sp.add_argument("--no-normal-forms", action="store_true")
    common(sp)

    o = sub.add_parser("oracle", help="brute-force twisted classes of a finite group")
    o.add_argument("--group", help="group table JSON (packaged: c4.json)")
    o.add_argument("--ut", help="n,modulus: use UT_n(Z/modulus)")
    o.add_argument("--auto", help="identity, inverse, or JSON list of images")
    o.add_argument("--diag")
    o.add_argument("--m", type=int, default=0, choices=(0, 1))
    o.add_argument("--lambda", dest="lam")
    o.add_argument("--inner")
    o.add_argument("--check", help="comma list of inn, ind, zf")
    o.add_argument("--central", help="generators of the central subgroup for zf")
    o.add_argument("--samples", type=int, default=50)
    o.add_argument("--seed", type=int, default=0)
    common(o)

    so = sub.add_parser("solve", help="twisted conjugacy over Q")
    _add_auto_args(so, ring_default="Q")
    so.add_argument("--target", help="matrix JSON X; solves X = Z phi(Z)^-1")
    so.add_argument("--center", action="store_true", help="only conjugate X into the centre")
    common(so)

    h = sub.add_parser("hsub", help="central subgroup H and conjugators (m = 0)")
    _add_auto_args(h)
    h.add_argument("--a", help="central entry a of T_{1,n}(a)")
    h.add_argument("--b", help="central entry b of T_{1,n}(b) (default 0)")
    common(h)
    return p


COMMANDS = {"reid": cmd_reid, "sweep": cmd_sweep, "spectrum": cmd_spectrum,
            "oracle": cmd_oracle, "solve": cmd_solve, "hsub": cmd_hsub}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    # the oracle parser has no auto-construction flags beyond these
    for name, default in (("heisenberg", None), ("auto", None), ("delta", "id"), ("n", None), ("ring", "Z")):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return COMMANDS[args.cmd](args)
    except CapExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, RingError, AutomorphismError, oracle.GroupError, ValueError, TypeError,
            NotImplementedError, json.JSONDecodeError, OSError, field_solver.SingularLayer) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
