"""Command-line driver.

Exit codes: 0 success or property holds, 1 property fails, 2 input error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import random
import sys

from . import io
from .ainfty import AInftyAlgebra, adjoin_units, check_relations, homology_algebra
from .bimod import (
    AInftyBimodule,
    BimoduleHom,
    b_plus_minus,
    check_bimodule,
    cone,
    connecting_map,
    decide_homotopic,
    dual,
    filtration_family,
    is_closed,
    quasi_inverse,
    quasi_iso,
    tensor_over,
)
from .bndalg import AlgebraWithBoundary, boundary_dga, check_boundary_axioms, dga_homology
from .corelin import InputError
from .crindex import CROperatorData, NumericalFailure, index, spectrum_near_zero, total_angle
from .extcalc import AssociativeAlgebra, ext_dim, module_named
from .hoch import HochschildCochain, X, Y, extension_class, x_matrix, y_matrix

OK, FAIL, BAD_INPUT, NUMERIC = 0, 1, 2, 3


class _Out:
    def __init__(self, stream):
        self.stream = stream

    def __call__(self, *parts):
        self.stream.write(" ".join(str(p) for p in parts) + "\n")


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _load(path: str, kind: str):
    doc = io.read(path)
    if doc.kind != kind:
        raise InputError(f"{path}: expected a {kind} document, got {doc.kind}")
    return doc.obj


def _vec(v) -> str:
    return " + ".join(sorted(v)) or "0"


def _slot_dims(dims: dict) -> str:
    return " ".join(f"({s},{t}):{n}" for (s, t), n in sorted(dims.items()) if n)


def _units(B: AInftyBimodule, spec: str | None) -> dict:
    if spec:
        out = {}
        for part in spec.split(","):
            i, _, names = part.partition("=")
            try:
                out[int(i)] = names.split("+")
            except ValueError:
                raise InputError(f"bad --units entry {part!r}; use i=name[+name...]") from None
        return out
    out = {}
    for i in range(1, B.m + 1):
        if f"e{i}" not in B.space:
            raise InputError(f"no generator e{i}; give the unit cocycles with --units")
        out[i] = [f"e{i}"]
    return out


def _print_hom(out, f: BimoduleHom) -> None:
    for (q, p) in sorted(f.components):
        for key, v in sorted(f.components[(q, p)].items()):
            left, b, right = key[:q], key[q], key[q + 1:]
            out(f"  [{q}|1|{p}] ({' '.join(left)} ; {b} ; {' '.join(right)}) -> {_vec(v)}")


# ---------------------------------------------------------------------------
# ainfty
# ---------------------------------------------------------------------------


def cmd_ainfty(args, out) -> int:
    A: AInftyAlgebra = _load(args.file, "ainfty_algebra")
    if args.action == "check":
        v = check_relations(A)
        out("relations:", "ok" if v is None else f"violation: {v}")
        return OK if v is None else FAIL
    HA = homology_algebra(A)
    out("homology dims:", _slot_dims(HA.homology.dims()) or "0")
    out("total:", HA.homology.total)
    for n in HA.space.names:
        out(f"  {n} = [{_vec(HA.reps[n])}]")
    for (a, b), v in sorted(HA.product.entries.items()):
        out(f"  {a} * {b} = {_vec(v)}")
    return OK


# ---------------------------------------------------------------------------
# bimod
# ---------------------------------------------------------------------------


def cmd_bimod(args, out) -> int:
    act = args.action
    if act == "check":
        P = _load(args.files[0], "ainfty_bimodule")
        v = check_bimodule(P)
        out("relations:", "ok" if v is None else f"violation: {v}")
        if v is None:
            out("homology dims:", _slot_dims(P.homology_dims()) or "0")
        return OK if v is None else FAIL
    if act == "dual":
        out.stream.write(io.emit(dual(_load(args.files[0], "ainfty_bimodule"))))
        return OK
    if act == "cone":
        f = _load(args.files[0], "bimodule_hom")
        out.stream.write(io.emit(cone(f).bimodule))
        return OK
    if act == "tensor":
        if len(args.files) != 2:
            raise InputError("tensor needs two bimodule files")
        P = _load(args.files[0], "ainfty_bimodule")
        Q = _load(args.files[1], "ainfty_bimodule")
        out.stream.write(io.emit(tensor_over(P, Q).bimodule))
        return OK
    if act == "homotopic":
        if len(args.files) != 2:
            raise InputError("homotopic needs two homomorphism files")
        f = _load(args.files[0], "bimodule_hom")
        g = _load(args.files[1], "bimodule_hom")
        for h, name in ((f, args.files[0]), (g, args.files[1])):
            if not is_closed(h):
                raise InputError(f"{name}: homomorphism is not closed")
        T = decide_homotopic(f, g)
        out("homotopic:", "yes" if T is not None else "no")
        if T is not None:
            out("homotopy:")
            _print_hom(out, T)
        return OK if T is not None else FAIL
    if act == "qinv":
        f = _load(args.files[0], "bimodule_hom")
        if not is_closed(f):
            raise InputError("homomorphism is not closed")
        if not quasi_iso(f):
            out("quasi-isomorphism: no")
            return FAIL
        out.stream.write(io.emit(quasi_inverse(f).inverse))
        return OK
    B = _load(args.files[0], "ainfty_bimodule")
    v = check_bimodule(B)
    if v is not None:
        raise InputError(f"bimodule relations fail: {v}")
    ses = b_plus_minus(B, _units(B, args.units))
    if act == "delta":
        rng = random.Random(args.seed) if args.seed is not None else None
        D = connecting_map(ses, rng=rng)
        out("B+ dims:", _slot_dims(ses.plus.homology_dims()) or "0")
        out("B- dims:", _slot_dims(ses.minus.homology_dims()) or "0")
        out("Delta:")
        _print_hom(out, D)
        closed = is_closed(D)
        lin0 = not D.components.get((0, 0))
        tri = cone(D).bimodule.homology_dims() == B.homology_dims()
        out("closed:", "yes" if closed else "no")
        out("linear term zero:", "yes" if lin0 else "no")
        out("triangle:", "ok" if tri else "mismatch")
        return OK if closed and lin0 and tri else FAIL
    # bc
    if args.c is None or args.ordinates is None:
        raise InputError("bc needs --ordinates and --c")
    try:
        ords = [float(x) for x in args.ordinates.split(",")]
    except ValueError:
        raise InputError(f"bad --ordinates {args.ordinates!r}") from None
    st = filtration_family(ses, ords, args.c)
    out("c:", fmt(args.c))
    out("F^c slots:", " ".join(f"({s},{t})" for s, t in sorted(st.in_F)) or "none")
    dims = st.Bc.bimodule.homology_dims()
    out("H(B^c) dims:", _slot_dims(dims) or "0")
    out("total:", sum(dims.values()))
    return OK


# ---------------------------------------------------------------------------
# hoch
# ---------------------------------------------------------------------------


def cmd_hoch(args, out) -> int:
    act = args.action
    if act == "x":
        Phi: HochschildCochain = _load(args.file, "hochschild_cochain")
        out.stream.write(io.emit(X(Phi)))
        return OK
    if act == "y":
        Psi: HochschildCochain = _load(args.file, "hochschild_cochain")
        out.stream.write(io.emit(Y(Psi, dual(Psi.P))))
        return OK
    P = _load(args.file, "ainfty_bimodule")
    v = check_bimodule(P)
    if v is not None:
        raise InputError(f"bimodule relations fail: {v}")
    if act == "homology":
        U = adjoin_units(P.algebra)
        ok = True
        for name, (CC, H, M) in (("X", x_matrix(U, P)), ("Y", y_matrix(U, P))):
            a, b = M.homology_dims()
            good = M.commutes() and M.is_quasi_iso()
            ok &= good
            out(f"{name}: H(CC) = {a}, H(hom) = {b}, chain map: {'yes' if M.commutes() else 'no'}, "
                f"quasi-iso: {'yes' if good else 'no'}")
        return OK if ok else FAIL
    # ext-class
    ses = b_plus_minus(P, _units(P, args.units))
    rng = random.Random(args.seed) if args.seed is not None else None
    e = extension_class(ses, connecting_map(ses, rng=rng))
    out("extension class:", "trivial" if e.is_trivial else "nontrivial")
    for (left, x, right), v in sorted(e.cochain.items()):
        out(f"  ({' '.join(left)} ; {x} ; {' '.join(right)}) -> {_vec(v)}")
    return OK


# ---------------------------------------------------------------------------
# ext, bnd, crindex
# ---------------------------------------------------------------------------


def cmd_ext(args, out) -> int:
    A = _load(args.alg, "ainfty_algebra")
    H = AssociativeAlgebra.from_ainfty(A)
    if args.k < 0:
        raise InputError("--k must be non-negative")
    out(ext_dim(module_named(args.M, H), module_named(args.N, H), args.k))
    return OK


def cmd_bnd(args, out) -> int:
    B: AlgebraWithBoundary = _load(args.file, "boundary_algebra")
    v = check_boundary_axioms(B)
    if args.action == "check":
        out("boundary axioms:", "ok" if v is None else f"violation: {v}")
        return OK if v is None else FAIL
    if v is not None:
        out("boundary axioms:", f"violation: {v}")
        return FAIL
    dga = boundary_dga(B)
    if args.action == "boundary":
        for n in dga.names:
            out(f"{n} deg {dga.degrees[n]} d = {_vec(dga.d(n))}")
        for a in dga.names:
            for b in dga.names:
                p = dga.mul(a, b)
                if p:
                    out(f"  {a} * {b} = {_vec(p)}")
        return OK
    H = dga_homology(dga)
    out("homology dims:", " ".join(f"deg {d}:{n}" for d, n in sorted(H.dims.items()) if n) or "0")
    out("total:", H.total)
    sq = H.square_zero_elements()
    out("nonzero square-zero classes:", len(sq))
    return OK


def cmd_crindex(args, out) -> int:
    data: CROperatorData = _load(args.file, "cr_operator")
    tol = args.tol if args.tol is not None else 1e-6
    int_tol = min(1e-8, tol * 1e-2)
    if args.action == "index":
        r = index(data, int_tol)
        out("deg:", r.degree)
        out("index:", r.index)
        out("injective:", "yes" if r.injective else "no")
        out("regular if index zero:", "yes" if r.regular_if_index_zero else "no")
        return OK
    for k, end in enumerate(data.ends):
        p = end.problem
        out(f"end {k} ({end.role}): total angle {fmt(total_angle(p, int_tol))}")
        for e in spectrum_near_zero(p, args.k, tol, int_tol):
            out(f"  mu {fmt(e.mu)} angle {fmt(e.angle)}")
    return OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="eigenvalue tolerance (crindex)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for random splittings")
    ap = argparse.ArgumentParser(prog="thimble", parents=[common])
    sub = ap.add_subparsers(dest="group", required=True)

    p = sub.add_parser("ainfty", parents=[common])
    p.add_argument("action", choices=["check", "homology"])
    p.add_argument("file")
    p.set_defaults(fn=cmd_ainfty)

    p = sub.add_parser("bimod", parents=[common])
    p.add_argument("action", choices=["check", "dual", "cone", "delta", "bc", "tensor",
                                      "homotopic", "qinv"])
    p.add_argument("files", nargs="+")
    p.add_argument("--units", help="unit cocycles, e.g. 1=e1,2=e2")
    p.add_argument("--ordinates", help="comma-separated, strictly decreasing")
    p.add_argument("--c", type=float)
    p.set_defaults(fn=cmd_bimod)

    p = sub.add_parser("hoch", parents=[common])
    p.add_argument("action", choices=["x", "y", "homology", "ext-class"])
    p.add_argument("file")
    p.add_argument("--units")
    p.set_defaults(fn=cmd_hoch)

    p = sub.add_parser("ext", parents=[common])
    p.add_argument("action", choices=["dim"])
    p.add_argument("--alg", required=True)
    p.add_argument("--M", required=True, choices=["diagonal", "dual_diagonal"])
    p.add_argument("--N", required=True, choices=["diagonal", "dual_diagonal"])
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=cmd_ext)

    p = sub.add_parser("bnd", parents=[common])
    p.add_argument("action", choices=["check", "boundary", "homology"])
    p.add_argument("file")
    p.set_defaults(fn=cmd_bnd)

    p = sub.add_parser("crindex", parents=[common])
    p.add_argument("action", choices=["spectrum", "index"])
    p.add_argument("file")
    p.add_argument("--k", type=int, default=4, help="number of eigenvalues")
    p.set_defaults(fn=cmd_crindex)
    return ap


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return OK if e.code == 0 else BAD_INPUT
    for name in ("tol", "seed"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        return args.fn(args, _Out(stdout))
    except InputError as e:
        stderr.write(f"input error: {e}\n")
        return BAD_INPUT
    except NumericalFailure as e:
        stderr.write(f"numerical failure: {e}\n")
        return NUMERIC


def main() -> None:
    sys.exit(run())
