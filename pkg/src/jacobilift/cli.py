"""Command-line entry point.

    jacobilift basis  --m 2 --n 1 --d 3 --S identity
    jacobilift theta  --Z i --W 0 --radius 20
    jacobilift verify main-theorem --form theta-e8 --d 1 --tol 1e-6

Exit codes: 0 pass, 1 verification failure, 2 input error, 3 truncation failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import exact
from .errors import JacobiLiftError, TruncationError
from .forms import (
    EisensteinSpec,
    EvenUnimodularForm,
    HalfIntegralIndex,
    ThetaForm,
    TruncationPolicy,
    e8,
    jacobi_invariance_check,
    theta_eval,
)
from .lift import (
    LiftSpec,
    gamma1_generators,
    identity_I_check,
    identity_II_check,
    main_theorem_check,
    random_gamma1_word,
)
from .matgroup import (
    HeisenbergElement,
    JacobiDomainPoint,
    JacobiElement,
    SiegelPoint,
    automorphy_cz_d,
    canonical_factor,
    cocycle_residual,
    jacobi_action,
)
from .polyharm import QuadFormS, lemma43_residual, pluriharmonic_basis
from .report import VerificationReport, dumps
from .sampling import random_in_span, random_jacobi, random_siegel_point, random_symplectic, random_W
from .serialize import basis_to_json, load_json_arg, parse_complex_matrix_arg, parse_matrix_arg

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_TRUNC = 0, 1, 2, 3

DEFAULT_TOL = {
    "jacobi-invariance": 1e-7,
    "main-theorem": 1e-6,
    "identity-I": 1e-7,
    "identity-II": 1e-4,
    "cocycle": 1e-10,
    "lemma43": 1e-10,
}
DEFAULT_Z = ["i", "0.3+1.1i"]


class InputError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _emit(args, payload: dict, summary: str | None = None):
    text = dumps(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        if summary:
            print(summary)
    else:
        print(text)


def _lattice(args) -> EvenUnimodularForm:
    if args.lattice in (None, "e8", "builtin"):
        return e8()
    data = load_json_arg(args.lattice)
    if isinstance(data, dict):
        data = data.get("S", data.get("gram"))
    return EvenUnimodularForm(data)


def _theta(args) -> ThetaForm:
    L = _lattice(args)
    if args.c:
        c = np.array(load_json_arg(args.c), dtype=np.int64)
    else:
        c = np.eye(L.rank, args.m or 1, dtype=np.int64)
    return ThetaForm(L, c)


def _eisenstein(args) -> EisensteinSpec:
    m = args.m or 1
    M = parse_matrix_arg(args.index, m) if args.index else exact.identity(m)
    return EisensteinSpec(args.k or 8, HalfIntegralIndex(M, definite=True))


def _source(args):
    return _eisenstein(args) if args.form == "eisenstein" else _theta(args)


def _policy(args) -> TruncationPolicy:
    kw = {}
    if args.radius is not None:
        kw["radius"] = args.radius
    if args.cmax is not None:
        kw["cmax"] = args.cmax
    if args.lmax is not None:
        kw["lmax"] = args.lmax
    if args.eps is not None:
        kw["eps"] = args.eps
    return TruncationPolicy(**kw)


def _points(args, n: int = 1) -> list:
    return [SiegelPoint(parse_complex_matrix_arg(z, (n, n), diagonal=True)) for z in (args.Z or DEFAULT_Z)]


def _gen_items(extra_words: list) -> list:
    gens = gamma1_generators()
    return [("T", gens["T"]), ("S", gens["S"])] + extra_words


def _words(args, Z) -> list:
    rng = np.random.default_rng(args.seed)
    out = []
    for _ in range(args.trials or 0):
        word, g = random_gamma1_word(rng, Z)
        out.append(("".join(w if w != "T^-1" else "t" for w in word), g))
    return out


# ---------------------------------------------------------------- commands

def cmd_basis(args) -> int:
    if args.m is None or args.d is None:
        raise InputError("basis needs --m and --d")
    n = args.n or 1
    S = QuadFormS(parse_matrix_arg(args.S or "identity", args.m))
    if S.m != args.m:
        raise InputError(f"S is {S.m}x{S.m} but --m is {args.m}")
    B = pluriharmonic_basis(S, args.d, n)
    _emit(args, basis_to_json(B), f"dimension {len(B)}")
    return EXIT_PASS


def cmd_theta(args) -> int:
    f = _theta(args)
    n = args.n or 1
    Z = SiegelPoint(parse_complex_matrix_arg(args.Z[0] if args.Z else "i", (n, n), diagonal=True))
    W = parse_complex_matrix_arg(args.W or "0", (f.m, n))
    pol = _policy(args)
    v = theta_eval(f, Z, W, pol)
    _emit(args, v.to_dict(), f"value {complex(v.value)} tail_bound {v.tail_bound:.3e}")
    return EXIT_PASS


def _verify_invariance(args, tol) -> VerificationReport:
    src = _source(args)
    pol = _policy(args)
    k = src.k + (1 if args.weight_off_by_one else 0)
    m = src.index.m
    gens = [JacobiElement.from_symplectic(g, m) for _, g in _gen_items([])]
    for i in range(m):
        e = exact.zeros(m, 1)
        e[i, 0] = 1
        gens.append(JacobiElement.from_heisenberg(HeisenbergElement(e, exact.zeros(m, 1))))
        gens.append(JacobiElement.from_heisenberg(HeisenbergElement(exact.zeros(m, 1), e)))
    W = parse_complex_matrix_arg(args.W or "0.2+0.3i", (m, 1))
    points = [JacobiDomainPoint(Z, W) for Z in _points(args)]
    rep = jacobi_invariance_check(lambda p: src(p.Z, p.W, pol), k, src.index, gens, points, tol)
    rep.metadata.update({"weight": k, "form": args.form})
    return rep


def _verify_main(args, tol) -> VerificationReport:
    src = _source(args)
    spec = LiftSpec.for_source(src, args.d or 0, policy=_policy(args))
    k = spec.k - 1 if args.weight_off_by_one else spec.k
    rep = VerificationReport("main-theorem", tol)
    for Z in _points(args):
        for name, g in _gen_items(_words(args, Z)):
            main_theorem_check(spec, g, Z, tol, k=k, report=rep)
            rep.cases[-1]["word"] = name
    rep.metadata.update({"weight": k, "form": args.form, "seed": args.seed})
    return rep


def _verify_identity_I(args, tol) -> VerificationReport:
    th = _theta(args)
    S = QuadFormS(exact.inv(2 * th.index.M))
    B = pluriharmonic_basis(S, args.d or 0, 1)
    rep = VerificationReport("identity-I", tol)
    for P in B:
        for Z in _points(args):
            for name, g in _gen_items([]):
                identity_I_check(th, P, g, Z, _policy(args), tol, report=rep)
                rep.cases[-1]["word"] = name
    rep.metadata["degree"] = args.d or 0
    return rep


def _verify_identity_II(args, tol) -> VerificationReport:
    E = _eisenstein(args)
    S = QuadFormS(exact.inv(2 * E.index.M))
    B = pluriharmonic_basis(S, args.d or 0, 1)
    pol = _policy(args)
    rep = VerificationReport("identity-II", tol)
    for P in B:
        for Z in _points(args):
            for name, g in _gen_items([]):
                identity_II_check(E, P, g, Z, pol, tol, reindex=not args.direct, report=rep)
                rep.cases[-1]["word"] = name
    rep.metadata.update({"k": E.k, "degree": args.d or 0, "reindex": not args.direct})
    return rep


def _verify_cocycle(args, tol) -> VerificationReport:
    rng = np.random.default_rng(args.seed)
    n, m = args.n or 1, args.m or 1
    M = exact.identity(m)
    rep = VerificationReport("cocycle", tol)

    def cz_d(g, Z):
        return automorphy_cz_d(g, Z.Z)

    def chi(g, p):
        return canonical_factor(g, p, M, 2)

    for t in range(args.trials or 50):
        Z = SiegelPoint(random_siegel_point(rng, n))
        g1, g2 = random_symplectic(rng, n), random_symplectic(rng, n)
        rep.add(cocycle_residual(cz_d, g1, g2, Z, relative=True), kind="CZ+D", trial=t)
        p = JacobiDomainPoint(Z, random_W(rng, m, n))
        h1, h2 = random_jacobi(rng, n, m), random_jacobi(rng, n, m)
        rep.add(cocycle_residual(chi, h1, h2, p, act=jacobi_action, relative=True),
                kind="chi-det", trial=t)
    rep.metadata.update({"seed": args.seed, "n": n, "m": m})
    return rep


def _verify_lemma43(args, tol) -> VerificationReport:
    rng = np.random.default_rng(args.seed)
    shapes = [(args.m, args.n or 1)] if args.m else [(1, 1), (2, 1)]
    rep = VerificationReport("lemma43", tol)
    bases = {}
    for t in range(args.trials or 100):
        m, n = shapes[t % len(shapes)]
        S = QuadFormS(exact.identity(m) if t % 3 == 0 else
                      exact.qmat(_random_pd(rng, m)))
        choices = []
        for d in range(4):
            key = (tuple(S.S.flat), n, d)
            if key not in bases:
                bases[key] = pluriharmonic_basis(S, d, n)
            if len(bases[key]):
                choices.append(bases[key])
        B = choices[int(rng.integers(len(choices)))]
        P = random_in_span(rng, B)
        C = rng.standard_normal((n, n)) * 0.3
        C = C + C.T
        W = random_W(rng, m, n)
        rep.add(lemma43_residual(P, S, C, W), trial=t, m=m, n=n, degree=B.degree)
    rep.metadata["seed"] = args.seed
    return rep


def _random_pd(rng, m):
    A = rng.integers(-1, 2, size=(m, m))
    return (A @ A.T + np.eye(m, dtype=np.int64)).tolist()


VERIFIERS = {
    "jacobi-invariance": _verify_invariance,
    "main-theorem": _verify_main,
    "identity-I": _verify_identity_I,
    "identity-II": _verify_identity_II,
    "cocycle": _verify_cocycle,
    "lemma43": _verify_lemma43,
}


def cmd_verify(args) -> int:
    tol = args.tol if args.tol is not None else DEFAULT_TOL[args.subtest]
    rep = VERIFIERS[args.subtest](args, tol)
    _emit(args, rep.to_dict(), rep.summary())
    return EXIT_PASS if rep.passed else EXIT_FAIL


# ---------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, help="degree n of the Siegel half space")
    p.add_argument("--m", type=int, help="size m of the index / rows of W")
    p.add_argument("--k", type=int, help="Eisenstein weight (default 8)")
    p.add_argument("--d", type=int, help="polynomial degree")
    p.add_argument("--S", help="quadratic form: 'identity', a scalar, a JSON file or inline JSON")
    p.add_argument("--lattice", help="'e8' (default) or a JSON Gram matrix file")
    p.add_argument("--c", help="theta coefficient matrix c as JSON (default e_1)")
    p.add_argument("--index", help="Eisenstein index M (default identity)")
    p.add_argument("--form", choices=["theta-e8", "eisenstein"], default="theta-e8")
    p.add_argument("--Z", action="append", help="point of H_n, e.g. 'i' or '0.3+1.1i' (repeatable)")
    p.add_argument("--W", help="point of C^(m,n): scalar, JSON file or inline JSON")
    p.add_argument("--radius", type=float, help="theta lattice radius (default: automatic)")
    p.add_argument("--eps", type=float, help="theta tail tolerance (default 1e-9)")
    p.add_argument("--cmax", type=int, help="Eisenstein coset height bound")
    p.add_argument("--lmax", type=int, help="Eisenstein lambda box bound")
    p.add_argument("--tol", type=float, help="verification tolerance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, help="number of random trials or words")
    p.add_argument("--out", help="write JSON here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jacobilift", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    pb = sub.add_parser("basis", help="pluriharmonic basis")
    _common(pb)
    pt = sub.add_parser("theta", help="evaluate a lattice theta series")
    _common(pt)
    pv = sub.add_parser("verify", help="run a verification")
    pv.add_argument("subtest", choices=sorted(VERIFIERS))
    _common(pv)
    pv.add_argument("--weight-off-by-one", action="store_true",
                    help="negative control: perturb the weight by one")
    pv.add_argument("--direct", action="store_true",
                    help="identity-II: sum both sides over the same truncated coset set")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"basis": cmd_basis, "theta": cmd_theta, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except TruncationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRUNC
    except (JacobiLiftError, InputError, ValueError, TypeError, KeyError,
            OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
