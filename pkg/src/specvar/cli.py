"""Command-line surface.

Subcommands expose the main computations on matrices read from text files
and run the verification suites with machine-readable JSON reports.  Exit
codes: 0 success, 1 failed verification, 2 unreadable input, 3 numerical
failure, 4 unknown oracle name, 5 unconverged iteration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__, invariants, majorize, matio, oracle, varcalc, verify
from . import systems as sy
from .errors import (
    InvalidData,
    InvalidParam,
    InvalidShape,
    NotDifferentiable,
    NumericalFailure,
    SpecvarError,
    Unconverged,
    UnknownOracle,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERIC = 3
EXIT_UNKNOWN_ORACLE = 4
EXIT_UNCONVERGED = 5


def _default_seed() -> int:
    try:
        return int(os.environ.get("SPECVAR_SEED", "0"))
    except ValueError:
        return 0


def _load_ambient(args):
    M = matio.read_matrix(args.infile)
    name = args.system.strip().lower()
    if name.startswith("product:"):
        inner = sy.parse_system(name[len("product:"):], shape=_payload_shape(name, M))
        X = _coerce(inner, M)
        return sy.product_lift(inner), (X, float(args.xi))
    kind = sy.parse_system(name, shape=_payload_shape(name, M))
    return kind, _coerce(kind, M)


def _payload_shape(name, M):
    base = name.split(":")[0]
    if base in ("trivial", "trivial-norm"):
        return (M.size,)
    return M.shape


def _coerce(kind, M):
    if isinstance(kind, sy.TrivialNormSystem):
        return M.reshape(-1)
    return M


def _function_oracle(spec, kind):
    name, params = invariants.parse_oracle_spec(spec)
    return invariants.builtin_function(name, for_kind=kind, **params)


def _set_oracle(spec, kind):
    name, params = invariants.parse_oracle_spec(spec)
    return invariants.builtin_set(name, for_kind=kind, **params)


def _emit(payload) -> None:
    print(matio.dumps(payload))


def cmd_spectrum(args) -> int:
    kind, X = _load_ambient(args)
    print(json.dumps([float(v) for v in sy.spectrum(kind, X)]))
    return EXIT_OK


def cmd_grad(args) -> int:
    kind, X = _load_ambient(args)
    f = _function_oracle(args.function, kind)
    G = varcalc.spectral_gradient(f, kind, X)
    fd = varcalc.ambient_fd_gradient(f, kind, X)
    _emit({
        "system": kind.name,
        "function": f.name,
        "gradient": matio.ambient_to_json(G),
        "fd_agreement": sy.anorm(sy.asub(G, fd)) / (1.0 + sy.anorm(G)),
    })
    return EXIT_OK


def cmd_subdiff(args) -> int:
    kind, X = _load_ambient(args)
    f = _function_oracle(args.function, kind)
    rng = np.random.default_rng(args.seed)
    if args.flavor == "limiting":
        ws = varcalc.limiting_subdifferential(f, kind, X, samples=args.samples, rng=rng)
    else:
        ws = varcalc.frechet_subdifferential(f, kind, X, samples=args.samples, rng=rng)
    checks = []
    for w in ws[: min(len(ws), 8)]:
        if args.flavor == "frechet":
            v = varcalc.ambient_frechet_test(f, kind, X, w.vector, rng=rng)
            checks.append({"passed": bool(v.passed), "estimate": v.estimate})
    _emit({
        "system": kind.name,
        "function": f.name,
        "flavor": args.flavor,
        "witnesses": [matio.witness_to_json(w) for w in ws],
        "definition_checks": checks,
    })
    return EXIT_OK


def cmd_clarke(args) -> int:
    kind, X = _load_ambient(args)
    f = _function_oracle(args.function, kind)
    rng = np.random.default_rng(args.seed)
    est = varcalc.clarke_subdifferential(f, kind, X, samples_per_radius=args.samples,
                                         rng=rng)
    gap = varcalc.support_gap(est.formula, est.definition, kind, rng=rng)
    _emit({
        "system": kind.name,
        "function": f.name,
        "formula_points": len(est.formula.points),
        "definition_points": len(est.definition.points),
        "support_gap": gap,
        "formula_sample": [matio.ambient_to_json(p) for p in est.formula.points[:4]],
    })
    return EXIT_OK


def cmd_project(args) -> int:
    kind, X = _load_ambient(args)
    D = _set_oracle(args.set, kind)
    rng = np.random.default_rng(args.seed)
    pts = varcalc.spectral_project(D, kind, X, count=args.samples, rng=rng)
    dist = varcalc.spectral_distance(D, kind, X)
    residual = max(abs(sy.anorm(sy.asub(X, P)) - dist) for P in pts)
    _emit({
        "system": kind.name,
        "set": D.name,
        "distance": dist,
        "projections": [matio.ambient_to_json(p) for p in pts],
        "residual_check": residual,
    })
    return EXIT_OK


def cmd_normal(args) -> int:
    kind, X = _load_ambient(args)
    D = _set_oracle(args.set, kind)
    rng = np.random.default_rng(args.seed)
    ws = varcalc.spectral_normal_cone_elements(D, kind, X, count=args.samples, rng=rng)
    results = []
    for w in ws:
        if sy.anorm(w.vector) == 0.0:
            results.append({"witness": matio.witness_to_json(w), "estimate": 0.0,
                            "passed": True})
            continue
        v = varcalc.ambient_normal_membership(D, kind, X, w.vector)
        results.append({"witness": matio.witness_to_json(w), "estimate": v.estimate,
                        "passed": bool(v.passed)})
    _emit({"system": kind.name, "set": D.name, "normals": results})
    return EXIT_OK


def cmd_lidskii(args) -> int:
    rng = np.random.default_rng(args.seed)
    kind = sy.parse_system(args.system, shape=(args.n, args.n))
    worst = 0.0
    all_pass = True
    for _ in range(args.trials):
        X = kind.validate(kind.random_ambient(rng))
        Y = kind.validate(kind.random_ambient(rng))
        rep = majorize.lidskii_check(kind, X, Y, tol=args.tol)
        worst = max(worst, rep.distance)
        all_pass = all_pass and rep.passed and rep.agree in (True, None)
    _emit({
        "system": kind.name,
        "trials": args.trials,
        "max_distance": worst,
        "tolerance": args.tol,
        "pass": all_pass,
    })
    return EXIT_OK if all_pass else EXIT_VERIFY_FAILED


def cmd_verify(args) -> int:
    report = verify.run_suite(args.suite, trials=args.trials, seed=args.seed)
    text = matio.dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK if report["pass"] else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="specvar",
                                description="spectral variational analysis toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, with_input=True):
        sp.add_argument("--system", required=True,
                        help="eigsym[:N] | svd[:MxN] | signed-svd[:N] | trivial[:N] | product:<inner>")
        if with_input:
            sp.add_argument("--in", dest="infile", required=True, help="matrix text file")
            sp.add_argument("--xi", type=float, default=0.0,
                            help="scalar slot for product systems")
        sp.add_argument("--seed", type=int, default=_default_seed())

    sp = sub.add_parser("spectrum", help="ordered spectrum of an ambient point")
    add_common(sp)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("grad", help="gradient of a lifted function")
    add_common(sp)
    sp.add_argument("--f", dest="function", required=True)
    sp.set_defaults(func=cmd_grad)

    sp = sub.add_parser("subdiff", help="sampled subdifferential of a lifted function")
    add_common(sp)
    sp.add_argument("--f", dest="function", required=True)
    sp.add_argument("--flavor", choices=("frechet", "limiting"), default="frechet")
    sp.add_argument("--samples", type=int, default=4)
    sp.set_defaults(func=cmd_subdiff)

    sp = sub.add_parser("clarke", help="two-sided Clarke estimate")
    add_common(sp)
    sp.add_argument("--f", dest="function", required=True)
    sp.add_argument("--samples", type=int, default=64)
    sp.set_defaults(func=cmd_clarke)

    sp = sub.add_parser("project", help="projection onto a lifted set")
    add_common(sp)
    sp.add_argument("--set", dest="set", required=True)
    sp.add_argument("--samples", type=int, default=2)
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("normal", help="normal-cone elements of a lifted set")
    add_common(sp)
    sp.add_argument("--set", dest="set", required=True)
    sp.add_argument("--samples", type=int, default=2)
    sp.set_defaults(func=cmd_normal)

    sp = sub.add_parser("lidskii", help="additive-perturbation hull check on random pairs")
    add_common(sp, with_input=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--tol", type=float, default=1e-7)
    sp.set_defaults(func=cmd_lidskii)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", default="all",
                    choices=sorted(verify.SUITES) + ["all"])
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--seed", type=int, default=_default_seed())
    sp.add_argument("--out", default=None, help="write the JSON report here")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidData, InvalidShape, OSError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return EXIT_BAD_INPUT
    except UnknownOracle as exc:
        print("unknown oracle: %s" % exc, file=sys.stderr)
        return EXIT_UNKNOWN_ORACLE
    except Unconverged as exc:
        print("unconverged: %s" % exc, file=sys.stderr)
        if exc.partial is not None:
            print(json.dumps({"partial_distance": exc.partial.distance}))
        return EXIT_UNCONVERGED
    except (NumericalFailure, NotDifferentiable) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    except InvalidParam as exc:
        print("bad parameter: %s" % exc, file=sys.stderr)
        return EXIT_BAD_INPUT
    except SpecvarError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
