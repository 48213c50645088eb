"""Command-line front end.  Data goes to stdout as JSON, diagnostics to stderr.

Exit codes: 0 success or true verdict, 1 negative verdict, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import field as F
from .bimodule import (
    ModuleFormatError,
    ValidationError,
    load,
    random_interval_decomposable,
    random_module,
    random_rectangle_decomposable,
    to_dict,
    validate,
)
from .decomposer import (
    CLASSES,
    CertificationError,
    NotWeaklyExact,
    decompose_rectangles,
    interval_decompose,
    local_condition_check,
    strong_exact,
    weak_exact,
)
from .filtration import check_skeleton, t_skeleton
from .gallery import HookSpec, big_hook_spec, hook_counterexample, psi
from .shapes import INTERVAL_ENUM_LIMIT, ShapeError
from .suites import SUITES, run_suite

log = logging.getLogger("rectdecomp")

OK, NEGATIVE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(doc):
    json.dump(doc, sys.stdout, indent=None, sort_keys=False)
    sys.stdout.write("\n")


def _shape(text: str) -> tuple[int, int]:
    try:
        nx, ny = (int(v) for v in text.lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"shape must look like 3x4, got {text!r}") from exc
    if nx < 1 or ny < 1:
        raise argparse.ArgumentTypeError("shape sides must be positive")
    return nx, ny


def _point(text: str) -> tuple[int, int]:
    try:
        x, y = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"point must look like 2,3, got {text!r}") from exc
    return x, y


def _prime(text: str) -> int:
    p = int(text)
    if not F.is_prime(p) or p >= F.MAX_PRIME:
        raise argparse.ArgumentTypeError(f"{p} is not a supported prime")
    return p


def _read_module(args):
    text = Path(args.input).read_text() if args.input else sys.stdin.read()
    return load(text)


def _write(args, doc):
    if getattr(args, "out", None):
        Path(args.out).write_text(json.dumps(doc) + "\n")
    else:
        _emit(doc)


# subcommands


def cmd_gen(args) -> int:
    truth = None
    if args.kind == "psi":
        m = psi(args.m, args.p)
    elif args.kind == "hook":
        kw = {"transpose": args.transpose, "dual": args.dual}
        m = hook_counterexample(big_hook_spec(**kw) if args.big else HookSpec(**kw), args.p)
    elif args.kind == "random":
        m = random_module(*args.shape, p=args.p, max_dim=args.max_dim, seed=args.seed)
    elif args.kind == "rect-sum":
        m, truth = random_rectangle_decomposable(*args.shape, p=args.p, count=args.count, seed=args.seed)
    else:
        if args.shape[0] * args.shape[1] > INTERVAL_ENUM_LIMIT:
            raise UsageError(f"interval sums are limited to {INTERVAL_ENUM_LIMIT} grid points")
        m, truth = random_interval_decomposable(*args.shape, p=args.p, count=args.count, seed=args.seed)
    _write(args, to_dict(m))
    if truth is not None:
        doc = {"summands": [{"shape": s.literal(), "multiplicity": k}
                            for s, k in sorted(truth.items(), key=lambda kv: (-len(kv[0].cells), sorted(kv[0].cells)))]}
        path = args.truth or (f"{args.out}.truth.json" if args.out else None)
        if path:
            Path(path).write_text(json.dumps(doc) + "\n")
            log.info("ground truth written to %s", path)
    return OK


def cmd_validate(args) -> int:
    try:
        m = _read_module(args)
    except ValidationError as exc:
        where = list(exc.where) if isinstance(exc.where, tuple) else exc.where
        _emit({"valid": False, "message": str(exc), "where": where})
        return NEGATIVE
    rep = validate(m)
    _emit({"valid": rep.ok, "message": rep.message, "where": list(rep.where) if rep.where else None,
           "p": m.p, "nx": m.nx, "ny": m.ny, "total_dim": m.total_dim()})
    return OK if rep.ok else NEGATIVE


def cmd_check(args) -> int:
    m = _read_module(args)
    if args.local:
        rep = local_condition_check(m, args.local)
        _emit({"check": "local", "class": args.local, **rep.to_dict()})
    else:
        kind = "strong" if args.strong else "weak"
        rep = strong_exact(m) if args.strong else weak_exact(m)
        _emit({"check": kind, **rep.to_dict()})
    return OK if rep.verdict else NEGATIVE


def cmd_decompose(args) -> int:
    m = _read_module(args)
    try:
        dec = decompose_rectangles(m, certify=args.certify)
    except NotWeaklyExact as exc:
        _emit({"kind": "rectangle", "weakly_exact": False, "witness": exc.witness.to_dict()})
        log.error("%s", exc.witness)
        return NEGATIVE
    except CertificationError as exc:
        _emit({"kind": "rectangle", "certified": False, "error": str(exc)})
        return NEGATIVE
    _emit(dec.to_dict())
    return OK


def cmd_oracle(args) -> int:
    m = _read_module(args)
    if m.nx * m.ny > INTERVAL_ENUM_LIMIT:
        raise UsageError(f"oracle is limited to grids of at most {INTERVAL_ENUM_LIMIT} points")
    dec = interval_decompose(m)
    if dec is None:
        _emit({"kind": "interval", "interval_decomposable": False, "message": "NOT interval-decomposable"})
        return NEGATIVE
    _emit({"interval_decomposable": True, **dec.to_dict()})
    return OK


def cmd_skeleton(args) -> int:
    m = _read_module(args)
    t = args.point
    if not (1 <= t[0] <= m.nx and 1 <= t[1] <= m.ny):
        raise UsageError(f"point {t} lies outside the {m.nx}x{m.ny} grid")
    sk = t_skeleton(m, t)
    doc = sk.to_dict()
    if weak_exact(m).verdict:
        res = check_skeleton(m, sk, lift=True)
    else:
        res = check_skeleton(m, sk, lift=False)
    doc.update({"checked": res.ok, "failures": res.failures})
    _emit(doc)
    return OK if res.ok else NEGATIVE


def cmd_verify(args) -> int:
    numbers = sorted(SUITES) if args.all or not args.suite else sorted(set(args.suite))
    reports = []
    for n in numbers:
        rep = run_suite(n, seed=args.seed)
        status = "PASS" if rep.ok else "FAIL"
        print(f"criterion {n} {SUITES[n][0]}: {status} ({rep.meta['seconds']:.1f}s)", file=sys.stderr)
        for label, detail in rep.failures():
            print(f"    failed: {label} {detail}", file=sys.stderr)
        reports.append({"criterion": n, **rep.to_dict(), "seconds": rep.meta["seconds"]})
    ok = all(r["ok"] for r in reports)
    _emit({"seed": args.seed, "ok": ok, "suites": reports})
    return OK if ok else NEGATIVE


# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rectdecomp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_input(p):
        p.add_argument("--in", dest="input", metavar="FILE", help="module JSON (default: stdin)")
        return p

    g = sub.add_parser("gen", help="generate a module")
    g.add_argument("kind", choices=("psi", "hook", "random", "rect-sum", "interval-sum"))
    g.add_argument("--m", type=int, default=2, help="size parameter of psi")
    g.add_argument("--shape", type=_shape, default=(3, 3), metavar="NXxNY")
    g.add_argument("--p", type=_prime, default=2, metavar="PRIME")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=3, help="number of summands for sums")
    g.add_argument("--max-dim", type=int, default=3, help="dimension bound for random modules")
    g.add_argument("--big", action="store_true", help="hook instance realizing every square pattern")
    g.add_argument("--transpose", action="store_true")
    g.add_argument("--dual", action="store_true")
    g.add_argument("--out", metavar="FILE")
    g.add_argument("--truth", metavar="FILE", help="ground-truth path (default: <out>.truth.json)")
    g.set_defaults(func=cmd_gen)

    with_input(sub.add_parser("validate", help="parse and validate a module")).set_defaults(func=cmd_validate)

    c = with_input(sub.add_parser("check", help="exactness or local condition verdict"))
    mode = c.add_mutually_exclusive_group()
    mode.add_argument("--weak", action="store_true", help="weak exactness (default)")
    mode.add_argument("--strong", action="store_true", help="strong exactness")
    mode.add_argument("--local", choices=CLASSES, metavar="CLASS",
                      help=f"square restrictions split into the class: {', '.join(CLASSES)}")
    c.set_defaults(func=cmd_check)

    d = with_input(sub.add_parser("decompose", help="rectangle decomposition"))
    d.add_argument("--certify", action="store_true", help="emit a verified isomorphism")
    d.set_defaults(func=cmd_decompose)

    with_input(sub.add_parser("oracle", help="interval decomposition by peeling")).set_defaults(func=cmd_oracle)

    s = with_input(sub.add_parser("skeleton", help="index sets realizing kernels and images at a point"))
    s.add_argument("--point", type=_point, required=True, metavar="X,Y")
    s.set_defaults(func=cmd_skeleton)

    v = sub.add_parser("verify", help="run acceptance suites")
    v.add_argument("--all", action="store_true", help="run every suite (default)")
    v.add_argument("--suite", type=int, action="append", choices=sorted(SUITES))
    v.add_argument("--seed", type=int, required=True)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ModuleFormatError, ValidationError, UsageError, ShapeError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
