"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 unreadable or
invalid input, 3 the weight A is not Hermitian positive semidefinite (or is
zero). Reports go to stdout, diagnostics to stderr.
"""

import argparse
import json
import sys
from dataclasses import fields

import numpy as np

from . import __version__
from .classify import PREDICATES, classify_full
from .errors import NotAdjointable, NotFiniteError, NotHermitian, NotPositive, ShapeError, ZeroOperator
from .io import (
    SCHEMA_VERSION,
    ProblemError,
    analysis_to_dict,
    encode_matrix,
    encode_value,
    load_problem,
)
from .numerics import DEFAULT_CONFIG, ToleranceConfig
from .radii import INFINITE, a_joint_spectral_radius, analyze
from .semispace import make_context
from .verify import DEMOS, FAMILIES, EnsembleSpec, paper_registry, verify_ensemble, verify_instance

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_WEIGHT = 0, 1, 2, 3

_PREDICATE_REFS = {
    "a_selfadjoint": "AT Hermitian",
    "a_positive": "AT >= 0",
    "a_normal": "[T#, T] = 0",
    "a_hyponormal": "T*AT - T#*AT# >= 0",
    "a_paranormal": "||Tx||_A^2 <= ||T^2 x||_A",
    "a_normaloid": "r_A = ||T||_A",
    "a_spectraloid": "r_A = omega_A",
}


class _InputError(Exception):
    pass


def _fmt(x):
    if x is INFINITE:
        return "inf"
    if x is None:
        return "n/a"
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _fmt_matrix(M, indent="  "):
    lines = []
    for row in np.asarray(M):
        cells = []
        for z in row:
            z = complex(z)
            cells.append(f"{z.real:.6g}" if abs(z.imag) < 1e-15 else f"{z.real:.6g}{z.imag:+.6g}j")
        lines.append(indent + "[" + ", ".join(f"{c:>12}" for c in cells) + "]")
    return "\n".join(lines)


def _emit(args, doc, text):
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print(text)


def _config(args, problem=None):
    cfg = problem.config() if problem is not None else DEFAULT_CONFIG
    overrides = {f.name: getattr(args, "tol_" + f.name) for f in fields(ToleranceConfig)}
    try:
        return cfg.with_overrides(**overrides)
    except (TypeError, ValueError) as exc:
        raise _InputError(f"invalid tolerance override: {exc}")


def _load(args):
    problem = load_problem(args.file)
    cfg = _config(args, problem)
    return problem, make_context(problem.A, cfg)


def _require_T(problem):
    if problem.T is None:
        raise _InputError("this command needs a single operator under key 'T'")
    return problem.T


def cmd_analyze(args):
    problem, ctx = _load(args)
    report = analyze(ctx, _require_T(problem), trace_n=args.n_max if args.trace else 0)
    doc = analysis_to_dict(report)
    lines = [f"dim: {report.dim}   rank(A): {report.rank}   member: {_fmt(report.member)}"]
    lines.append(f"||T||_A:      {_fmt(report.a_norm)}")
    if not report.member:
        lines.append("omega_A: inf (T does not leave N(A) invariant; W_A(T) = C)")
    else:
        lines += [
            f"omega_A:      {_fmt(report.a_numerical_radius)}",
            f"r_A:          {_fmt(report.a_spectral_radius)}",
            f"omega_max^A:  {_fmt(report.omega_max)}",
            f"kittaneh:     {_fmt(report.kittaneh_bound)}",
            "T#:",
            _fmt_matrix(report.sharp),
        ]
    if report.gelfand is not None:
        lines.append("gelfand ||T^n||_A^(1/n):")
        lines += [f"  {n:>6}  {v:.12g}" for n, v in report.gelfand.estimates]
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def cmd_classify(args):
    problem, ctx = _load(args)
    result = classify_full(ctx, _require_T(problem))
    doc = {"schema_version": SCHEMA_VERSION, "kind": "classification", **result.as_dict()}
    doc["witnesses"] = {k: float(v) for k, v in result.witnesses.items()}
    lines = [f"member: {_fmt(result.member)}"]
    if result.omega_infinite:
        lines.append("omega_A: inf (T does not leave N(A) invariant)")
    for name in PREDICATES:
        value = getattr(result, name)
        line = f"{name + ':':16} {_fmt(value) if value is not None else 'not applicable'}"
        if args.explain and name in result.witnesses:
            line += f"   witness {result.witnesses[name]: .3e}   ({_PREDICATE_REFS[name]})"
        lines.append(line)
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def _parse_dims(text):
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a..b' or a single integer, got {text!r}")


def cmd_verify(args):
    if args.file:
        problem, ctx = _load(args)
        report = verify_instance(ctx, _require_T(problem), args.file)
    else:
        cfg = _config(args)
        try:
            spec = EnsembleSpec(args.family, args.samples, args.dims, args.rank, args.seed)
        except ValueError as exc:
            raise _InputError(str(exc))
        report = verify_ensemble(spec, cfg)
    doc = {"schema_version": SCHEMA_VERSION, "kind": "verification", "digest": report.digest(), **report.as_dict()}
    lines = [
        f"{report.instance_id}: samples {report.samples}, failures {report.failures}, "
        f"worst slack {report.worst_slack:.3e}"
    ]
    for c in report.checks:
        status = "ok  " if c.passed else "FAIL"
        lines.append(f"  {status} {c.name:28} lhs {c.lhs: .10g}  rhs {c.rhs: .10g}  slack {c.slack: .3e}")
    lines += [f"  note: {n}" for n in report.notes]
    lines.append(f"digest: {report.digest()}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_jsr(args):
    problem, ctx = _load(args)
    ops = problem.operators or [problem.T]
    n_max = 2**args.depth if args.depth is not None else None
    trace = a_joint_spectral_radius(ctx, ops, n_max=n_max)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "jsr",
        "operators": len(ops),
        "estimates": [[n, float(v)] for n, v in trace.estimates],
        "converged": trace.converged,
        "final": float(trace.final),
    }
    lines = [f"operators: {len(ops)}", "n        estimate"]
    lines += [f"{n:<8} {v:.12g}" for n, v in trace.estimates]
    lines.append(f"r_A(T): {trace.final:.12g}{'' if trace.converged else '  (not converged)'}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def _cert_json(certs):
    return {k: encode_value(v) if v is INFINITE else v for k, v in certs.items()}


def cmd_demo(args):
    registry = {e.name: e for e in paper_registry()}
    if args.name == "list":
        doc = {"demos": sorted(DEMOS), "registry": list(registry)}
        text = "demos:\n" + "\n".join(f"  {n}" for n in sorted(DEMOS))
        text += "\nregistry:\n" + "\n".join(f"  {e.name:28} {e.tag}" for e in registry.values())
        _emit(args, doc, text)
        return EXIT_OK
    if args.name == "ex01":
        pair = DEMOS["ex01"](args.half_n)
    elif args.name == "shift-z":
        pair = DEMOS["shift-z"](args.n_max, seed=args.seed)
    elif args.name in registry:
        e = registry[args.name]
        doc = {
            "name": e.name,
            "A": encode_matrix(e.A),
            "T": encode_matrix(e.T),
            "expected": {
                k: encode_matrix(v) if isinstance(v, np.ndarray) else encode_value(v) if v is INFINITE else v
                for k, v in e.expected.items()
            },
        }
        text = f"{e.name}: {e.tag}\nA:\n{_fmt_matrix(e.A)}\nT:\n{_fmt_matrix(e.T)}\nexpected:\n"
        text += "\n".join(
            f"  {k}:\n{_fmt_matrix(v, '    ')}" if isinstance(v, np.ndarray) else f"  {k}: {_fmt(v)}"
            for k, v in e.expected.items()
        )
        if e.notes:
            text += f"\nnote: {e.notes}"
        _emit(args, doc, text)
        return EXIT_OK
    else:
        raise _InputError(f"unknown demo {args.name!r}; try 'semiop demo list'")
    doc = {
        "name": pair.name,
        "dim": pair.A.shape[0],
        "columns": list(pair.columns),
        "table": [list(r) for r in pair.table],
        "certificates": _cert_json(pair.certificates),
    }
    text = [f"{pair.name}: dim {pair.A.shape[0]}", "  ".join(f"{c:>14}" for c in pair.columns)]
    text += ["  ".join(f"{_fmt(v):>14}" for v in row) for row in pair.table]
    text += [f"{k}: {_fmt(v)}" for k, v in pair.certificates.items() if k != "growth_ratios"]
    _emit(args, doc, "\n".join(text))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="semiop", description="Operators on semi-Hilbertian spaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    tol = common.add_argument_group("tolerance overrides")
    for f in fields(ToleranceConfig):
        kind = int if f.name in ("theta_grid", "lambda_grid", "max_squarings", "jsr_depth") else float
        tol.add_argument("--tol-" + f.name.replace("_", "-"), dest="tol_" + f.name, type=kind, default=None)

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="radii, seminorm and A-adjoint")
    p.add_argument("file")
    p.add_argument("--trace", action="store_true", help="print the Gelfand sequence")
    p.add_argument("--n-max", type=int, default=32, help="length of the traced sequence")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("classify", parents=[common], help="operator-class predicates")
    p.add_argument("file")
    p.add_argument("--explain", action="store_true", help="print witnesses")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", parents=[common], help="check radius inequalities")
    p.add_argument("file", nargs="?")
    p.add_argument("--family", choices=FAMILIES, default="generic")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--dims", type=_parse_dims, default=(2, 6), metavar="A..B")
    p.add_argument("--rank", default="mixed", type=lambda s: int(s) if s.isdigit() else s)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("jsr", parents=[common], help="A-joint spectral radius")
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=None, help="use word length 2**depth")
    p.set_defaults(func=cmd_jsr)

    p = sub.add_parser("demo", parents=[common], help="truncated examples and worked examples")
    p.add_argument("name", help="'list', a demo name or a registry name")
    p.add_argument("--half-n", type=int, default=6)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NotHermitian, NotPositive, ZeroOperator) as exc:
        print(f"semiop: invalid weight A: {exc}", file=sys.stderr)
        return EXIT_WEIGHT
    except (ProblemError, _InputError, ShapeError, NotFiniteError, NotAdjointable, ValueError) as exc:
        print(f"semiop: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
