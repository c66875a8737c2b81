"""Command line front end and the runnable verification suites."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from .algebra import scalar_part, symmetrization
from .branches import mu, mu_inv, nu
from .domain import BasicDomainSpec
from .errors import (
    BranchDomainViolation,
    ClassificationError,
    ConditionFailed,
    DomainError,
    ExprError,
    ExprSyntaxError,
    LiftError,
    NoConvergence,
    NoGlobalLogWitness,
    ResidualRejected,
    StarlogError,
    Vanishing,
)
from .expr import Neg, StarMul, StarSeries, eval_many, stem_complex, evaluate
from .logarithm import RESIDUAL_ACCEPT, BranchSpec, check_conditions, log_star
from .parse import parse_expr, to_source
from .quaternion import VERIFY_UNITS, format_quaternion, parse_quaternion
from .starexp import exp_star
from .vectorial import classify_vectorial

EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_CONDITION = 4
EXIT_LIFT = 5
EXIT_RESIDUAL = 6

IDENTITY_TOL = 1e-10
COVERING_TOL = 1e-11

CSV_HEADER = ["x", "y", "Ix", "Iy", "Iz", "w_re", "w_i", "w_j", "w_k"]

# star-exponential identity corpus; unit-function entries are appended on
# product domains only
EXP_CORPUS = [
    "q",
    "0.3*q^2 + 0.1",
    "q*i",
    "(0.5 + 0.25*q^2)*j",
    "0.2*q*i + 0.3*q*j",
    "0.1*q^2*k + 0.2*q*i",
    "1.0 + 0.5*q*k",
    "conj(0.3*q)*i + 0.1",
    "vect(q*i + 0.2)",
    "0.25*q^2*i - 0.5*q*j",
]
EXP_CORPUS_PRODUCT = [
    "I*i + j",
    "q + I*i + j",
]


def exit_code_for(err: StarlogError) -> int:
    if isinstance(err, (ExprSyntaxError, ExprError)):
        return EXIT_PARSE
    if isinstance(err, (DomainError, BranchDomainViolation)):
        return EXIT_DOMAIN
    if isinstance(err, (ConditionFailed, Vanishing, ClassificationError)):
        return EXIT_CONDITION
    if isinstance(err, (LiftError, NoConvergence, NoGlobalLogWitness)):
        return EXIT_LIFT
    if isinstance(err, ResidualRejected):
        return EXIT_RESIDUAL
    return 1


class Report:
    """Check rows with a stable key set, printed as they are produced."""

    def __init__(self):
        self.rows = []

    def add(self, check, status, residual=None, grid=0, slices=0, seconds=0.0):
        row = {
            "check": check,
            "status": status,
            "residual": None if residual is None else float(residual),
            "grid": int(grid),
            "slices": int(slices),
            "seconds": round(float(seconds), 6),
        }
        self.rows.append(row)
        tag = status.split(":", 1)[0].upper()
        res = "" if row["residual"] is None else f"  residual={row['residual']:.3e}"
        print(
            f"[{tag}] {check}{res}  "
            f"({row['grid']} nodes, {row['slices']} slices, {row['seconds']:.3f}s)"
        )

    @property
    def failed(self) -> bool:
        return any(r["status"].split(":")[0] in ("fail", "error") for r in self.rows)

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.rows, fh, indent=2)
            fh.write("\n")


# ---------------------------------------------------------------------------
# shared helpers


def _load_domain(path: str) -> BasicDomainSpec:
    try:
        spec = BasicDomainSpec.load(path)
    except OSError as err:
        raise DomainError(f"cannot read domain file: {err}")
    except (KeyError, TypeError, ValueError) as err:
        raise DomainError(f"bad domain file {path!r}: {err}")
    spec.validate(strict=True)
    return spec


def _branch_arg(text: str) -> BranchSpec:
    try:
        m_txt, n_txt = text.split(",")
        return BranchSpec(int(m_txt), int(n_txt))
    except (ValueError, ConditionFailed) as err:
        raise argparse.ArgumentTypeError(f"branch must be 'm,n' with integers: {err}")


def _sup_rel(got: np.ndarray, want: np.ndarray) -> float:
    num = np.linalg.norm(got - want, axis=-1)
    den = 1.0 + np.linalg.norm(want, axis=-1)
    return float((num / den).max())


def _write_grid_csv(path, expr, domain: BasicDomainSpec) -> int:
    zs = domain.node_z
    count = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for unit in VERIFY_UNITS:
            vals = eval_many(expr, zs, unit)
            for z, v in zip(zs, vals):
                writer.writerow(
                    [z.real, z.imag, unit.x, unit.y, unit.z, v[0], v[1], v[2], v[3]]
                )
                count += 1
    return count


# ---------------------------------------------------------------------------
# subcommands


def _cmd_eval(args, report: Report) -> int:
    start = time.perf_counter()
    tree = parse_expr(args.expr)
    try:
        point = parse_quaternion(args.at)
    except ValueError as err:
        raise ExprSyntaxError(str(err), 0)
    value = evaluate(tree, point)
    print(format_quaternion(value))
    report.add("eval", "pass", grid=1, slices=1, seconds=time.perf_counter() - start)
    return 0


def _cmd_classify(args, report: Report) -> int:
    start = time.perf_counter()
    tree = parse_expr(args.expr)
    domain = _load_domain(args.domain)
    shape = classify_vectorial(tree, domain)
    print(f"vectorial class: {shape.kind}")
    for zero in shape.zeros:
        where = "" if zero.location is None else f" at {format_quaternion(zero.location)}"
        print(
            f"  zero sphere z={zero.z:.6g} multiplicity={zero.multiplicity}"
            f" kind={zero.kind}{where}"
        )
    summary = check_conditions(tree, domain)
    print(f"min |g| on grid: {summary.min_abs:.6e} (scale {summary.scale:.6e})")
    if summary.cond_positive_trace is not None:
        print(f"positive trace: {summary.cond_positive_trace}")
        print(f"root trace avoids the slit: {summary.cond_slit_avoided}")
    report.add(
        f"classify:{shape.kind}",
        "pass",
        grid=domain.n_nodes,
        slices=len(VERIFY_UNITS),
        seconds=time.perf_counter() - start,
    )
    return 0


def _cmd_exp_star(args, report: Report) -> int:
    start = time.perf_counter()
    tree = parse_expr(args.expr)
    domain = _load_domain(args.domain)
    image = exp_star(tree)
    sup = 0.0
    for unit in VERIFY_UNITS:
        vals = eval_many(image, domain.node_z, unit)
        sup = max(sup, float(np.linalg.norm(vals, axis=1).max()))
    print(f"sup |exp_star| on grid: {sup:.6e}")
    if args.grid_out:
        count = _write_grid_csv(args.grid_out, image, domain)
        print(f"wrote {count} samples to {args.grid_out}")
    report.add(
        "exp-star",
        "pass",
        grid=domain.n_nodes,
        slices=len(VERIFY_UNITS),
        seconds=time.perf_counter() - start,
    )
    return 0


def _cmd_log_star(args, report: Report) -> int:
    start = time.perf_counter()
    tree = parse_expr(args.expr)
    domain = _load_domain(args.domain)
    rep = parse_expr(args.rep) if args.rep else None
    result = log_star(tree, domain, args.branch, rep=rep)
    print(f"case: {result.case}")
    print(f"branch: m={result.branch.m}, n={result.branch.n}")
    print(f"residual: {result.residual:.3e}")
    if args.grid_out:
        count = _write_grid_csv(args.grid_out, result.f, domain)
        print(f"wrote {count} samples to {args.grid_out}")
    report.add(
        f"log-star:{result.case}",
        "pass",
        residual=result.residual,
        grid=domain.n_nodes,
        slices=len(VERIFY_UNITS),
        seconds=time.perf_counter() - start,
    )
    return 0


def _cmd_roundtrip(args, report: Report) -> int:
    start = time.perf_counter()
    tree = parse_expr(args.expr)
    printed = to_source(tree)
    again = parse_expr(printed)
    ok = again == tree and to_source(again) == printed
    print(printed)
    report.add(
        "roundtrip", "pass" if ok else "fail", seconds=time.perf_counter() - start
    )
    return 0 if ok else EXIT_PARSE


def _cmd_verify(args, report: Report) -> int:
    domain = _load_domain(args.domain)
    names = ("exp", "log", "mu") if args.suite == "all" else (args.suite,)
    for name in names:
        _SUITES[name](domain, report)
    return EXIT_RESIDUAL if report.failed else 0


# ---------------------------------------------------------------------------
# verification suites


def _suite_exp(domain: BasicDomainSpec, report: Report) -> None:
    corpus = list(EXP_CORPUS)
    if domain.kind == "product":
        corpus += EXP_CORPUS_PRODUCT
    zs = domain.node_z
    slices = len(VERIFY_UNITS)
    for src in corpus:
        f = parse_expr(src)
        closed = exp_star(f)

        start = time.perf_counter()
        series = StarSeries("exp", f)
        worst = 0.0
        for unit in VERIFY_UNITS:
            worst = max(
                worst, _sup_rel(eval_many(series, zs, unit), eval_many(closed, zs, unit))
            )
        report.add(
            f"exp-series[{src}]",
            "pass" if worst <= IDENTITY_TOL else "fail",
            worst,
            zs.size,
            slices,
            time.perf_counter() - start,
        )

        start = time.perf_counter()
        inverse = StarMul(closed, exp_star(Neg(f)))
        worst = 0.0
        for unit in VERIFY_UNITS:
            vals = eval_many(inverse, zs, unit)
            one = np.zeros_like(vals)
            one[:, 0] = 1.0
            worst = max(worst, _sup_rel(vals, one))
        report.add(
            f"exp-inverse[{src}]",
            "pass" if worst <= IDENTITY_TOL else "fail",
            worst,
            zs.size,
            slices,
            time.perf_counter() - start,
        )

        start = time.perf_counter()
        sym = stem_complex(symmetrization(closed), zs)
        target = np.exp(2.0 * stem_complex(scalar_part(f), zs))
        worst = float((np.abs(sym - target) / (1.0 + np.abs(target))).max())
        report.add(
            f"exp-symmetrization[{src}]",
            "pass" if worst <= IDENTITY_TOL else "fail",
            worst,
            zs.size,
            1,
            time.perf_counter() - start,
        )


def _suite_log(domain: BasicDomainSpec, report: Report) -> None:
    zs = domain.node_z
    slices = len(VERIFY_UNITS)

    def run(name, fn, expect=None):
        start = time.perf_counter()
        try:
            residual = fn()
        except StarlogError as err:
            if expect is not None and isinstance(err, expect):
                status = "pass"
            else:
                status = f"error:{type(err).__name__}"
            report.add(name, status, None, zs.size, slices, time.perf_counter() - start)
            return
        if expect is not None:
            status = "fail"  # the rejection did not happen
        else:
            status = "pass" if residual <= RESIDUAL_ACCEPT else "fail"
        report.add(name, status, residual, zs.size, slices, time.perf_counter() - start)

    def skip(name, why):
        report.add(name, f"skip:{why}", None, 0, 0, 0.0)

    def scalar_roundtrip():
        f_expr = parse_expr("0.5*q^2 + 1.0")
        g = parse_expr("exp(0.5*q^2 + 1.0)")
        result = log_star(g, domain)
        diff = float(np.abs(stem_complex(result.f, zs) - stem_complex(f_expr, zs)).max())
        return max(result.residual, diff)

    def angle_roundtrip():
        f_expr = parse_expr("(0.5 + 0.25*q^2)*i")
        result = log_star(exp_star(f_expr), domain)
        worst = result.residual
        for unit in VERIFY_UNITS:
            worst = max(
                worst, _sup_rel(eval_many(result.f, zs, unit), eval_many(f_expr, zs, unit))
            )
        return worst

    run("log-roundtrip[scalar]", scalar_roundtrip)
    run("log-roundtrip[angle]", angle_roundtrip)

    if domain.kind == "product":
        run(
            "log-roundtrip[null-vector]",
            lambda: log_star(parse_expr("q + I*i + j"), domain).residual,
        )
    else:
        skip("log-roundtrip[null-vector]", "product-only")

    isolated = "-1 + q^2*i + 1.4142135623730951*q*j + k"
    if domain.kind == "product" and domain.contains_z(1j):
        run("log-roundtrip[fold]", lambda: log_star(parse_expr(isolated), domain).residual)
    else:
        skip("log-roundtrip[fold]", "geometry")

    if domain.kind == "slice":
        run(
            "log-reject[negative-trace]",
            lambda: log_star(parse_expr("-2.0 - q^2"), domain).residual,
            expect=ConditionFailed,
        )
        run(
            "log-reject[scalar-shift]",
            lambda: log_star(parse_expr("2.0 + q^2"), domain, (1, 0)).residual,
            expect=ConditionFailed,
        )
    else:
        run(
            "log-branch-shift[m=1]",
            lambda: log_star(parse_expr("2.0 + q^2"), domain, (1, 0)).residual,
        )
        run(
            "log-reject[parity]",
            lambda: log_star(
                parse_expr("-1"), domain, (1, 2), rep=parse_expr("i")
            ).residual,
            expect=ConditionFailed,
        )


def _suite_mu(domain: BasicDomainSpec, report: Report) -> None:
    rng = np.random.default_rng(7)
    n = 1000
    radius = rng.uniform(0.2, 3.0, n)
    theta = rng.uniform(0.05, math.pi - 0.05, n) * rng.choice([-1.0, 1.0], n)
    ws = radius * np.exp(1j * theta)  # off the real axis, clear of both slits

    for k in range(-2, 3):
        start = time.perf_counter()
        back = mu(mu_inv(ws, k))
        worst = float((np.abs(back - ws) / (1.0 + np.abs(ws))).max())
        report.add(
            f"mu-covering[k={k}]",
            "pass" if worst <= COVERING_TOL else "fail",
            worst,
            n,
            0,
            time.perf_counter() - start,
        )

    start = time.perf_counter()
    gs = rng.uniform(-4.0, 4.0, n) + 1j * rng.uniform(-4.0, 4.0, n)
    unity = mu(gs) ** 2 + gs * nu(gs) ** 2
    worst = float(np.abs(unity - 1.0).max())
    report.add(
        "mu-nu-identity",
        "pass" if worst <= IDENTITY_TOL else "fail",
        worst,
        n,
        0,
        time.perf_counter() - start,
    )

    start = time.perf_counter()
    at_zero = abs(complex(mu(0.0)) - 1.0)
    step = 1e-6
    slope = (complex(mu(step)) - 1.0) / step
    derivative = abs(slope + 0.5)
    report.add(
        "mu-at-zero",
        "pass" if at_zero <= 1e-14 else "fail",
        at_zero,
        1,
        0,
        time.perf_counter() - start,
    )
    report.add(
        "mu-derivative-at-zero",
        "pass" if derivative <= 1e-6 else "fail",
        derivative,
        1,
        0,
        0.0,
    )


_SUITES = {"exp": _suite_exp, "log": _suite_log, "mu": _suite_mu}


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starlog",
        description="Star logarithms of slice functions on basic domains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="OUT", help="write the report rows as JSON")

    p = sub.add_parser("eval", parents=[common], help="evaluate at one quaternion")
    p.add_argument("expr")
    p.add_argument("--at", required=True, metavar="Q", help="point, e.g. '0.5+1j-0.2k'")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("classify", parents=[common], help="vectorial class on a domain")
    p.add_argument("expr")
    p.add_argument("--domain", required=True, metavar="D.json")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("exp-star", parents=[common], help="star exponential on a grid")
    p.add_argument("expr")
    p.add_argument("--domain", required=True, metavar="D.json")
    p.add_argument("--grid-out", metavar="G.csv", help="write sampled values as CSV")
    p.set_defaults(func=_cmd_exp_star)

    p = sub.add_parser("log-star", parents=[common], help="star logarithm on a domain")
    p.add_argument("expr")
    p.add_argument("--domain", required=True, metavar="D.json")
    p.add_argument("--branch", type=_branch_arg, default=BranchSpec(), metavar="m,n")
    p.add_argument("--rep", metavar="WEXPR", help="unit class representative")
    p.add_argument("--grid-out", metavar="G.csv", help="write sampled log values as CSV")
    p.set_defaults(func=_cmd_log_star)

    p = sub.add_parser("verify", parents=[common], help="run identity suites")
    p.add_argument("--suite", choices=("all", "exp", "log", "mu"), default="all")
    p.add_argument("--domain", required=True, metavar="D.json")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("roundtrip", parents=[common], help="parse-print-parse check")
    p.add_argument("expr")
    p.set_defaults(func=_cmd_roundtrip)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    report = Report()
    start = time.perf_counter()
    try:
        code = args.func(args, report)
    except StarlogError as err:
        print(f"error: {err}", file=sys.stderr)
        report.add(
            args.command,
            f"error:{type(err).__name__}",
            seconds=time.perf_counter() - start,
        )
        code = exit_code_for(err)
    if args.json:
        report.dump(args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())
