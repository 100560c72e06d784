"""Single command-line entry point for every subsystem.

Subcommands: ``enumerate``, ``count``, ``stats``, ``wfun``, ``dfun``,
``constants``, ``identity``, ``experiment``.  All data output is
machine-readable (CSV on stdout or ``--out``), ends with a newline, and is a
pure function of the argument vector: reals are printed with 12 significant
digits, integers in full, and no timestamps or versions enter the data
stream (version goes to stderr behind ``--verbose``).  ``--out`` writes
atomically via a temp file and rename.

Exit status: 0 on success, 1 on computation failure (range/domain errors,
a failed exact identity, or a failed experiment gate), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from decimal import Decimal, InvalidOperation

from . import __version__
from .arith import build_spf_table
from .constants import (
    DENSITY_SCALE,
    constants_bundle,
    expected_distinct_factors,
)
from .errors import ConfigurationError, DensedivError
from .experiments import (
    ExperimentReport,
    concentration_experiment,
    count_ratio_experiment,
    cq_structure_experiment,
    margenstern_tables,
    mean_omega_experiment,
    phi_approx_scan,
    tau_normal_order_experiment,
)
from .families import FAMILY_KINDS, ThetaFamily, parse_t
from .generate import collect_moments, count_members_multi, iter_members
from .identities import (
    CheckResult,
    check_partition_identity,
    check_shifted_partition_identity,
    check_weight_shift,
    log_moment_gap,
    weight_series_partial_sum,
    weighted_log_moment_sum,
)
from .specfun import SolverConfig, tabulate_buchstab, tabulate_density_kernel

_EXPERIMENTS = (
    "mean-omega",
    "concentration",
    "cq-structure",
    "phi-scan",
    "margenstern",
    "tau-order",
    "count-ratio",
)

_IDENTITY_CHECKS = ("phi0", "phik", "lambda0", "lambdak", "mu0", "muapprox")


def _parse_exact_int(text: str) -> int:
    """Exact integer from '20', '1e6', or '10000.0'; reject fractions."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise ConfigurationError(f"not an integer: {text!r}") from None
    if value != value.to_integral_value():
        raise ConfigurationError(f"not an integer: {text!r}")
    return int(value)


def _parse_int_list(text: str) -> list[int]:
    items = [piece for piece in text.split(",") if piece]
    if not items:
        raise ConfigurationError(f"empty integer list: {text!r}")
    return [_parse_exact_int(piece) for piece in items]


def _parse_float_list(text: str) -> list[float]:
    items = [piece for piece in text.split(",") if piece]
    if not items:
        raise ConfigurationError(f"empty list: {text!r}")
    try:
        return [float(piece) for piece in items]
    except ValueError:
        raise ConfigurationError(f"not a number list: {text!r}") from None


def _fmt(value: float | int) -> str:
    """Full precision for integers, 12 significant digits for reals."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.12g}"


def _emit(lines: list[str], out: str | None) -> None:
    payload = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(payload)
        return
    tmp = f"{out}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(payload)
    os.replace(tmp, out)


def _family_from_args(args: argparse.Namespace) -> ThetaFamily:
    kind = args.family
    if kind == "dense":
        if args.t is None:
            raise ConfigurationError("--t is required for the dense family")
        return ThetaFamily.dense(parse_t(args.t))
    if getattr(args, "t", None) is not None:
        raise ConfigurationError("--t only applies to the dense family")
    if kind == "practical":
        return ThetaFamily.practical()
    if kind == "shifted1":
        return ThetaFamily.shifted_one()
    return ThetaFamily.shifted_two()


def _expected_omega(family: ThetaFamily, x: int) -> float:
    """Reference mean for the distinct-factor count (0 when undefined)."""
    if family.kind == "dense" and x >= 2:
        return expected_distinct_factors(x, family.t_num / family.t_den)
    if x >= 3:
        return DENSITY_SCALE * math.log(math.log(x))
    return 0.0


# ---- subcommand handlers ----


def _cmd_enumerate(args: argparse.Namespace) -> int:
    family = _family_from_args(args)
    records = sorted(iter_members(family, args.x), key=lambda rec: rec.n)
    lines = ["n,omega,big_omega,tau,sigma"]
    lines.extend(
        f"{rec.n},{rec.omega},{rec.big_omega},{rec.tau},{rec.sigma}"
        for rec in records
    )
    _emit(lines, args.out)
    return 0


def _cmd_count(args: argparse.Namespace) -> int:
    family = _family_from_args(args)
    count = count_members_multi(
        family, args.x, [args.q], threads=args.threads, engine=args.engine
    )[0]
    _emit([str(count)], args.out)
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    family = _family_from_args(args)
    expected = _expected_omega(family, args.x)
    summary = collect_moments(
        family, args.x, xi=args.xi, expected=expected,
        threads=args.threads, engine=args.engine,
    )
    t_float = family.t_num / family.t_den if family.kind == "dense" else 0.0
    header = (
        "x,t,count,mean_omega,mean_big_omega,variance_omega,"
        "mean_tau,mean_log_tau,expected_omega,exceed_fraction"
    )
    row = ",".join(
        [
            str(args.x),
            _fmt(t_float),
            str(summary.count),
            _fmt(summary.mean_omega),
            _fmt(summary.mean_big_omega),
            _fmt(summary.variance_omega),
            _fmt(summary.mean_tau),
            _fmt(summary.sum_log_tau / summary.count),
            _fmt(expected),
            _fmt(summary.exceed_fraction),
        ]
    )
    _emit([header, row], args.out)
    return 0


def _table_lines(table) -> list[str]:
    lines = ["abscissa,value"]
    lines.extend(
        f"{_fmt(float(u))},{_fmt(float(v))}"
        for u, v in zip(table.grid, table.values)
    )
    return lines


def _cmd_wfun(args: argparse.Namespace) -> int:
    cfg = SolverConfig(
        step=args.step, max_abscissa=args.umax, quadrature=args.quadrature
    )
    _emit(_table_lines(tabulate_buchstab(cfg)), args.out)
    return 0


def _cmd_dfun(args: argparse.Namespace) -> int:
    cfg = SolverConfig(step=args.step, max_abscissa=args.vmax)
    w = tabulate_buchstab(cfg)
    _emit(_table_lines(tabulate_density_kernel(cfg, w)), args.out)
    return 0


def _cmd_constants(args: argparse.Namespace) -> int:
    bundle = constants_bundle()
    fields = (
        ("gamma", bundle.gamma),
        ("C", bundle.C),
        ("C_log2", bundle.C_log2),
        ("exp_shifted_prime", bundle.exp_shifted_prime),
        ("exp_twin", bundle.exp_twin),
        ("exp_shifted_prime_e", bundle.exp_shifted_prime_e),
        ("exp_twin_e", bundle.exp_twin_e),
        ("e_log2", bundle.e_log2),
    )
    if args.json:
        body = ", ".join(f'"{name}": {value:.12g}' for name, value in fields)
        _emit(["{" + body + "}"], args.out)
    else:
        width = max(len(name) for name, _ in fields)
        _emit(
            [f"{name:<{width}}  {value:.12g}" for name, value in fields],
            args.out,
        )
    return 0


def _weight_table_limit(family: ThetaFamily, limit: int) -> int:
    """Sieve size covering every member threshold up to the truncation."""
    if family.kind == "dense":
        return max(3, limit * family.t_num // family.t_den + 1)
    best = 3
    for rec in iter_members(family, limit):
        best = max(best, family.threshold_floor(rec.n, rec.sigma))
    return best


def _cmd_identity(args: argparse.Namespace) -> int:
    family = _family_from_args(args)
    check = args.check
    if args.s < 1.0:
        raise ConfigurationError(f"--s must be >= 1, got {args.s}")
    if check in ("phi0", "phik", "muapprox") and args.x is None:
        raise ConfigurationError(f"--x is required for {check}")
    if check in ("lambda0", "lambdak", "mu0") and args.N is None:
        raise ConfigurationError(f"--N is required for {check}")
    if check in ("phik", "lambdak") and not args.qs:
        raise ConfigurationError(f"--qs is required for {check}")
    if check == "phi0":
        table = build_spf_table(max(args.x, 3))
        result = check_partition_identity(family, args.x, table)
    elif check == "phik":
        table = build_spf_table(max(args.x, 3))
        result = check_shifted_partition_identity(family, args.x, args.qs, table)
    elif check == "lambda0":
        table = build_spf_table(_weight_table_limit(family, args.N))
        total = weight_series_partial_sum(family, args.s, args.N, table)
        result = CheckResult(
            "weight_series", total, 1.0, 1.0 - total,
            0.0 <= total <= 1.0 + 1e-9,
        )
    elif check == "lambdak":
        table = build_spf_table(_weight_table_limit(family, args.N))
        result = check_weight_shift(family, args.s, args.N, args.qs, table)
    elif check == "mu0":
        table = build_spf_table(_weight_table_limit(family, args.N))
        total = weighted_log_moment_sum(family, args.s, args.N, table)
        result = CheckResult("log_moment_series", total, 0.0, abs(total), True)
    else:  # muapprox
        if family.kind != "dense":
            raise ConfigurationError("muapprox applies to the dense family")
        gap = log_moment_gap(
            args.x, family.t, build_spf_table(_weight_table_limit(family, args.x))
        )
        result = CheckResult("log_moment_limit", gap, 0.0, gap, True)
    lines = [
        "lhs,rhs,gap,pass",
        f"{_fmt(result.lhs)},{_fmt(result.rhs)},{_fmt(result.gap)},"
        f"{_fmt(result.passed)}",
    ]
    _emit(lines, args.out)
    return 0 if result.passed else 1


def _report_lines(report: ExperimentReport) -> list[str]:
    lines = ["x,t,q,measured,predicted,rel_err,metric"]
    lines.extend(
        f"{row.x},{_fmt(row.t)},{row.q},{_fmt(row.measured)},"
        f"{_fmt(row.predicted)},{_fmt(row.rel_err)},{row.metric}"
        for row in report.rows
    )
    return lines


def _report_json(report: ExperimentReport) -> list[str]:
    rows = ", ".join(
        "{"
        + f'"x": {row.x}, "t": {row.t:.12g}, "q": {row.q}, '
        + f'"measured": {row.measured:.12g}, "predicted": {row.predicted:.12g}, '
        + f'"rel_err": {row.rel_err:.12g}, "metric": "{row.metric}"'
        + "}"
        for row in report.rows
    )
    return [
        f'{{"name": "{report.name}", "verdict": "{report.verdict}", '
        f'"rows": [{rows}]}}'
    ]


def _cmd_experiment(args: argparse.Namespace) -> int:
    name = args.name
    threads = args.threads
    if name == "mean-omega":
        _require(args, "t", "xs")
        report = mean_omega_experiment(parse_t(args.t), args.xs, threads)
    elif name == "concentration":
        _require(args, "t", "xs")
        parts = [
            concentration_experiment(parse_t(args.t), x, args.xi, threads)
            for x in args.xs
        ]
        verdict = "fail" if any(p.failed for p in parts) else "pass"
        rows = tuple(row for part in parts for row in part.rows)
        report = ExperimentReport("concentration", rows, verdict)
    elif name == "cq-structure":
        _require(args, "t", "x", "qs")
        report = cq_structure_experiment(parse_t(args.t), args.x, args.qs, threads)
    elif name == "phi-scan":
        _require(args, "xs", "ys")
        report = phi_approx_scan(args.xs, args.ys)
    elif name == "margenstern":
        _require(args, "xs")
        report = margenstern_tables(args.xs, threads)
    elif name == "tau-order":
        _require(args, "x")
        report = tau_normal_order_experiment(args.x, threads)
    else:  # count-ratio
        _require(args, "t", "xs")
        report = count_ratio_experiment(parse_t(args.t), args.xs, threads)
    lines = _report_json(report) if args.json else _report_lines(report)
    _emit(lines, args.out)
    print(f"experiment {report.name}: {report.verdict}", file=sys.stderr)
    return 1 if report.failed else 0


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise ConfigurationError(
                f"--{name} is required for this experiment"
            )


# ---- parser assembly ----


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densediv",
        description="Chain-condition integer families: enumeration, counts, "
        "special functions, identities, experiments.",
    )
    parser.add_argument(
        "--verbose", action="store_true", help="print version info to stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output atomically to this file")
    common.add_argument(
        "--threads", type=int, default=1,
        help="worker count for partitioned enumeration (output-invariant)",
    )

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument(
        "--family", required=True, choices=FAMILY_KINDS,
        help="member family",
    )
    fam.add_argument(
        "--t", help="ratio bound for the dense family: int, num/den, or decimal"
    )

    p_enum = sub.add_parser(
        "enumerate", parents=[common, fam], help="list members ascending"
    )
    p_enum.add_argument("--x", type=_parse_exact_int, required=True)
    p_enum.add_argument("--emit", choices=["csv"], default="csv")
    p_enum.set_defaults(handler=_cmd_enumerate)

    p_count = sub.add_parser(
        "count", parents=[common, fam], help="count members (single integer)"
    )
    p_count.add_argument("--x", type=_parse_exact_int, required=True)
    p_count.add_argument("--q", type=_parse_exact_int, default=1)
    p_count.add_argument(
        "--engine", choices=["auto", "python", "numpy"], default="auto"
    )
    p_count.set_defaults(handler=_cmd_count)

    p_stats = sub.add_parser(
        "stats", parents=[common, fam], help="moment summary of a member set"
    )
    p_stats.add_argument("--x", type=_parse_exact_int, required=True)
    p_stats.add_argument("--xi", type=float, default=4.0)
    p_stats.add_argument(
        "--engine", choices=["auto", "python", "numpy"], default="auto"
    )
    p_stats.set_defaults(handler=_cmd_stats)

    p_wfun = sub.add_parser(
        "wfun", parents=[common], help="tabulate the delay-equation function w"
    )
    p_wfun.add_argument("--umax", type=float, default=64.0)
    p_wfun.add_argument("--step", type=float, default=1e-3)
    p_wfun.add_argument(
        "--quadrature", choices=["trapezoid", "simpson"], default="trapezoid"
    )
    p_wfun.set_defaults(handler=_cmd_wfun)

    p_dfun = sub.add_parser(
        "dfun", parents=[common], help="tabulate the density kernel d"
    )
    p_dfun.add_argument("--vmax", type=float, default=32.0)
    p_dfun.add_argument("--step", type=float, default=1e-3)
    p_dfun.set_defaults(handler=_cmd_dfun)

    p_const = sub.add_parser(
        "constants", parents=[common], help="print the constants bundle"
    )
    p_const.add_argument("--json", action="store_true")
    p_const.set_defaults(handler=_cmd_constants)

    p_ident = sub.add_parser(
        "identity", parents=[common, fam], help="run an identity check"
    )
    p_ident.add_argument("--check", required=True, choices=_IDENTITY_CHECKS)
    p_ident.add_argument("--x", type=_parse_exact_int)
    p_ident.add_argument("--qs", type=_parse_int_list)
    p_ident.add_argument("--s", type=float, default=1.0)
    p_ident.add_argument("--N", type=_parse_exact_int)
    p_ident.set_defaults(handler=_cmd_identity)

    p_exp = sub.add_parser(
        "experiment", parents=[common], help="run a reproduction experiment"
    )
    p_exp.add_argument("name", choices=_EXPERIMENTS)
    p_exp.add_argument("--t")
    p_exp.add_argument("--x", type=_parse_exact_int)
    p_exp.add_argument("--xs", type=_parse_int_list)
    p_exp.add_argument("--ys", type=_parse_float_list)
    p_exp.add_argument("--qs", type=_parse_int_list)
    p_exp.add_argument("--xi", type=float, default=4.0)
    p_exp.add_argument("--json", action="store_true")
    p_exp.set_defaults(handler=_cmd_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse the argument vector and dispatch; returns the exit status."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        print(f"densediv {__version__}", file=sys.stderr)
    try:
        return args.handler(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DensedivError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
