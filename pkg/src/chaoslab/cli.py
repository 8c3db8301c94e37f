"""Command-line surface: every check is a named experiment.

Exit codes: 0 all checks passed, 1 usage error, 2 at least one check
failed, 3 work budget exceeded.  Every command is a pure function of its
flags; rerunning with identical flags reproduces identical bytes.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import mc, point_process, poisson_moments, poisson_pair, series, two_point
from .errors import BadIndexError, ChaosLabError, DomainError, ResourceLimitError
from .report import Report, render_json, render_text

_SLACK = 1e-14  # additive slack absorbing rounding in strict analytic inequalities


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_floats(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"bad numeric list {text!r}") from exc
    if not vals:
        raise UsageError(f"empty numeric list {text!r}")
    return vals


def _emit(report: Report, fmt: str) -> int:
    print(render_json(report) if fmt == "json" else render_text(report))
    return report.exit_code()


def cmd_moments(args) -> int:
    lam_grid = (
        [i / 100.0 for i in range(1, 101)]
        if args.lambda_grid is None
        else _parse_floats(args.lambda_grid)
    )
    if args.j_max < 0:
        raise UsageError("--j-max must be >= 0")
    report = Report(
        "moments",
        {"lambda_grid": f"{lam_grid[0]:g}..{lam_grid[-1]:g}({len(lam_grid)})", "j_max": args.j_max},
        seed=None,
    )
    for lam in lam_grid:
        for j in range(args.j_max + 1):
            tail = poisson_moments.poisson_tail(lam, j)
            bound = poisson_moments.tail_factorial_bound(lam, j)
            report.add(
                f"tail lam={lam:g} j={j}",
                tail.value,
                bound,
                tail.value <= bound + tail.remainder_bound + _SLACK,
            )
        if lam <= 1.0:
            abs52 = poisson_moments.abs_central_moment(lam, 2.5)
            report.add(
                f"abs_central_52 lam={lam:g}",
                abs52.value,
                math.sqrt(8.0) * lam,
                abs52.value <= math.sqrt(8.0) * lam + abs52.remainder_bound + _SLACK,
            )
            raw52 = poisson_moments.raw_abs_moment(lam, 2.5)
            report.add(
                f"raw_52 lam={lam:g}",
                raw52.value,
                math.sqrt(15.0) * lam,
                raw52.value <= math.sqrt(15.0) * lam + raw52.remainder_bound + _SLACK,
            )
            abs1 = poisson_moments.abs_central_moment(lam, 1.0)
            report.add(
                f"abs_central_1 lam={lam:g}",
                abs1.value,
                2.0 * lam,
                abs1.value <= 2.0 * lam + abs1.remainder_bound + _SLACK,
            )
            cs_rhs = poisson_moments.central_moment_4(lam) * abs1.value
            report.add(
                f"cauchy_schwarz lam={lam:g}",
                abs52.value**2,
                cs_rhs,
                abs52.value**2 <= cs_rhs + 1e-10,
            )
            central4 = poisson_moments.abs_central_moment(lam, 4.0)
            closed_c4 = poisson_moments.central_moment_4(lam)
            report.add(
                f"central4_series lam={lam:g}",
                central4.value,
                closed_c4,
                abs(central4.value - closed_c4) <= 1e-12 * max(1.0, closed_c4),
            )
            raw4 = poisson_moments.raw_abs_moment(lam, 4.0)
            closed_r4 = poisson_moments.raw_moment_4(lam)
            report.add(
                f"raw4_series lam={lam:g}",
                raw4.value,
                closed_r4,
                abs(raw4.value - closed_r4) <= 1e-12 * max(1.0, closed_r4),
            )
    return _emit(report, args.format)


_SERIES_BY_NAME = {s.value: s for s in series.Series}


def cmd_series(args) -> int:
    chosen = list(series.Series) if args.series == "all" else [_SERIES_BY_NAME[args.series]]
    report = Report("series", {"series": args.series, "n": args.n}, seed=None)
    for s in chosen:
        start = series.START[s]
        if args.n < start:
            raise UsageError(f"{s.value} starts at n={start}")
        partial = series.partial_sum(s, args.n)
        report.add(f"{s.value} partial_sum N={args.n}", partial)
        if s is series.Series.EVEN_HARMONIC:
            n_exceed = series.scan_partial_exceeds(s, 5.0)
            report.add(
                f"{s.value} divergence: partial sum exceeds 5 at N={n_exceed}",
                series.partial_sum(s, n_exceed),
                5.0,
                series.partial_sum(s, n_exceed) > 5.0,
            )
            continue
        n1 = max(start, 3, args.n // 1000)
        tail1 = series.tail_bound(s, n1)
        p1 = series.partial_sum(s, n1)
        report.add(f"{s.value} tail_bound N={args.n}", series.tail_bound(s, max(args.n, 3)))
        report.add(
            f"{s.value} bracket: partial({n1}) <= partial({args.n}) <= partial({n1})+tail({n1})",
            partial,
            p1 + tail1,
            p1 <= partial <= p1 + tail1,
        )
        if s is series.Series.INTENSITY_FOURTH:
            c = series.intensity_fourth_sum()
            report.add("a_const limit bracket [value, value+error]", c.value, c.upper, None)
        elif s is series.Series.INTENSITY_CROSS:
            c = series.intensity_cross_sum()
            report.add("b_const limit bracket [value, value+error]", c.value, c.upper, None)
    return _emit(report, args.format)


def _format_cell(x: float) -> str:
    return repr(float(x))


def build_csv(stats: mc.TrajectoryStats) -> str:
    """Fixed 4-column per-n series; stderr is empty on degenerate runs."""
    lines = ["n,stat,value,stderr"]

    def se_cell(se: float) -> str:
        return "" if math.isnan(se) else _format_cell(se)

    columns = [
        ("f_mean", *stats.f_mean()),
        ("f_sq_mean", *stats.f_sq_mean()),
        ("f_abs52_mean", *stats.f_abs52_mean()),
        ("j1_mean", *stats.j1_mean()),
    ]
    for i, n in enumerate(stats.n_values):
        for name, vals, ses in columns:
            lines.append(f"{n},{name},{_format_cell(vals[i])},{se_cell(ses[i])}")
    for n0, est in mc.tail_diagnostic(stats, stats.config.epsilon):
        lines.append(f"{n0},sup_exceed_prob,{_format_cell(est.mean)},{se_cell(est.stderr)}")
    for w in mc.first_chaos_report(stats):
        lines.append(
            f"{w.n_lo},window_event_prob,{_format_cell(w.estimate.mean)},"
            f"{se_cell(w.estimate.stderr)}"
        )
    return "\n".join(lines) + "\n"


def _window_rows(report: Report, stats: mc.TrajectoryStats) -> None:
    for w in mc.first_chaos_report(stats):
        est = w.estimate
        tol = 3.0 * est.stderr if not math.isnan(est.stderr) else math.inf
        report.add(
            f"window[{w.n_lo},{w.n_hi}) event prob vs exact",
            est.mean,
            w.exact_prob,
            abs(est.mean - w.exact_prob) <= tol,
            stderr=est.stderr,
        )
        if w.max_event_deviation is not None:
            report.add(
                f"window[{w.n_lo},{w.n_hi}) first-chaos closed-form deviation",
                w.max_event_deviation,
                1e-9,
                w.max_event_deviation <= 1e-9,
            )


def _diagnostic_rows(report: Report, stats: mc.TrajectoryStats) -> None:
    for n0, est in mc.tail_diagnostic(stats, stats.config.epsilon):
        report.add(
            f"P(sup_(n>={n0}) |F| > {stats.config.epsilon:g})",
            est.mean,
            stderr=est.stderr,
        )


def cmd_simulate(args) -> int:
    config = mc.SimConfig(
        example=args.example,
        n_max=args.n_max,
        replications=args.reps,
        master_seed=args.seed,
        epsilon=args.epsilon,
    )
    stats = mc.run(config)
    csv_text = build_csv(stats)
    if args.out:
        try:
            with open(args.out, "w", newline="") as fh:
                fh.write(csv_text)
        except OSError as exc:
            raise UsageError(f"cannot write CSV to {args.out!r}: {exc}") from exc
    else:
        sys.stdout.write(csv_text)
    report = Report(
        "simulate",
        {
            "example": args.example,
            "n_max": args.n_max,
            "reps": args.reps,
            "epsilon": args.epsilon,
        },
        seed=args.seed,
    )
    f_mean, f_se = stats.f_mean()
    fsq_mean, fsq_se = stats.f_sq_mean()
    a52_mean, a52_se = stats.f_abs52_mean()
    start = config.start_n
    probes = [n for n in (1, 4, 16, 100, 256) if start <= n <= config.n_max]
    for n in probes:
        i = n - start
        if config.example == "twopoint":
            target = two_point.second_moment(n)
        else:
            target = poisson_pair.second_moment(n)
        tol = 3.0 * fsq_se[i] if not math.isnan(fsq_se[i]) else math.inf
        report.add(
            f"E[F_{n}^2] vs exact", float(fsq_mean[i]), target,
            abs(fsq_mean[i] - target) <= tol, stderr=float(fsq_se[i]),
        )
        tol = 3.0 * f_se[i] if not math.isnan(f_se[i]) else math.inf
        report.add(
            f"E[F_{n}] vs 0", float(f_mean[i]), 0.0,
            abs(f_mean[i]) <= tol, stderr=float(f_se[i]),
        )
        if config.example == "poisson":
            bound = poisson_pair.moment52_bound(n)
            tol = 3.0 * a52_se[i] if not math.isnan(a52_se[i]) else math.inf
            report.add(
                f"E|F_{n}|^(5/2) vs decay bound", float(a52_mean[i]), bound,
                a52_mean[i] <= bound + tol, stderr=float(a52_se[i]),
            )
    _diagnostic_rows(report, stats)
    _window_rows(report, stats)
    return _emit(report, args.format)


def cmd_decompose(args) -> int:
    if args.n < poisson_pair.START_N:
        raise UsageError(f"--n must be >= {poisson_pair.START_N}")
    layout = point_process.build_layout(
        [poisson_pair.intensity(2 * args.n), poisson_pair.intensity(2 * args.n + 1)],
        start_index=2 * args.n,
    )
    if args.counts is not None:
        try:
            counts = [int(x) for x in args.counts.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad counts {args.counts!r}") from exc
        if len(counts) != 2 or any(c < 0 for c in counts):
            raise UsageError("--counts needs two nonnegative integers, e.g. 2,1")
        realization = point_process.PpRealization(
            np.array(counts, dtype=np.int64), layout, None
        )
    else:
        realization = point_process.realize(layout, args.seed)
    y_even, y_odd = (int(c) for c in realization.counts)
    parts = point_process.decompose_term(args.n, realization)
    collapsed = poisson_pair.term(args.n, y_even, y_odd)
    residual = abs(parts.total - collapsed)
    report = Report(
        "decompose",
        {"n": args.n, "counts": f"{y_even},{y_odd}"},
        seed=realization.seed,
    )
    report.add("order-0 projection", parts.order0)
    report.add("order-1 projection", parts.order1)
    report.add("order-2 projection", parts.order2)
    report.add("collapsed value", collapsed)
    report.add(
        "residual |J0+J1+J2 - F|",
        residual,
        1e-10 * max(1.0, abs(collapsed)),
        residual <= 1e-10 * max(1.0, abs(collapsed)),
    )
    return _emit(report, args.format)


def cmd_tail(args) -> int:
    t_grid = _parse_floats(args.t_grid)
    config = mc.SimConfig(
        example="poisson",
        n_max=args.n_max,
        replications=args.reps,
        master_seed=args.seed,
    )
    stats = mc.run(config)
    report = Report(
        "tail",
        {"t_grid": args.t_grid, "n_max": args.n_max, "reps": args.reps},
        seed=args.seed,
    )
    a = series.intensity_fourth_sum()
    b = series.intensity_cross_sum()
    report.add("a_const bracket [value, value+error]", a.value, a.upper, None)
    report.add("b_const bracket [value, value+error]", b.value, b.upper, None)
    moment = poisson_pair.sup_moment_bound(1.0 / 48.0)
    report.add(
        "E(sup|F|^(1/48)) certified finite bound",
        moment,
        passed=math.isfinite(moment) and moment > 0,
    )
    for t in t_grid:
        est = mc.sup_exceedance(stats, t)
        if t < 9.0:
            report.add(
                f"P(window sup > {t:g}): bound not applicable (t < 9)",
                est.mean,
                stderr=est.stderr,
            )
            continue
        bound = poisson_pair.sup_tail_bound(t)
        lower = est.mean - (3.0 * est.stderr if not math.isnan(est.stderr) else 0.0)
        report.add(
            f"P(window sup > {t:g}) - 3se vs sup tail bound",
            est.mean,
            bound,
            lower <= bound,
            stderr=est.stderr,
        )
    return _emit(report, args.format)


def _build_parser() -> _Parser:
    parser = _Parser(prog="chaoslab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="Poisson tail and moment inequality grid")
    p.add_argument("--lambda-grid", default=None, help="comma list, default 0.01..1.00")
    p.add_argument("--j-max", type=int, default=20)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("series", help="partial sums, tail bounds, limit constants")
    p.add_argument(
        "--series",
        choices=tuple(_SERIES_BY_NAME) + ("all",),
        default="all",
    )
    p.add_argument("--n", type=int, default=10**6)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("simulate", help="trajectory Monte Carlo with CSV output")
    p.add_argument("--example", choices=mc.EXAMPLES, required=True)
    p.add_argument("--n-max", type=int, default=10_000)
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--out", default=None, help="CSV path; stdout when omitted")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decompose", help="chaos projections of one paired term")
    p.add_argument("--n", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--counts", default=None, help="manual counts, e.g. 2,1")
    group.add_argument("--seed", type=int, default=None, help="sample the counts")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("tail", help="window-sup exceedance vs the sup tail bound")
    p.add_argument("--t-grid", default="9,16,25,100")
    p.add_argument("--n-max", type=int, default=10_000)
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_tail)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except (BadIndexError, DomainError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ChaosLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
