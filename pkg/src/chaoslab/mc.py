"""Reproducible Monte Carlo over the two counterexample constructions.

Trajectories are simulated in fixed blocks of BLOCK_SIZE; every variable in
every block owns its own counter-based stream (see streams), so results are
bitwise identical for any worker count and any replication split along
block boundaries.  Each block walks the pair index n downward, which makes
every suffix supremum available in a single pass; per-n sums use numpy's
pairwise reduction inside a block and an exactly rounded compensated sum
across blocks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import poisson_pair, two_point
from .errors import BadIndexError, ResourceLimitError
from .streams import BLOCK_SIZE, block_bounds, uniform_block
from .variables import poisson_from_uniform

EXAMPLES = ("twopoint", "poisson")

# Per-n trajectory sums kept by the engine, in storage order.
STAT_NAMES = ("x_even", "x_even_sq", "f", "f_sq", "f_quad", "f_abs52", "f_abs5")
_SQ_OF = {"x_even": "x_even_sq", "f": "f_sq", "f_sq": "f_quad", "f_abs52": "f_abs5"}


@dataclass(frozen=True)
class SimConfig:
    example: str
    n_max: int = 10_000
    replications: int = 100_000
    master_seed: int = 42
    epsilon: float = 1.0
    budget: int = 2_000_000_000
    diagnostic_grid: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.example not in EXAMPLES:
            raise BadIndexError(f"example must be one of {EXAMPLES}, got {self.example!r}")
        if self.n_max < self.start_n:
            raise BadIndexError(f"n_max must be >= {self.start_n}")
        if self.replications < 1:
            raise BadIndexError("need at least one replication")
        if not self.epsilon > 0.0:
            raise BadIndexError("epsilon must be positive")

    @property
    def start_n(self) -> int:
        return two_point.START_N if self.example == "twopoint" else poisson_pair.START_N


class McEstimate(NamedTuple):
    """Monte Carlo point estimate with its standard error and provenance."""

    mean: float
    stderr: float
    replications: int
    seed: int


def default_diagnostic_grid(start_n: int, n_max: int) -> tuple[int, ...]:
    """Round values 1,2,5 per decade inside (start_n, n_max], plus n_max."""
    grid = {n_max}
    scale = 1
    while scale <= n_max:
        for c in (1, 2, 5):
            v = c * scale
            if start_n < v <= n_max:
                grid.add(v)
        scale *= 10
    return tuple(sorted(grid))


def dyadic_windows(n_max: int, base: int = 10) -> tuple[tuple[int, int], ...]:
    """Full windows [N, 2N) with N = base, 2*base, ... inside the range."""
    windows = []
    lo = base
    while 2 * lo - 1 <= n_max:
        windows.append((lo, 2 * lo))
        lo *= 2
    return tuple(windows)


@dataclass(frozen=True)
class _Tables:
    """Per-n scalars precomputed once per run; rows are n - start_n."""

    kind: str
    n_values: np.ndarray
    coef: np.ndarray          # degree-one coefficient: p_(2n+1) or lambda_(2n+1)
    cond_obs: np.ndarray      # engine value of |degree-one part| on the window event
    closed_form: np.ndarray   # analytic closed form of the same quantity
    rel_dev: np.ndarray       # |cond_obs - closed_form| / closed_form
    p_even: np.ndarray = field(default=None)  # twopoint only
    p_odd: np.ndarray = field(default=None)
    v_plus: np.ndarray = field(default=None)
    v_minus: np.ndarray = field(default=None)
    lam_even: np.ndarray = field(default=None)  # poisson only
    lam_odd: np.ndarray = field(default=None)
    sqrt_lam_even: np.ndarray = field(default=None)

    def event_prob(self) -> np.ndarray:
        """Exact P of the recurrence event {Y_2n = 1} (sign +1 / count 1)."""
        if self.kind == "twopoint":
            return self.p_even
        return np.exp(-self.lam_even) * self.lam_even


def _build_tables(config: SimConfig) -> _Tables:
    n = np.arange(config.start_n, config.n_max + 1)
    if config.example == "twopoint":
        p_even = np.asarray(two_point.prob(2 * n))
        p_odd = np.asarray(two_point.prob(2 * n + 1))
        v_plus = np.sqrt((1.0 - p_even) / p_even)
        v_minus = -np.sqrt(p_even / (1.0 - p_even))
        coef = p_odd
        cond_obs = coef * v_plus
        closed = np.asarray(two_point.first_chaos_on_plus(n))
        return _Tables(
            kind="twopoint", n_values=n, coef=coef, cond_obs=cond_obs,
            closed_form=closed, rel_dev=np.abs(cond_obs - closed) / closed,
            p_even=p_even, p_odd=p_odd, v_plus=v_plus, v_minus=v_minus,
        )
    lam_even = np.asarray(poisson_pair.intensity(2 * n))
    lam_odd = np.asarray(poisson_pair.intensity(2 * n + 1))
    sqrt_lam_even = np.sqrt(lam_even)
    coef = lam_odd
    cond_obs = coef * ((1.0 - lam_even) / sqrt_lam_even)
    closed = np.asarray(poisson_pair.first_chaos_at_one(n))
    safe = np.where(closed == 0.0, 1.0, closed)
    return _Tables(
        kind="poisson", n_values=n, coef=coef, cond_obs=np.abs(cond_obs),
        closed_form=closed, rel_dev=np.abs(np.abs(cond_obs) - closed) / np.abs(safe),
        lam_even=lam_even, lam_odd=lam_odd, sqrt_lam_even=sqrt_lam_even,
    )


@dataclass
class _BlockResult:
    lo: int
    hi: int
    sums: np.ndarray          # [n_rows, len(STAT_NAMES)]
    window_max: np.ndarray    # [hi - lo]
    suffix_max: np.ndarray    # [n_grid, hi - lo]
    win_hits: np.ndarray      # [n_windows] trajectories with >= 1 event
    win_events: np.ndarray    # [n_windows] total event count over (n, trajectory)
    win_max_abs: np.ndarray   # [n_windows] max |degree-one part| in window
    win_max_event: np.ndarray # [n_windows] max event value, -inf if no event
    win_max_dev: np.ndarray   # [n_windows] max closed-form deviation at events


def _uniform_slice(seed: int, var_index: int, lo: int, hi: int) -> np.ndarray:
    """Uniforms for trajectories [lo, hi) of one variable (single block)."""
    block, offset = divmod(lo, BLOCK_SIZE)
    u = uniform_block(seed, var_index, block, hi - block * BLOCK_SIZE)
    return u[offset:] if offset else u


def _walk_block(
    config: SimConfig,
    tables: _Tables,
    grid: tuple[int, ...],
    windows: tuple[tuple[int, int], ...],
    lo: int,
    hi: int,
) -> _BlockResult:
    size = hi - lo
    start = config.start_n
    n_rows = config.n_max - start + 1
    seed = config.master_seed
    sums = np.zeros((n_rows, len(STAT_NAMES)))
    run_max = np.zeros(size)
    suffix_max = np.zeros((len(grid), size))
    grid_desc = sorted(grid, reverse=True)
    gi = 0
    n_win = len(windows)
    win_of: dict[int, int] = {}
    for w, (w_lo, w_hi) in enumerate(windows):
        for n in range(w_lo, w_hi):
            win_of[n] = w
    ev_or = [None] * n_win
    win_hits = np.zeros(n_win, dtype=np.int64)
    win_events = np.zeros(n_win, dtype=np.int64)
    win_max_abs = np.full(n_win, -np.inf)
    win_max_event = np.full(n_win, -np.inf)
    win_max_dev = np.full(n_win, -np.inf)

    for n in range(config.n_max, start - 1, -1):
        row = n - start
        u_even = _uniform_slice(seed, 2 * n, lo, hi)
        u_odd = _uniform_slice(seed, 2 * n + 1, lo, hi)
        w = win_of.get(n, -1)
        if tables.kind == "twopoint":
            plus_even = u_even < tables.p_even[row]
            x_even = np.where(plus_even, tables.v_plus[row], tables.v_minus[row])
            idx = np.nonzero(u_odd < tables.p_odd[row])[0]
            f_nz = x_even[idx]
            event = plus_even if w >= 0 else None
        else:
            y_even = poisson_from_uniform(u_even, tables.lam_even[row])
            x_even = (y_even - tables.lam_even[row]) / tables.sqrt_lam_even[row]
            y_odd = poisson_from_uniform(u_odd, tables.lam_odd[row])
            idx = np.nonzero(y_odd)[0]
            f_nz = x_even[idx] * y_odd[idx]
            event = (y_even == 1) if w >= 0 else None

        abs_f = np.abs(f_nz)
        f_sq = f_nz * f_nz
        a52 = f_sq * np.sqrt(abs_f)
        sums[row, 0] = x_even.sum()
        sums[row, 1] = np.dot(x_even, x_even)
        sums[row, 2] = f_nz.sum()
        sums[row, 3] = f_sq.sum()
        sums[row, 4] = np.dot(f_sq, f_sq)
        sums[row, 5] = a52.sum()
        sums[row, 6] = np.dot(a52, a52)
        run_max[idx] = np.maximum(run_max[idx], abs_f)

        if w >= 0:
            if ev_or[w] is None:
                ev_or[w] = event.copy()
            else:
                ev_or[w] |= event
            n_events = int(event.sum())
            if n_events:
                win_events[w] += n_events
                win_max_event[w] = max(win_max_event[w], tables.cond_obs[row])
                win_max_dev[w] = max(win_max_dev[w], tables.rel_dev[row])
            hi_x = float(x_even.max())
            lo_x = float(x_even.min())
            win_max_abs[w] = max(
                win_max_abs[w], tables.coef[row] * max(hi_x, -lo_x)
            )
        while gi < len(grid_desc) and n == grid_desc[gi]:
            suffix_max[len(grid) - 1 - gi] = run_max
            gi += 1

    for w in range(n_win):
        if ev_or[w] is not None:
            win_hits[w] = int(ev_or[w].sum())
    return _BlockResult(
        lo=lo, hi=hi, sums=sums, window_max=run_max, suffix_max=suffix_max,
        win_hits=win_hits, win_events=win_events, win_max_abs=win_max_abs,
        win_max_event=win_max_event, win_max_dev=win_max_dev,
    )


@dataclass
class TrajectoryStats:
    """Streaming aggregates of one replication range, combinable by blocks."""

    config: SimConfig
    lo: int
    hi: int
    n_values: np.ndarray
    grid: tuple[int, ...]
    windows: tuple[tuple[int, int], ...]
    tables: _Tables
    block_sums: list[np.ndarray]          # per block: [n_rows, n_stats]
    block_ranges: list[tuple[int, int]]
    window_max: np.ndarray                # [hi - lo]
    suffix_max: np.ndarray                # [n_grid, hi - lo]
    win_hits: np.ndarray
    win_events: np.ndarray
    win_max_abs: np.ndarray
    win_max_event: np.ndarray
    win_max_dev: np.ndarray
    _sum_cache: dict = field(default_factory=dict, repr=False)

    @property
    def replications(self) -> int:
        return self.hi - self.lo

    def sums(self, stat: str) -> np.ndarray:
        """Exact-order combination of the per-block partial sums."""
        if stat not in self._sum_cache:
            j = STAT_NAMES.index(stat)
            cols = [b[:, j] for b in self.block_sums]
            self._sum_cache[stat] = np.array(
                [math.fsum(vals) for vals in zip(*cols)]
            )
        return self._sum_cache[stat]

    def mean_with_stderr(self, stat: str) -> tuple[np.ndarray, np.ndarray]:
        r = self.replications
        mean = self.sums(stat) / r
        if r < 2:
            return mean, np.full_like(mean, np.nan)
        sq = self.sums(_SQ_OF[stat])
        var = np.maximum(sq - r * mean * mean, 0.0) / (r - 1)
        return mean, np.sqrt(var / r)

    def f_mean(self):
        return self.mean_with_stderr("f")

    def f_sq_mean(self):
        return self.mean_with_stderr("f_sq")

    def f_abs52_mean(self):
        return self.mean_with_stderr("f_abs52")

    def j1_mean(self):
        mean, se = self.mean_with_stderr("x_even")
        return self.tables.coef * mean, self.tables.coef * se


def _worker_count(n_blocks: int) -> int:
    env = os.environ.get("CHAOSLAB_THREADS")
    if env:
        try:
            workers = int(env)
        except ValueError:
            raise BadIndexError(f"CHAOSLAB_THREADS must be an integer, got {env!r}")
    else:
        workers = os.cpu_count() or 1
    return max(1, min(workers, n_blocks))


def run_range(config: SimConfig, lo: int, hi: int) -> TrajectoryStats:
    """Simulate trajectories [lo, hi); run() is the [0, R) case.

    The cost guard, the streams, and the aggregates all see absolute
    trajectory indices, so disjoint ranges combine exactly via merge().
    """
    if lo % BLOCK_SIZE != 0:
        raise BadIndexError(f"range start must be a multiple of {BLOCK_SIZE}")
    if (hi - lo) * config.n_max > config.budget:
        raise ResourceLimitError(
            f"{hi - lo} trajectories x n_max={config.n_max} exceeds budget {config.budget}"
        )
    tables = _build_tables(config)
    grid = config.diagnostic_grid or default_diagnostic_grid(config.start_n, config.n_max)
    grid = tuple(sorted(set(grid)))
    for g in grid:
        if not config.start_n <= g <= config.n_max:
            raise BadIndexError(f"diagnostic grid point {g} outside range")
    windows = dyadic_windows(config.n_max)
    bounds = block_bounds(lo, hi)
    workers = _worker_count(len(bounds))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda b: _walk_block(config, tables, grid, windows, *b), bounds)
            )
    else:
        results = [_walk_block(config, tables, grid, windows, *b) for b in bounds]
    return _assemble(config, tables, grid, windows, lo, hi, results)


def _assemble(config, tables, grid, windows, lo, hi, results) -> TrajectoryStats:
    return TrajectoryStats(
        config=config,
        lo=lo,
        hi=hi,
        n_values=tables.n_values,
        grid=tuple(grid),
        windows=windows,
        tables=tables,
        block_sums=[r.sums for r in results],
        block_ranges=[(r.lo, r.hi) for r in results],
        window_max=np.concatenate([r.window_max for r in results]),
        suffix_max=np.concatenate([r.suffix_max for r in results], axis=1),
        win_hits=sum(r.win_hits for r in results),
        win_events=sum(r.win_events for r in results),
        win_max_abs=np.max([r.win_max_abs for r in results], axis=0)
        if windows else np.zeros(0),
        win_max_event=np.max([r.win_max_event for r in results], axis=0)
        if windows else np.zeros(0),
        win_max_dev=np.max([r.win_max_dev for r in results], axis=0)
        if windows else np.zeros(0),
    )


def run(config: SimConfig) -> TrajectoryStats:
    """Simulate all configured replications."""
    if config.replications * config.n_max > config.budget:
        raise ResourceLimitError(
            f"replications x n_max = {config.replications * config.n_max} "
            f"exceeds budget {config.budget}"
        )
    return run_range(config, 0, config.replications)


def merge(a: TrajectoryStats, b: TrajectoryStats) -> TrajectoryStats:
    """Combine two contiguous, block-aligned replication ranges exactly.

    The replication ranges of the parts must meet at a block boundary;
    then the per-block partials of the union are literally the union of
    the parts' partials, and every derived quantity matches a single run
    over the full range bit for bit.
    """
    if a.config != b.config or a.grid != b.grid:
        raise BadIndexError("cannot merge stats from different configurations")
    if a.hi != b.lo or b.lo % BLOCK_SIZE != 0 or a.lo % BLOCK_SIZE != 0:
        raise BadIndexError("ranges must be contiguous and block-aligned")
    has_windows = bool(a.windows)
    return TrajectoryStats(
        config=a.config,
        lo=a.lo,
        hi=b.hi,
        n_values=a.n_values,
        grid=a.grid,
        windows=a.windows,
        tables=a.tables,
        block_sums=a.block_sums + b.block_sums,
        block_ranges=a.block_ranges + b.block_ranges,
        window_max=np.concatenate([a.window_max, b.window_max]),
        suffix_max=np.concatenate([a.suffix_max, b.suffix_max], axis=1),
        win_hits=a.win_hits + b.win_hits,
        win_events=a.win_events + b.win_events,
        win_max_abs=np.maximum(a.win_max_abs, b.win_max_abs) if has_windows else a.win_max_abs,
        win_max_event=np.maximum(a.win_max_event, b.win_max_event) if has_windows else a.win_max_event,
        win_max_dev=np.maximum(a.win_max_dev, b.win_max_dev) if has_windows else a.win_max_dev,
    )


def _binomial_estimate(stats: TrajectoryStats, count: int) -> McEstimate:
    r = stats.replications
    p = count / r
    se = math.sqrt(p * (1.0 - p) / r) if r > 1 else math.nan
    return McEstimate(p, se, r, stats.config.master_seed)


def sup_exceedance(stats: TrajectoryStats, t: float) -> McEstimate:
    """P(max over the simulated range of |F_n| > t), with binomial stderr."""
    if not t > 0.0:
        raise BadIndexError("threshold must be positive")
    return _binomial_estimate(stats, int((stats.window_max > t).sum()))


def tail_diagnostic(
    stats: TrajectoryStats, epsilon: float, grid: tuple[int, ...] | None = None
) -> list[tuple[int, McEstimate]]:
    """P(sup_{n0 <= n <= n_max} |F_n| > epsilon) for each requested n0.

    Almost-sure convergence to 0 is equivalent to these probabilities
    vanishing as n0 grows, for every epsilon.
    """
    if not epsilon > 0.0:
        raise BadIndexError("epsilon must be positive")
    chosen = stats.grid if grid is None else tuple(grid)
    out = []
    for n0 in chosen:
        if n0 not in stats.grid:
            raise BadIndexError(f"n0={n0} not in the stored diagnostic grid {stats.grid}")
        row = stats.grid.index(n0)
        out.append((n0, _binomial_estimate(stats, int((stats.suffix_max[row] > epsilon).sum()))))
    return out


@dataclass(frozen=True)
class WindowReport:
    """Recurrence evidence for one dyadic window [n_lo, n_hi)."""

    n_lo: int
    n_hi: int
    estimate: McEstimate       # empirical P(event occurs somewhere in window)
    exact_prob: float          # 1 - prod (1 - P(event at n))
    event_count: int
    max_abs_first_chaos: float
    closed_form_max: float     # max closed form over the window
    max_event_value: float | None
    max_event_deviation: float | None


def first_chaos_report(stats: TrajectoryStats) -> list[WindowReport]:
    """Per-window recurrence frequencies and degree-one magnitudes."""
    tables = stats.tables
    start = stats.config.start_n
    p_event = tables.event_prob()
    reports = []
    for w, (w_lo, w_hi) in enumerate(stats.windows):
        rows = slice(w_lo - start, w_hi - start)
        exact = 1.0 - float(np.prod(1.0 - p_event[rows]))
        has_event = stats.win_events[w] > 0
        reports.append(
            WindowReport(
                n_lo=w_lo,
                n_hi=w_hi,
                estimate=_binomial_estimate(stats, int(stats.win_hits[w])),
                exact_prob=exact,
                event_count=int(stats.win_events[w]),
                max_abs_first_chaos=float(stats.win_max_abs[w]),
                closed_form_max=float(tables.closed_form[rows].max()),
                max_event_value=float(stats.win_max_event[w]) if has_event else None,
                max_event_deviation=float(stats.win_max_dev[w]) if has_event else None,
            )
        )
    return reports
