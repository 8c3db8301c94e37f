"""Deterministic partial sums and certified tail bounds for the proof series.

Four number series drive the almost-sure arguments: the joint-sign event
series sum n^(-1-1/sqrt(log n)), the fourth-power intensity series
sum n^(-5/4), the cross-intensity series sum n^(-17/16), and the divergent
even-index harmonic series sum 1/n.  Tails of the convergent ones are
certified by the integral test.
"""

from __future__ import annotations

import math
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import BadIndexError, DivergentSeriesError

_CHUNK = 1 << 20


class Series(Enum):
    TWO_POINT_JOINT = "bc_twopoint"    # sum_{n>=2} n^(-1-1/sqrt(log n))
    INTENSITY_FOURTH = "a_const"       # sum_{n>=1} n^(-5/4)
    INTENSITY_CROSS = "b_const"        # sum_{n>=1} n^(-17/16)
    EVEN_HARMONIC = "harmonic_even"    # sum_{n>=2} 1/n, divergent


START = {
    Series.TWO_POINT_JOINT: 2,
    Series.INTENSITY_FOURTH: 1,
    Series.INTENSITY_CROSS: 1,
    Series.EVEN_HARMONIC: 2,
}

_POWER = {
    Series.INTENSITY_FOURTH: 5.0 / 4.0,
    Series.INTENSITY_CROSS: 17.0 / 16.0,
}

# Depth cap for the limit constants; the integral-test tail at this depth
# is the certified error.
CONSTANT_DEPTH = 10**8


def term(series: Series, n) -> np.ndarray | float:
    """Value of the n-th term; accepts scalars or integer arrays."""
    x = np.asarray(n, dtype=np.float64)
    if np.any(x < START[series]):
        raise BadIndexError(f"{series.value} starts at n={START[series]}")
    if series is Series.TWO_POINT_JOINT:
        # n^(-1-1/sqrt(log n)) = exp(-sqrt(log n))/n
        out = np.exp(-np.sqrt(np.log(x))) / x
    elif series is Series.EVEN_HARMONIC:
        out = 1.0 / x
    else:
        out = np.power(x, -_POWER[series])
    if out.ndim == 0:
        return float(out)
    return out


def partial_sum(series: Series, n_terms: int) -> float:
    """Sum of terms from the series start through n_terms inclusive.

    Chunks are reduced with numpy's pairwise summation and combined with an
    exactly rounded compensated sum, so the result does not depend on how
    the chunks are scheduled.
    """
    start = START[series]
    if n_terms < start:
        raise BadIndexError(f"{series.value} starts at n={start}, got N={n_terms}")
    partials = []
    lo = start
    while lo <= n_terms:
        hi = min(lo + _CHUNK - 1, n_terms)
        partials.append(float(term(series, np.arange(lo, hi + 1)).sum()))
        lo = hi + 1
    return math.fsum(partials)


def tail_bound(series: Series, n_terms: int) -> float:
    """Certified upper bound on the sum of all terms beyond n_terms.

    Integral test: for n^(-s), the tail is below N^(1-s)/(s-1).  For the
    joint-sign series the substitution u = log x turns the integral into
    int_v^inf exp(-sqrt(u)) du = 2(sqrt(v)+1)exp(-sqrt(v)) at v = log N;
    the integrand x^(-1)exp(-sqrt(log x)) decreases for x >= 3, so the
    bound needs N >= 3.
    """
    if series is Series.EVEN_HARMONIC:
        raise DivergentSeriesError("the even-index harmonic series has no finite tail")
    if series is Series.TWO_POINT_JOINT:
        if n_terms < 3:
            raise BadIndexError("joint-sign tail bound requires N >= 3")
        v = math.log(n_terms)
        return 2.0 * (math.sqrt(v) + 1.0) * math.exp(-math.sqrt(v))
    if n_terms < START[series]:
        raise BadIndexError(f"{series.value} starts at n={START[series]}")
    s = _POWER[series]
    return n_terms ** (1.0 - s) / (s - 1.0)


class ConstantEstimate(NamedTuple):
    """A series limit bracketed as [value, value + error]."""

    value: float
    error: float

    @property
    def upper(self) -> float:
        return self.value + self.error


@lru_cache(maxsize=None)
def _constant(series: Series, depth: int) -> ConstantEstimate:
    return ConstantEstimate(partial_sum(series, depth), tail_bound(series, depth))


def intensity_fourth_sum(depth: int = CONSTANT_DEPTH) -> ConstantEstimate:
    """The limit of sum n^(-5/4), bracketed by partial sum plus tail bound."""
    return _constant(Series.INTENSITY_FOURTH, depth)


def intensity_cross_sum(depth: int = CONSTANT_DEPTH) -> ConstantEstimate:
    """The limit of sum n^(-17/16), bracketed by partial sum plus tail bound."""
    return _constant(Series.INTENSITY_CROSS, depth)


def scan_partial_exceeds(series: Series, threshold: float, n_cap: int = 2**40) -> int:
    """Smallest doubling depth whose partial sum exceeds the threshold."""
    n = max(START[series], 2)
    while n <= n_cap:
        if partial_sum(series, n) > threshold:
            return n
        n *= 2
    raise BadIndexError(
        f"partial sums of {series.value} stayed <= {threshold} up to N={n_cap}"
    )
