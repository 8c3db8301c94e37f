"""Sparse symmetric off-diagonal kernels and their multilinear partial sums.

A kernel of degree p stores one coefficient per canonical (strictly
increasing) index tuple.  The full symmetric function assigns that value to
every permutation of the tuple and zero to any tuple with a repeated index,
so ordered sums over all of {1..n}^p collapse to p! times the canonical sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import BadArityError, ConflictingValueError, DiagonalTupleError


@dataclass(frozen=True)
class Kernel:
    degree: int
    entries: dict[tuple[int, ...], float] = field(default_factory=dict)

    @property
    def max_index(self) -> int:
        """Largest index appearing in any stored tuple (0 for the empty kernel)."""
        return max((t[-1] for t in self.entries), default=0)


def kernel_new(degree: int, raw: Iterable[tuple[Sequence[int], float]]) -> Kernel:
    """Build a kernel from (index tuple, coefficient) pairs.

    Tuples are sorted to canonical increasing form; zero coefficients are
    dropped; a repeated index or two conflicting values for the same
    canonical tuple are rejected.
    """
    if degree < 1:
        raise BadArityError(f"degree must be >= 1, got {degree}")
    entries: dict[tuple[int, ...], float] = {}
    for indices, value in raw:
        t = tuple(int(i) for i in indices)
        if len(t) != degree:
            raise BadArityError(f"tuple {t} has length {len(t)}, expected {degree}")
        if any(i < 1 for i in t):
            raise BadArityError(f"indices must be positive, got {t}")
        if len(set(t)) != len(t):
            raise DiagonalTupleError(f"tuple {t} repeats an index")
        canon = tuple(sorted(t))
        value = float(value)
        if canon in entries and entries[canon] != value:
            raise ConflictingValueError(
                f"tuple {canon} assigned both {entries[canon]} and {value}"
            )
        entries[canon] = value
    entries = {t: v for t, v in sorted(entries.items()) if v != 0.0}
    return Kernel(degree=degree, entries=entries)


def partial_sum(kernel: Kernel, x: Sequence[float]) -> float:
    """Multilinear partial sum over indices <= len(x).

    Equals the ordered sum over all of {1..n}^p of the symmetric kernel
    times the coordinate products, i.e. p! times the canonical-tuple sum.
    x[i-1] holds the value of the i-th coordinate.
    """
    n = len(x)
    total = math.fsum(
        coeff * math.prod(x[i - 1] for i in t)
        for t, coeff in kernel.entries.items()
        if t[-1] <= n
    )
    return math.factorial(kernel.degree) * total


def norm_sq(kernel: Kernel) -> float:
    """Squared coefficient norm of the symmetric kernel, summed over ordered tuples."""
    return math.factorial(kernel.degree) * math.fsum(
        c * c for c in kernel.entries.values()
    )
