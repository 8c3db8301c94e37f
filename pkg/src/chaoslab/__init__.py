"""chaoslab: desk-scale verification of two chaos-sum convergence counterexamples.

Two explicit constructions - a paired two-point chaos and a paired-Poisson
chaos - have terms that converge to zero in moment norms and almost surely,
while their degree-one chaos components diverge along a recurrent event.
This package makes every desk-checkable claim about them executable:
moment identities by enumeration, tail and decay bounds by certified
truncated series, series convergence by integral-test brackets, and the
stochastic claims by reproducible Monte Carlo.
"""

from .errors import (
    BadArityError,
    BadIndexError,
    ChaosLabError,
    ConflictingValueError,
    DiagonalPairError,
    DiagonalTupleError,
    DivergentSeriesError,
    DomainError,
    NonPositiveLengthError,
    OutOfRangeError,
    ResourceLimitError,
)
from .kernels import Kernel, kernel_new, norm_sq, partial_sum
from .poisson_moments import (
    CertifiedValue,
    abs_central_moment,
    central_moment_4,
    poisson_tail,
    raw_abs_moment,
    raw_moment_4,
    tail_factorial_bound,
)
from .variables import (
    PoissonSpec,
    TwoPointSpec,
    poisson_from_uniform,
    poisson_normalize,
    sample_poisson,
    sample_two_point,
    two_point_from_p,
    two_point_value,
)

__version__ = "0.1.0"
