"""Security thresholds for advantage distillation over the qunit channel.

Closed forms:

* incoherent attacks:  beta0 > 2 / (2 + (n - 1)),
* coherent attacks:    beta0 > 2 / (2 + (3 - sqrt(5)) (n - 1)),

and the quantum side: the isotropic state stays distillable down to exactly
the incoherent-attack threshold, recovered here by root-finding on its
singlet fraction.  The numeric recovery path rebuilds the thresholds from
scratch by comparing Bob's and Eve's error-decay exponents: distillation
succeeds iff Bob's post-distillation error decays strictly faster in the
block size than Eve's discrimination error, and the threshold is the
equality point, located by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .adversary import AttackKind, eve_error_exponent
from .channel import ChannelParams, make_params
from .distill import bob_error_exponent

BISECTION_MAX_ITER = 60
QUANTUM_MATCH_ATOL = 1e-10


class BracketingError(RuntimeError):
    """The bisection bracket does not straddle a sign change."""


def threshold_incoherent_closed(n: int) -> float:
    """Tolerable-noise threshold against incoherent attacks: 2/(2 + (n-1))."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    return 2.0 / (2.0 + (n - 1))


def threshold_coherent_closed(n: int) -> float:
    """Tolerable-noise threshold against coherent attacks:
    2/(2 + (3 - sqrt(5))(n - 1))."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    return 2.0 / (2.0 + (3.0 - math.sqrt(5.0)) * (n - 1))


def singlet_fraction(params: ChannelParams) -> float:
    """Overlap of the isotropic state with the maximally entangled state."""
    return params.lam + (1.0 - params.lam) / (params.n**2)


def quantum_distillability_threshold(n: int) -> float:
    """beta0 at which the isotropic state stops being distillable.

    Found numerically as the root of singlet_fraction(beta0) - 1/n over
    beta0 in (1/n, 1); the state is distillable iff the fraction exceeds
    1/n.  The result is asserted to agree with the closed form 2/(n+1)
    within 1e-10 before being returned.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")

    def excess(beta0: float) -> float:
        return singlet_fraction(make_params(n, beta0)) - 1.0 / n

    lo, hi = 1.0 / n, 1.0
    f_lo, f_hi = excess(lo), excess(hi)
    if not (f_lo < 0.0 < f_hi):
        raise BracketingError(f"no sign change on [{lo}, {hi}]: ({f_lo}, {f_hi})")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    root = 0.5 * (lo + hi)
    closed = 2.0 / (n + 1)
    if abs(root - closed) > QUANTUM_MATCH_ATOL:
        raise AssertionError(
            f"distillability root {root} disagrees with closed form {closed}"
        )
    return root


def find_threshold_numeric(
    n: int,
    kind: AttackKind,
    n_max: int,
    tol: float = 1e-3,
    detrend_acceptance: bool = True,
) -> float:
    """Recover a threshold by comparing Bob's and Eve's error exponents.

    Bisects over beta0 in (1/n, 1) on the sign of
    g(beta0) = bob_error_exponent - eve_error_exponent(kind): g > 0 means
    Bob's error decays more slowly than Eve's (insecure), g < 0 the reverse,
    and the returned root is where distillation stops winning.  The bracket
    is verified before bisecting; exponent fits are memoized per probe.
    """
    kind = AttackKind(kind)
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if kind is AttackKind.COHERENT and n not in (2, 3):
        raise ValueError("coherent threshold recovery is restricted to n in {2, 3}")
    if n_max < 3:
        raise ValueError("need n_max >= 3 for a meaningful exponent fit")
    if tol < 1e-4:
        raise ValueError("tol below 1e-4 is not resolvable by the exponent fit")

    cache: dict[float, float] = {}

    def g(beta0: float) -> float:
        if beta0 not in cache:
            params = make_params(n, beta0)
            eve = eve_error_exponent(params, kind, n_max, detrend_acceptance)
            cache[beta0] = bob_error_exponent(params) - eve
        return cache[beta0]

    span = 1.0 - 1.0 / n
    lo = 1.0 / n + 0.05 * span
    hi = 1.0 - 0.02 * span
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo > 0.0 > g_hi):
        raise BracketingError(
            f"no sign change on bracket [{lo:.4f}, {hi:.4f}]: g = ({g_lo:.4f}, {g_hi:.4f})"
        )
    for _ in range(BISECTION_MAX_ITER):
        if 0.5 * (hi - lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ThresholdRecord:
    """Per-dimension thresholds: closed forms, optional numeric recovery,
    and the quantum-distillability value."""

    n: int
    beta_inc_closed: float
    beta_coh_closed: float
    beta_inc_numeric: float | None
    beta_coh_numeric: float | None
    beta_quantum: float

    def __post_init__(self) -> None:
        if not (self.beta_coh_closed > self.beta_inc_closed):
            raise ValueError("coherent threshold must exceed the incoherent one")
        if abs(self.beta_quantum - self.beta_inc_closed) > 1e-12:
            raise ValueError("quantum threshold must coincide with the incoherent one")
        if not (1.0 / self.n < self.beta_inc_closed < 1.0):
            raise ValueError("thresholds must lie strictly inside (1/n, 1)")


# Numeric recovery is restricted to these dimensions: beyond n = 3 the
# coherent block computations stop being a desk-scale check, and the curve
# itself is the closed forms.
NUMERIC_DIMS = (2, 3)


def _numeric_block_sizes(n: int, kind: AttackKind) -> int:
    if kind is AttackKind.COHERENT and n == 3:
        return 4
    return 6


def figure_table(n_min: int = 2, n_max: int = 25, include_numeric: bool = False) -> list[ThresholdRecord]:
    """Threshold-curve data, one record per dimension in [n_min, n_max].

    Numeric columns are filled only for n in {2, 3} (and only when
    ``include_numeric`` is set); elsewhere they are None.
    """
    if n_min < 2:
        raise ValueError("n_min must be >= 2")
    if n_max < n_min:
        raise ValueError("n_max must be >= n_min")
    records = []
    for n in range(n_min, n_max + 1):
        inc_num = coh_num = None
        if include_numeric and n in NUMERIC_DIMS:
            inc_num = find_threshold_numeric(
                n, AttackKind.INCOHERENT, _numeric_block_sizes(n, AttackKind.INCOHERENT)
            )
            coh_num = find_threshold_numeric(
                n, AttackKind.COHERENT, _numeric_block_sizes(n, AttackKind.COHERENT)
            )
        records.append(
            ThresholdRecord(
                n=n,
                beta_inc_closed=threshold_incoherent_closed(n),
                beta_coh_closed=threshold_coherent_closed(n),
                beta_inc_numeric=inc_num,
                beta_coh_numeric=coh_num,
                beta_quantum=quantum_distillability_threshold(n),
            )
        )
    return records
