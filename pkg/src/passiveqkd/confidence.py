"""Exact binomial confidence bounds and the power-meter mean interval.

The Clopper-Pearson interval inverts the binomial tail probabilities
exactly, which makes it conservative by construction: over repeated
experiments the true proportion is covered at least 1 - alpha of the time.
Tails are evaluated through the regularized incomplete beta function so
trial counts of 10^8 and beyond stay tractable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betainc
from scipy.stats import norm

__all__ = ["ConfidenceResult", "ApnInterval", "clopper_pearson", "apn_interval"]


@dataclass(frozen=True)
class ConfidenceResult:
    lower: float
    upper: float
    level: float  # the 1 - alpha

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError("lower bound exceeds upper bound")


@dataclass(frozen=True)
class ApnInterval:
    """Confidence interval on the source average photon number."""

    lower: float
    upper: float
    level: float
    degenerate: bool = False


def _bisect(f, lo: float, hi: float, tol: float = 1e-13) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        if f(mid) * flo > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def clopper_pearson(successes: int, trials: int, alpha: float) -> ConfidenceResult:
    """Exact two-sided (1 - alpha) confidence bounds on a binomial proportion.

    The lower bound solves P(X >= successes | p) = alpha/2 and the upper
    bound P(X <= successes | p) = alpha/2; both tails are written as
    regularized incomplete beta functions and root-found by bisection to
    absolute tolerance 1e-12 in p.  Boundary cases are exact:
    lower = 0 at zero successes, upper = 1 at full successes.
    """
    M, x = int(trials), int(successes)
    if M < 1:
        raise ValueError("trials must be positive")
    if not 0 <= x <= M:
        raise ValueError(f"successes must be in [0, {M}]")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    half = alpha / 2.0

    if x == 0:
        lower = 0.0
    else:
        # P(X >= x | p) = I_p(x, M - x + 1)
        lower = _bisect(lambda p: betainc(x, M - x + 1, p) - half, 0.0, 1.0)
    if x == M:
        upper = 1.0
    else:
        # P(X <= x | p) = 1 - I_p(x + 1, M - x)
        upper = _bisect(lambda p: (1.0 - betainc(x + 1, M - x, p)) - half, 0.0, 1.0)
    return ConfidenceResult(lower=lower, upper=upper, level=1.0 - alpha)


def apn_interval(records, xi: float, alpha: float) -> ApnInterval:
    """CLT interval on the source APN from repeated power-meter records.

    ``records`` are mean photoelectron counts per averaging period at the
    monitor; their grand mean is normal for many records, so
    [mean -+ z * sqrt(var/count)] bounds the true photoelectron mean and
    dividing by the monitor transmittance ``xi`` maps it back to the source.
    """
    r = np.asarray(records, dtype=float)
    if r.ndim != 1 or r.size < 2:
        raise ValueError("need at least 2 records")
    if not 0.0 < xi <= 1.0:
        raise ValueError("xi must be in (0, 1]")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    mean = float(r.mean())
    var = float(r.var(ddof=1))
    if var == 0.0:
        return ApnInterval(mean / xi, mean / xi, 1.0 - alpha, degenerate=True)
    z = float(norm.ppf(1.0 - alpha / 2.0))
    h = z * np.sqrt(var / r.size)
    return ApnInterval((mean - h) / xi, (mean + h) / xi, 1.0 - alpha)
