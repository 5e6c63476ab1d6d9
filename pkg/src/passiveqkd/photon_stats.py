"""Photon-number distributions and Bernoulli (loss/thinning) transforms.

A pulse of a phase-randomized source is described by a probability vector
over Fock-state photon number n.  Every lossy element (beam splitter arm,
attenuator, imperfect detector) acts on that vector as a Bernoulli
transform: each photon independently survives with some probability t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import gammaln

__all__ = [
    "PhotonNumberDistribution",
    "PassiveSchemeParams",
    "poisson_pnd",
    "bernoulli_transform",
    "multiphoton_probability",
]

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class PhotonNumberDistribution:
    """Truncated probability vector over photon number with explicit tail mass.

    ``probs[n]`` is the probability of exactly n photons for n = 0..n_max;
    ``tail_mass`` is the probability assigned to n > n_max.  The tail is
    always treated pessimistically downstream (counted as multiphoton).
    """

    probs: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probs must be a non-empty 1-d sequence")
        if np.any(probs < 0) or self.tail_mass < 0:
            raise ValueError("probabilities must be non-negative")
        total = probs.sum() + self.tail_mass
        if not (1.0 - _NORM_TOL <= total <= 1.0 + _NORM_TOL):
            raise ValueError(f"distribution not normalized: total mass {total!r}")

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    @property
    def mean(self) -> float:
        """Mean photon number of the truncated part, sum(n * probs[n]).

        The tail contributes at least ``(n_max + 1) * tail_mass`` on top of
        this; callers that need a bound should add that term explicitly.
        """
        return float(np.arange(self.probs.size) @ self.probs)

    @property
    def mean_tail_lower_bound(self) -> float:
        """Lower bound on the tail's contribution to the full mean."""
        return (self.n_max + 1) * self.tail_mass


@dataclass(frozen=True)
class PassiveSchemeParams:
    """Parameters of the passive monitoring scheme.

    A beam splitter (transmittance t_B) taps the source toward a monitor
    detector (efficiency t_D); the encoding arm passes an attenuator
    (transmittance lam).  Derived transmittances:

    * ``xi = t_B * t_D``    source -> monitor photoelectrons,
    * ``eta = lam * (1 - t_B)``  source -> encoder output,
    * ``lambda_a = (1 - t_B) * lam / (t_B * t_D)``  effective attenuation
      seen by window-selected pulses between the monitor reference and the
      encoder output.
    """

    t_B: float
    t_D: float
    lam: float
    mu: float

    def __post_init__(self):
        if not 0.0 < self.t_B < 1.0:
            raise ValueError("t_B must be in (0, 1)")
        if not 0.0 < self.t_D <= 1.0:
            raise ValueError("t_D must be in (0, 1]")
        if not 0.0 < self.lam <= 1.0:
            raise ValueError("lam must be in (0, 1]")
        if self.mu <= 0.0:
            raise ValueError("mu must be positive")
        if self.lambda_a > 1.0 + 1e-12:
            raise ValueError(
                f"invalid passive scheme: lambda_a = {self.lambda_a:.6g} > 1 "
                "(requires lam <= t_B * t_D / (1 - t_B))"
            )

    @property
    def xi(self) -> float:
        return self.t_B * self.t_D

    @property
    def eta(self) -> float:
        return self.lam * (1.0 - self.t_B)

    @property
    def lambda_a(self) -> float:
        return (1.0 - self.t_B) * self.lam / (self.t_B * self.t_D)


def _auto_n_max(mu: float) -> int:
    # Poisson tails decay super-exponentially beyond mean + O(sqrt(mean)).
    return int(math.ceil(mu + 12.0 * math.sqrt(mu) + 20.0))


def poisson_pnd(
    mu: float, n_max: int | None = None, tail_tol: float = 1e-12
) -> PhotonNumberDistribution:
    """Poissonian photon-number distribution with mean ``mu``.

    ``n_max`` is chosen automatically when omitted.  An explicit ``n_max``
    that leaves more than ``tail_tol`` probability in the tail is an error,
    never a silent truncation.
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    if n_max is None:
        n_max = _auto_n_max(mu)
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    n = np.arange(n_max + 1)
    probs = stats.poisson.pmf(n, mu)
    tail = float(stats.poisson.sf(n_max, mu))
    if tail > tail_tol:
        raise ValueError(
            f"n_max={n_max} leaves tail mass {tail:.3e} > tolerance {tail_tol:.3e} "
            f"for mu={mu}"
        )
    return PhotonNumberDistribution(probs=probs, tail_mass=tail)


def bernoulli_transform(
    p: PhotonNumberDistribution, t: float
) -> PhotonNumberDistribution:
    """Thin ``p`` by per-photon survival probability ``t``.

    out[m] = sum_{n >= m} p[n] * C(n, m) * t^m * (1-t)^(n-m).

    Binomial coefficients are evaluated through log-gamma so large n stays
    exact to ~1e-14; the input's tail mass is carried through unchanged
    (the tail photons' fate is unknown, and downstream consumers treat tail
    mass pessimistically anyway).
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must be in [0, 1]")
    if t == 1.0:
        return PhotonNumberDistribution(p.probs.copy(), p.tail_mass)
    if t == 0.0:
        out = np.zeros_like(p.probs)
        out[0] = p.probs.sum()
        return PhotonNumberDistribution(out, p.tail_mass)

    n = np.arange(p.probs.size)
    m = n[:, None]  # output index
    nn = n[None, :]  # input index
    with np.errstate(divide="ignore", invalid="ignore"):
        log_binom = gammaln(nn + 1) - gammaln(m + 1) - gammaln(nn - m + 1)
        log_kernel = log_binom + m * math.log(t) + (nn - m) * math.log1p(-t)
    kernel = np.where(nn >= m, np.exp(log_kernel), 0.0)
    out = kernel @ p.probs
    return PhotonNumberDistribution(out, p.tail_mass)


def multiphoton_probability(p: PhotonNumberDistribution) -> float:
    """Exact P(n > 1) for a known distribution; the tail counts as multiphoton."""
    p1 = float(p.probs[1]) if p.probs.size > 1 else 0.0
    value = 1.0 - float(p.probs[0]) - p1
    return max(0.0, value)
