"""Photon-number distributions and Bernoulli thinning."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from passiveqkd import (
    PassiveSchemeParams,
    PhotonNumberDistribution,
    bernoulli_transform,
    multiphoton_probability,
    poisson_pnd,
)


def brute_force_thin(probs, t):
    """O(n^2) reference implementation straight from the definition."""
    out = np.zeros_like(probs)
    for n, pn in enumerate(probs):
        for m in range(n + 1):
            out[m] += pn * math.comb(n, m) * t**m * (1.0 - t) ** (n - m)
    return out


def test_poisson_pnd_matches_pmf():
    mu = 3.7
    pnd = poisson_pnd(mu)
    expected = [math.exp(-mu) * mu**n / math.factorial(n) for n in range(10)]
    np.testing.assert_allclose(pnd.probs[:10], expected, rtol=1e-12)
    assert pnd.probs.sum() + pnd.tail_mass == pytest.approx(1.0, abs=1e-12)
    assert pnd.mean == pytest.approx(mu, abs=1e-9)


def test_poisson_pnd_rejects_lossy_truncation():
    with pytest.raises(ValueError, match="tail mass"):
        poisson_pnd(100.0, n_max=50)


def test_thinning_closure_poisson():
    # thinning a Poissonian source is again Poissonian with scaled mean
    mu, t = 8.0, 0.35
    thinned = bernoulli_transform(poisson_pnd(mu), t)
    direct = poisson_pnd(mu * t, n_max=thinned.n_max, tail_tol=1.0)
    np.testing.assert_allclose(thinned.probs, direct.probs, atol=1e-12)


def test_transform_matches_brute_force():
    rng = np.random.default_rng(42)
    probs = rng.random(25)
    probs /= probs.sum()
    pnd = PhotonNumberDistribution(probs)
    for t in (0.1, 0.5, 0.93):
        got = bernoulli_transform(pnd, t)
        np.testing.assert_allclose(got.probs, brute_force_thin(probs, t), atol=1e-13)


def test_transform_edge_cases():
    pnd = PhotonNumberDistribution(np.array([0.2, 0.3, 0.5]))
    full = bernoulli_transform(pnd, 1.0)
    np.testing.assert_array_equal(full.probs, pnd.probs)
    none = bernoulli_transform(pnd, 0.0)
    assert none.probs[0] == pytest.approx(1.0)
    assert none.probs[1:].sum() == 0.0


def test_transform_carries_tail_mass():
    pnd = PhotonNumberDistribution(np.array([0.5, 0.4]), tail_mass=0.1)
    out = bernoulli_transform(pnd, 0.5)
    assert out.tail_mass == pytest.approx(0.1)


@given(
    mu=st.floats(0.1, 20.0),
    t1=st.floats(0.05, 0.95),
    t2=st.floats(0.05, 0.95),
)
@settings(max_examples=30, deadline=None)
def test_transform_composition(mu, t1, t2):
    # thinning by t1 then t2 equals thinning once by t1 * t2
    pnd = poisson_pnd(mu)
    two_step = bernoulli_transform(bernoulli_transform(pnd, t1), t2)
    one_step = bernoulli_transform(pnd, t1 * t2)
    np.testing.assert_allclose(two_step.probs, one_step.probs, atol=1e-10)


@given(t=st.floats(0.0, 1.0))
@settings(max_examples=30, deadline=None)
def test_transform_scales_mean(t):
    pnd = poisson_pnd(5.0)
    assert bernoulli_transform(pnd, t).mean == pytest.approx(t * pnd.mean, abs=1e-8)


def test_multiphoton_probability_poisson():
    # 1 - e^{-mu}(1 + mu) at mu = 0.1, independently evaluated
    value = multiphoton_probability(poisson_pnd(0.1))
    assert value == pytest.approx(0.004678840160444, abs=1e-12)


def test_multiphoton_probability_counts_tail():
    pnd = PhotonNumberDistribution(np.array([0.6, 0.3]), tail_mass=0.1)
    assert multiphoton_probability(pnd) == pytest.approx(0.1)


def test_distribution_validation():
    with pytest.raises(ValueError, match="non-negative"):
        PhotonNumberDistribution(np.array([0.5, -0.1, 0.6]))
    with pytest.raises(ValueError, match="not normalized"):
        PhotonNumberDistribution(np.array([0.5, 0.2]))


def test_scheme_params_derived_quantities():
    p = PassiveSchemeParams(t_B=0.9, t_D=0.76, lam=1e-6, mu=1e6)
    assert p.xi == pytest.approx(0.684)
    assert p.eta == pytest.approx(1e-7, rel=1e-12)
    assert p.lambda_a == pytest.approx(1e-7 / 0.684, rel=1e-12)


def test_scheme_params_rejects_invalid_attenuator():
    # lam beyond t_B t_D / (1 - t_B) would need gain, not attenuation
    with pytest.raises(ValueError, match="lambda_a"):
        PassiveSchemeParams(t_B=0.3, t_D=0.5, lam=0.9, mu=1.0)
