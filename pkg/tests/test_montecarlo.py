"""Monte Carlo monitoring runs: determinism, statistics, pipeline wiring."""

import numpy as np
import pytest

from passiveqkd import (
    ExplicitSource,
    GaussianNoise,
    PassiveSchemeParams,
    PoissonNoise,
    PoissonianSource,
    RunConfig,
    ThresholdWindow,
    clopper_pearson,
    poisson_pnd,
    run,
    run_pipeline,
)

SCHEME = PassiveSchemeParams(t_B=0.9, t_D=0.76, lam=3.42e-7, mu=1000.0)


def make_config(**overrides):
    base = dict(
        M=200_000,
        seed=12345,
        source=PoissonianSource(1000.0),
        scheme=SCHEME,
        noise=None,
        window=ThresholdWindow(600.0, 760.0),
    )
    base.update(overrides)
    return RunConfig(**base)


def test_run_is_deterministic():
    a = run(make_config())
    b = run(make_config())
    assert a == b


def test_run_independent_of_thread_count():
    # blocks own their RNG streams, so any parallel split reduces identically
    config = make_config(M=3_000_000)
    single = run(config, threads=1)
    assert run(config, threads=4) == single
    assert run(config, threads=7) == single


def test_run_changes_with_seed():
    assert run(make_config()) != run(make_config(seed=54321))


def test_in_window_count_is_plausible():
    # mean monitor count is mu * xi = 684, sd ~ 26; the window covers ~3 sd
    res = run(make_config())
    assert 0.99 < res.k_prime / 200_000 <= 1.0
    tight = run(make_config(window=ThresholdWindow(683.0, 685.0)))
    assert tight.k_prime < res.k_prime


def test_auto_window_counts_everything():
    res = run(make_config(window=None))
    assert res.k_prime == 200_000
    assert res.effective_window.m1 == res.observed_min
    assert res.effective_window.m2 == res.observed_max


def test_poissonian_shortcut_matches_explicit_source():
    # the Poisson-thinning shortcut and explicit per-photon sampling must
    # agree in distribution (same mean and spread, different streams)
    scheme = PassiveSchemeParams(t_B=0.9, t_D=0.76, lam=0.5, mu=50.0)
    shortcut = run(
        RunConfig(
            M=400_000,
            seed=1,
            source=PoissonianSource(50.0),
            scheme=scheme,
            window=ThresholdWindow(30.0, 38.0),
        )
    )
    explicit = run(
        RunConfig(
            M=400_000,
            seed=1,
            source=ExplicitSource(poisson_pnd(50.0)),
            scheme=scheme,
            window=ThresholdWindow(30.0, 38.0),
        )
    )
    p1 = shortcut.k_prime / 400_000
    p2 = explicit.k_prime / 400_000
    assert p1 == pytest.approx(p2, abs=0.005)


def test_noise_widens_observed_range():
    clean = run(make_config(window=None))
    noisy = run(make_config(window=None, noise=GaussianNoise(400.0)))
    assert noisy.observed_max - noisy.observed_min > clean.observed_max - clean.observed_min


def test_gaussian_noise_can_go_negative_overall():
    # tiny signal, huge noise: unclamped m' must reach below zero
    scheme = PassiveSchemeParams(t_B=0.5, t_D=0.5, lam=0.1, mu=1.0)
    res = run(
        RunConfig(
            M=100_000,
            seed=3,
            source=PoissonianSource(1.0),
            scheme=scheme,
            noise=GaussianNoise(100.0),
            window=None,
        )
    )
    assert res.observed_min < 0.0


def test_pipeline_noiseless_equals_clopper_pearson():
    config = make_config()
    res = run(config)
    pipe = run_pipeline(config, alpha=1e-6)
    expected = clopper_pearson(res.k_prime, config.M, 1e-6).lower
    assert pipe.untagged_lower == pytest.approx(expected, abs=1e-15)
    assert pipe.k_prime == res.k_prime
    assert not pipe.degenerate


def test_pipeline_poisson_noise_integerizes_window():
    config = make_config(
        noise=PoissonNoise(5.0), window=ThresholdWindow(600.5, 770.2)
    )
    pipe = run_pipeline(config, alpha=1e-6)
    assert pipe.effective_window.m1 == 600.0
    assert pipe.effective_window.m2 == 771.0


def test_pipeline_gaussian_small_noise_is_informative():
    config = make_config(
        M=1_000_000, noise=GaussianNoise(4.0), window=ThresholdWindow(550.0, 820.0)
    )
    pipe = run_pipeline(config, alpha=1e-6)
    assert not pipe.degenerate
    assert pipe.untagged_lower > 0.99


def test_config_validation():
    with pytest.raises(ValueError):
        make_config(M=0)
    with pytest.raises(ValueError):
        make_config(seed=-1)
    with pytest.raises(ValueError):
        PoissonianSource(0.0)


def test_explicit_source_rejects_heavy_tail():
    pnd = poisson_pnd(50.0, n_max=60, tail_tol=1.0)
    with pytest.raises(ValueError, match="tail"):
        ExplicitSource(pnd)
