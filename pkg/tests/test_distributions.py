"""Priors: CDF exactness, seeded sampling, segment masses, and parsing."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bugshare.distributions import (
    DistributionSpec,
    SegmentedDistribution,
    cdf,
    discretize,
    sample,
)

UNIFORM = DistributionSpec.parse("U(0,1)")
NORMAL_02 = DistributionSpec.parse("N(0.5,0.2)")
NORMAL_04 = DistributionSpec.parse("N(0.5,0.4)")


# -------------------------------------------------------------------- parsing


def test_parse_table_notation():
    assert UNIFORM == DistributionSpec(kind="uniform", lo=0.0, hi=1.0)
    assert NORMAL_02 == DistributionSpec(kind="truncnorm", lo=0.0, hi=1.0, mu=0.5, sigma=0.2)
    assert NORMAL_04.sigma == 0.4


def test_parse_label_round_trip():
    for text in ("U(0,1)", "N(0.5,0.2)", "N(0.5,0.4)", "U(0,2)"):
        assert DistributionSpec.parse(text).label() == text


def test_parse_rejects_garbage():
    for text in ("X(0,1)", "U(0 1)", "N(0.5)", "", "U(1,0)"):
        with pytest.raises(ValueError):
            DistributionSpec.parse(text)


def test_spec_validation():
    with pytest.raises(ValueError):
        DistributionSpec(kind="uniform", lo=1.0, hi=0.0)
    with pytest.raises(ValueError):
        DistributionSpec(kind="truncnorm", mu=0.5, sigma=0.0)
    with pytest.raises(ValueError):
        DistributionSpec(kind="weibull")


# ------------------------------------------------------------------------ cdf


def test_cdf_uniform_quarter():
    assert cdf(UNIFORM, 0.25) == 0.25


def test_cdf_truncnorm_symmetry_at_mean():
    assert cdf(NORMAL_02, 0.5) == pytest.approx(0.5, abs=1e-14)


def test_cdf_support_endpoints():
    for spec in (UNIFORM, NORMAL_02, NORMAL_04):
        assert cdf(spec, spec.lo) == pytest.approx(0.0, abs=1e-14)
        assert cdf(spec, spec.hi) == pytest.approx(1.0, abs=1e-14)


def test_cdf_rejects_outside_support():
    with pytest.raises(ValueError):
        cdf(UNIFORM, -0.1)
    with pytest.raises(ValueError):
        cdf(NORMAL_02, 1.1)


@given(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=200)
def test_cdf_non_decreasing(a, b):
    lo, hi = min(a, b), max(a, b)
    for spec in (UNIFORM, NORMAL_04):
        assert cdf(spec, lo) <= cdf(spec, hi) + 1e-15


# -------------------------------------------------------------------- sampling


def test_sample_mean_of_uniform():
    draws = sample(UNIFORM, 1_000_000, seed=5)
    assert draws.mean() == pytest.approx(0.5, abs=0.002)


def test_sample_truncnorm_stays_in_support():
    draws = sample(NORMAL_04, 100_000, seed=6)
    assert draws.min() >= 0.0
    assert draws.max() <= 1.0


def test_sample_deterministic_per_seed():
    a = sample(NORMAL_02, 1000, seed=7)
    b = sample(NORMAL_02, 1000, seed=7)
    c = sample(NORMAL_02, 1000, seed=8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_rejects_bad_count():
    with pytest.raises(ValueError):
        sample(UNIFORM, 0, seed=1)


@pytest.mark.parametrize("spec", [UNIFORM, NORMAL_02, NORMAL_04], ids=lambda s: s.label())
def test_kolmogorov_smirnov_distance(spec):
    draws = np.sort(sample(spec, 1_000_000, seed=9))
    theory = cdf(spec, draws)
    empirical_hi = np.arange(1, draws.size + 1) / draws.size
    empirical_lo = np.arange(0, draws.size) / draws.size
    ks = max(np.abs(empirical_hi - theory).max(), np.abs(theory - empirical_lo).max())
    assert ks < 0.002


# ----------------------------------------------------------------- discretize


def test_discretize_uniform_quarters():
    seg = discretize(UNIFORM, 4)
    assert seg.masses == pytest.approx((0.25, 0.25, 0.25, 0.25), abs=1e-15)
    assert seg.delta == 0.25


def test_discretize_truncnorm_halves():
    seg = discretize(NORMAL_02, 2)
    assert seg.masses == pytest.approx((0.5, 0.5), abs=1e-14)


@pytest.mark.parametrize("spec", [UNIFORM, NORMAL_02, NORMAL_04], ids=lambda s: s.label())
@pytest.mark.parametrize("H", [1, 3, 10, 100])
def test_discretize_masses_sum_to_one(spec, H):
    seg = discretize(spec, H)
    assert abs(sum(seg.masses) - 1.0) <= 1e-12
    assert all(m >= 0.0 for m in seg.masses)


def test_discretize_uniform_density_recovery():
    # P(i) * H recovers the flat density exactly at every resolution
    for H in (10, 100, 1000):
        seg = discretize(UNIFORM, H)
        assert max(abs(m * H - 1.0) for m in seg.masses) < 1e-9


def test_segmented_distribution_validation():
    with pytest.raises(ValueError):
        SegmentedDistribution(H=0, delta=1.0, masses=())
    with pytest.raises(ValueError):
        SegmentedDistribution(H=2, delta=0.5, masses=(0.7, 0.7))
    with pytest.raises(ValueError):
        SegmentedDistribution(H=2, delta=0.5, masses=(1.2, -0.2))
