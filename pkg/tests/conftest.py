"""Session fixtures for the full-scale acceptance runs."""

import pytest


@pytest.fixture(scope="session")
def full_scale_table():
    """Benchmark grid at one million samples per simulation cell, H=100 bounds."""
    from bugshare.simulate import reproduce_table

    records = reproduce_table(H=100, samples=1_000_000, seed=20240810)
    return {(r.distribution, r.n, r.mechanism, r.objective): r for r in records}


@pytest.fixture(scope="session")
def lowerbound_h_sweep():
    """LP bounds at the sweep resolutions H=50 and H=200 for every grid row."""
    from bugshare.distributions import DistributionSpec
    from bugshare.lowerbound import max_delay_lower_bound, sum_delay_lower_bound

    sweep = {}
    for label in ("U(0,1)", "N(0.5,0.2)", "N(0.5,0.4)"):
        spec = DistributionSpec.parse(label)
        for n in (1, 2, 5, 10):
            for H in (50, 200):
                sweep[(label, n, "max", H)] = max_delay_lower_bound(spec, n, H)
                sweep[(label, n, "sum", H)] = sum_delay_lower_bound(spec, n, H)
    return sweep
