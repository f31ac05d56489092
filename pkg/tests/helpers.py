"""Shared reference data and independent oracles for the test suite."""

from __future__ import annotations

import itertools

import numpy as np

from bugshare.mechanisms import Grouping, TypeProfile, gcsod_allocate

# Reference values for the benchmark grid, keyed by (distribution label, n).
# Columns: (gcsod_max, cs_max, lb_max, gcsod_sum, cs_sum, lb_sum), all
# rounded to two decimals.
REFERENCE_TABLE = {
    ("U(0,1)", 1): (1.00, 1.00, 0.89, 1.00, 1.00, 0.89),
    ("U(0,1)", 2): (0.87, 0.75, 0.67, 1.75, 1.50, 0.96),
    ("U(0,1)", 5): (0.85, 0.67, 0.46, 2.67, 1.41, 0.94),
    ("U(0,1)", 10): (0.68, 0.65, 0.29, 3.01, 1.13, 0.89),
    ("N(0.5,0.2)", 1): (1.00, 1.00, 0.97, 1.00, 1.00, 0.97),
    ("N(0.5,0.2)", 2): (0.87, 0.75, 0.63, 1.75, 1.50, 0.89),
    ("N(0.5,0.2)", 5): (0.79, 0.27, 0.20, 2.13, 0.40, 0.27),
    ("N(0.5,0.2)", 10): (0.54, 0.15, 0.11, 2.20, 0.17, 0.14),
    ("N(0.5,0.4)", 1): (0.95, 0.95, 0.92, 0.95, 0.95, 0.92),
    ("N(0.5,0.4)", 2): (0.88, 0.76, 0.66, 1.73, 1.48, 0.94),
    ("N(0.5,0.4)", 5): (0.84, 0.57, 0.40, 2.54, 1.09, 0.71),
    ("N(0.5,0.4)", 10): (0.65, 0.50, 0.26, 2.76, 0.74, 0.59),
}

# The single-agent rows sell only when the lone value reaches the full cost,
# which happens with probability zero under a prior conditioned on [0, 1];
# their true expected delay is therefore exactly 1.00.  The N(0.5,0.4) n=1
# reference entry of 0.95 is not reachable by any sampler consistent with
# that prior (the same prior's masses do reproduce the 0.92 bound entry).
KNOWN_UNREPRODUCIBLE_SIM_ROWS = {("N(0.5,0.4)", 1)}

EXAMPLE_PROFILE = TypeProfile((0.9, 0.8, 0.26, 0.26))


def brute_force_sharing_set(values, deadline=1.0, tol=1e-12):
    """K(deadline) straight from its definition, by scanning every k."""
    members = []
    for k in range(1, len(values) + 1):
        if deadline <= 0.0:
            continue
        price = 1.0 / (k * deadline)
        if sum(1 for v in values if v >= price - tol) >= k:
            members.append(k)
    return members


def enumerate_gcsod(profile: TypeProfile):
    """Yield (grouping, outcome) for every left/right split via the scalar rule."""
    for bits in itertools.product("LR", repeat=len(profile)):
        grouping = Grouping(bits)
        yield grouping, gcsod_allocate(profile, grouping)


def gcsod_expectation_oracle(profile: TypeProfile):
    """Brute-force coin-flip expectations of the group rule."""
    n = len(profile)
    times = np.zeros(n)
    payments = np.zeros(n)
    tot_max = tot_sum = 0.0
    count = 0
    for _, out in enumerate_gcsod(profile):
        times += out.times
        payments += out.payments
        tot_max += max(out.times)
        tot_sum += sum(out.times)
        count += 1
    return times / count, payments / count, tot_max / count, tot_sum / count


def random_profiles(rng, count, n_low=2, n_high=8, lo=0.0, hi=1.0):
    """Seeded random profiles with per-profile agent counts in [n_low, n_high]."""
    profiles = []
    for _ in range(count):
        n = int(rng.integers(n_low, n_high + 1))
        profiles.append(TypeProfile(tuple(lo + (hi - lo) * rng.random(n))))
    return profiles


def lp_grid_oracle(masses, n, step=1e-3):
    """Brute-force optimum of the H=2 sum-delay model on a step grid.

    Scans t_0 slices with a vectorized (t_1, t_2) grid; payments sit at their
    sandwich extremes (the loosest feasible choice) and the unsold weight C
    is checked against its own grid.  Only H=2 is supported.
    """
    if len(masses) != 2:
        raise ValueError("oracle only handles H = 2")
    w1, w2 = masses
    m = int(round(1.0 / step))
    axis = np.arange(m + 1) / m
    delta = 0.5  # segment width of [0, 1] split in two
    t1 = axis[:, None]
    t2 = axis[None, :]
    objective = w1 * t1 + w2 * t2

    best = np.inf
    for t0 in axis:
        chain = (t1 <= t0) & (t2 <= t1)
        # sandwich extremes given the chain ordering (p_1 lower bound is 0)
        up1 = delta * (t0 - t1)
        up2 = delta * ((t0 - t2) + (t1 - t2))
        # budget interval that some C in [0, alloc_cap] can satisfy:
        #   w1*p_0 + w2*p_1 <= (1-C)/n <= w1*p_1 + w2*p_2  with p_0 = 0
        rhs_max = w1 * up1 + w2 * up2
        alloc_cap = np.minimum(w1 * t0 + w2 * t1, 1.0)
        c_lo = np.maximum(0.0, 1.0 - n * rhs_max)
        c_hi = alloc_cap
        # snap to the C grid: a grid point must fall inside [c_lo, c_hi]
        c_feasible = np.ceil(c_lo / step - 1e-9) * step <= c_hi + 1e-12
        feasible = chain & c_feasible
        if feasible.any():
            best = min(best, float(objective[feasible].min()))
    return best
