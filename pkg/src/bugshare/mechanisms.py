"""Cost-sharing mechanisms for selling one unit-cost piece of information.

One bug (cost normalized to 1) is offered to n agents over a normalized life
cycle [0, 1].  An agent who receives the information at time t and values it
at v gets utility (1 - t) * v minus whatever she pays.  A mechanism maps the
reported valuations to per-agent allocation times and payments, collecting
exactly 1 in total when the sale happens.

Four allocation rules are implemented:

* ``cs_allocate``     -- plain cost sharing: the largest group of k agents
  each willing to pay 1/k gets the information at time 0; everyone else
  waits until time 1.
* ``csd_allocate``    -- cost sharing against a fixed deadline t_C: payers
  buy the premium window [0, t_C] and everybody else goes free at t_C.
* ``csod_allocate``   -- cost sharing with the profile's own optimal
  (earliest still-fundable) deadline.
* ``gcsod_allocate``  -- the randomized group variant: agents are split into
  two groups and each group runs the deadline mechanism using the *other*
  group's optimal deadline, which restores strategy-proofness.

All rules are pure functions; ``gcsod_sample`` is pure given its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

# Absolute slack for every "value is at least 1/(k * deadline)" test, so that
# boundary profiles such as (0.5, 0.5) behave identically across platforms.
QUALIFY_TOL = 1e-12

# Payments must sum to 1 within this tolerance whenever the bug is sold.
BUDGET_TOL = 1e-9

# Default limit for exact enumeration of the 2^n groupings.
ENUMERATION_CAP = 16


@dataclass(frozen=True)
class TypeProfile:
    """Reported valuations, one per agent, in units of the bug's cost."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("a type profile needs at least one agent")
        for v in vals:
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"valuations must be finite and non-negative, got {v}")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def replace(self, agent: int, value: float) -> "TypeProfile":
        """Profile with ``agent``'s report swapped out (used by the audits)."""
        vals = list(self.values)
        vals[agent] = value
        return TypeProfile(tuple(vals))


@dataclass(frozen=True)
class Outcome:
    """Allocation times, payments and the sold flag of one mechanism run."""

    times: tuple[float, ...]
    payments: tuple[float, ...]
    sold: bool

    def __post_init__(self) -> None:
        times = tuple(float(t) for t in self.times)
        payments = tuple(float(p) for p in self.payments)
        if len(times) != len(payments):
            raise ValueError("times and payments must have equal length")
        for t in times:
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"allocation times must lie in [0, 1], got {t}")
        for p in payments:
            if p < 0.0:
                raise ValueError(f"payments must be non-negative, got {p}")
        if self.sold:
            if abs(sum(payments) - 1.0) > BUDGET_TOL:
                raise ValueError("sold outcomes must collect payments summing to 1")
        elif any(p != 0.0 for p in payments):
            raise ValueError("unsold outcomes must not collect payments")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "payments", payments)


@dataclass(frozen=True)
class Grouping:
    """A left/right split of the agents, the random bits of the group rule."""

    side: tuple[str, ...]

    def __post_init__(self) -> None:
        side = tuple(self.side)
        for s in side:
            if s not in ("L", "R"):
                raise ValueError(f"group labels must be 'L' or 'R', got {s!r}")
        object.__setattr__(self, "side", side)

    @classmethod
    def from_string(cls, text: str) -> "Grouping":
        return cls(tuple(text.upper()))

    def __len__(self) -> int:
        return len(self.side)


class DeadlineResult(NamedTuple):
    """Optimal deadline of a profile; ``k_star == 0`` means nothing is fundable."""

    t_star: float
    k_star: int


class ExpectedOutcome(NamedTuple):
    """Coin-flip averages of the group rule over all 2^n groupings."""

    times: tuple[float, ...]
    payments: tuple[float, ...]
    max_delay: float
    sum_delay: float


def _max_k(sorted_desc: Sequence[float], deadline: float) -> int:
    """Largest k such that k values meet the 1/(k*deadline) price, else 0."""
    if deadline <= 0.0:
        return 0
    best = 0
    for k in range(1, len(sorted_desc) + 1):
        if sorted_desc[k - 1] >= 1.0 / (k * deadline) - QUALIFY_TOL:
            best = k
    return best


def _optimal_deadline(values: Sequence[float]) -> DeadlineResult:
    """Deadline search over a bare value sequence; empty groups yield (1, 0)."""
    sorted_desc = sorted(values, reverse=True)
    earliest = math.inf
    for k, v in enumerate(sorted_desc, start=1):
        if v > 0.0:
            earliest = min(earliest, 1.0 / (k * v))
    t_star = min(earliest, 1.0)
    return DeadlineResult(t_star, _max_k(sorted_desc, t_star))


def _share_outcome(values: Sequence[float], deadline: float) -> Outcome:
    """Cost sharing on [0, deadline]: top k* agents pay 1/k*, rest wait free."""
    n = len(values)
    sorted_desc = sorted(values, reverse=True)
    k_star = _max_k(sorted_desc, deadline)
    if k_star == 0:
        return Outcome((deadline,) * n, (0.0,) * n, sold=False)
    ranked = sorted(range(n), key=lambda i: (-values[i], i))
    payers = set(ranked[:k_star])
    share = 1.0 / k_star
    times = tuple(0.0 if i in payers else deadline for i in range(n))
    payments = tuple(share if i in payers else 0.0 for i in range(n))
    return Outcome(times, payments, sold=True)


def cs_allocate(profile: TypeProfile) -> Outcome:
    """Plain cost sharing: the unsold outcome has everyone wait until time 1."""
    return csd_allocate(profile, 1.0)


def csd_allocate(profile: TypeProfile, t_c: float) -> Outcome:
    """Cost sharing with a fixed deadline.

    When no group of k agents is willing to pay 1/k for the window [0, t_c],
    the bug is not sold but everyone is still released at t_c.  For t_c < 1
    that outcome breaks ex post budget balance by construction; the audit
    module is the place that flags it.
    """
    if not 0.0 <= t_c <= 1.0:
        raise ValueError(f"deadline must lie in [0, 1], got {t_c}")
    return _share_outcome(profile.values, t_c)


def optimal_deadline(profile: TypeProfile) -> DeadlineResult:
    """Earliest deadline at which some group still covers the unit cost.

    The candidate deadlines are 1/(k * v_(k)) over the k-th highest values;
    when even the best exceeds 1 (or no value is positive) the deadline is 1
    and ``k_star`` reports the size of the sharing set at deadline 1, which
    may be 0.
    """
    return _optimal_deadline(profile.values)


def csod_allocate(profile: TypeProfile) -> Outcome:
    """Cost sharing with the profile's own optimal deadline.

    Budget balance always holds: the deadline is below 1 only when the
    sharing succeeds, so a failed sale implies everyone waits until 1.
    """
    return csd_allocate(profile, optimal_deadline(profile).t_star)


def gcsod_allocate(profile: TypeProfile, grouping: Grouping) -> Outcome:
    """Group cost sharing: each side faces the other side's optimal deadline.

    The side with the earlier own deadline wins and runs the deadline
    mechanism under the (extended) deadline of the other side; the losing
    side's cost sharing necessarily fails and its agents go free at the
    winner's own deadline.  Exact ties favour the left group.  If neither
    side can fund the bug at deadline 1, it is not bought at all.
    """
    n = len(profile)
    if len(grouping) != n:
        raise ValueError(f"grouping has {len(grouping)} labels for {n} agents")
    left = [i for i in range(n) if grouping.side[i] == "L"]
    right = [i for i in range(n) if grouping.side[i] == "R"]
    d_left = _optimal_deadline([profile.values[i] for i in left])
    d_right = _optimal_deadline([profile.values[i] for i in right])

    if d_left.t_star < d_right.t_star or (
        d_left.t_star == d_right.t_star and d_left.k_star >= 1
    ):
        winner, loser = left, right
        own, extended = d_left.t_star, d_right.t_star
    elif d_right.t_star < d_left.t_star or d_right.k_star >= 1:
        winner, loser = right, left
        own, extended = d_right.t_star, d_left.t_star
    else:
        return Outcome((1.0,) * n, (0.0,) * n, sold=False)

    winner_values = [profile.values[i] for i in winner]
    k_star = _max_k(sorted(winner_values, reverse=True), extended)
    ranked = sorted(winner, key=lambda i: (-profile.values[i], i))
    payers = set(ranked[:k_star])
    share = 1.0 / k_star
    times = [0.0] * n
    payments = [0.0] * n
    for i in winner:
        times[i] = 0.0 if i in payers else extended
        payments[i] = share if i in payers else 0.0
    for i in loser:
        times[i] = own
    return Outcome(tuple(times), tuple(payments), sold=True)


def gcsod_sample(profile: TypeProfile, seed: int) -> Outcome:
    """One realization of the group rule with fair coin flips drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    side = tuple("L" if u < 0.5 else "R" for u in rng.random(len(profile)))
    return gcsod_allocate(profile, Grouping(side))


def _grouping_matrix(n: int) -> np.ndarray:
    """Boolean (2^n, n) matrix of every left/right split; True means left."""
    codes = np.arange(2**n, dtype=np.uint32)
    return (codes[:, None] >> np.arange(n, dtype=np.uint32)) & 1 == 1


def grouping_table(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-agent times and payments of the group rule for all 2^n groupings.

    Vectorized replica of ``gcsod_allocate`` row by row; the scalar rule is
    the reference and the test suite checks exact agreement.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    left = _grouping_matrix(n)
    v = values[None, :]
    ks = np.arange(1, n + 1)

    def side_deadline(member: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        vals = np.where(member, v, 0.0)
        vals_sorted = -np.sort(-vals, axis=1)
        with np.errstate(divide="ignore"):
            candidates = 1.0 / (ks * vals_sorted)
        candidates[vals_sorted <= 0.0] = np.inf
        t_star = np.minimum(candidates.min(axis=1), 1.0)
        thresholds = 1.0 / (ks[None, :] * t_star[:, None])
        sellable = (vals_sorted >= thresholds - QUALIFY_TOL).any(axis=1)
        return t_star, sellable

    dl, l_ok = side_deadline(left)
    dr, r_ok = side_deadline(~left)

    left_wins = (dl < dr) | ((dl == dr) & l_ok)
    right_wins = ~left_wins & ((dr < dl) | r_ok)
    sold = left_wins | right_wins

    member = np.where(left_wins[:, None], left, ~left)
    own = np.where(left_wins, dl, dr)
    extended = np.where(left_wins, dr, dl)

    masked = np.where(member, v, -1.0)  # sentinel sorts after every real value
    masked_sorted = -np.sort(-masked, axis=1)
    thresholds = 1.0 / (ks[None, :] * extended[:, None])
    qualified = masked_sorted >= thresholds - QUALIFY_TOL
    k_star = np.where(qualified, ks[None, :], 0).max(axis=1)

    order = np.argsort(-masked, axis=1, kind="stable")
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.broadcast_to(np.arange(n), order.shape), axis=1)
    payer = member & (rank < k_star[:, None]) & sold[:, None]

    times = np.where(payer, 0.0, np.where(member, extended[:, None], own[:, None]))
    times = np.where(sold[:, None], times, 1.0)
    with np.errstate(divide="ignore"):
        share = np.where(k_star > 0, 1.0 / np.maximum(k_star, 1), 0.0)
    payments = np.where(payer, share[:, None], 0.0)
    return times, payments


def gcsod_expected(profile: TypeProfile, cap: int = ENUMERATION_CAP) -> ExpectedOutcome:
    """Exact expectation of the group rule over all 2^n equiprobable groupings.

    The max-delay figure is the expectation of the realized maximum, not the
    maximum of the per-agent expectations.
    """
    n = len(profile)
    if n > cap:
        raise ValueError(
            f"exact grouping enumeration capped at n={cap}; "
            f"got n={n} (use Monte Carlo sampling instead)"
        )
    times, payments = grouping_table(np.array(profile.values))
    return ExpectedOutcome(
        times=tuple(float(t) for t in times.mean(axis=0)),
        payments=tuple(float(p) for p in payments.mean(axis=0)),
        max_delay=float(times.max(axis=1).mean()),
        sum_delay=float(times.sum(axis=1).mean()),
    )
