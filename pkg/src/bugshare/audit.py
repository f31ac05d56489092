"""Empirical checkers for the mechanism guarantees.

Everything here treats a mechanism as a black-box callable from a profile to
an object carrying ``times`` and ``payments`` (an :class:`~bugshare.mechanisms.Outcome`
or the expectation record of the randomized group rule).  Strategy-proofness
is probed on misreport grids, individual rationality and budget balance on
realized outcomes, and allocation-time monotonicity on report sweeps.  The
payment identity of monotone single-parameter mechanisms doubles as an
independent oracle for the charged payments.

``alpha`` is the expected factor by which a fair random split of the k cost
sharers can stretch the optimal deadline; ``check_competitive_max`` and
``check_competitive_sum`` verify the 4x / 8x delay guarantees of the group
rule against the optimal-deadline rule profile by profile.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import Callable, Iterable, Protocol, Sequence

import numpy as np

from .mechanisms import (
    ENUMERATION_CAP,
    QUALIFY_TOL,
    Outcome,
    TypeProfile,
    csod_allocate,
    gcsod_expected,
)

DEFAULT_EPSILON = 1e-9
MONO_TOL = 1e-9
IR_TOL = 1e-9
BB_TOL = 1e-9

MAX_DELAY_BOUND = 4.0
SUM_DELAY_BOUND = 8.0


class Allocation(Protocol):
    times: Sequence[float]
    payments: Sequence[float]


Mechanism = Callable[[TypeProfile], Allocation]


class BoundViolation(RuntimeError):
    """A proven competitive-ratio guarantee failed; indicates an implementation bug."""


@dataclass(frozen=True)
class Violation:
    """One counterexample found by a checker."""

    profile: tuple[float, ...]
    agent: int
    detail: float | None  # misreport, deadline or sweep point, None if n/a
    amount: float  # utility gain, deficit, or imbalance


@dataclass
class AuditReport:
    property: str  # "SP" | "IR" | "BB" | "MONO"
    violations: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "passed": self.passed,
            "violations": [asdict(v) for v in self.violations],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AuditReport":
        return cls(
            property=data["property"],
            violations=[
                Violation(tuple(v["profile"]), v["agent"], v["detail"], v["amount"])
                for v in data["violations"]
            ],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class CompetitiveReport:
    """Delay ratios of the group rule against the optimal-deadline rule."""

    profile: tuple[float, ...]
    ratio_max: float
    ratio_sum: float
    assumptions_hold: bool


def max_delay(outcome: Allocation) -> float:
    return max(outcome.times)


def sum_delay(outcome: Allocation) -> float:
    return sum(outcome.times)


def utility(value: float, times: Sequence[float], payments: Sequence[float], agent: int) -> float:
    return (1.0 - times[agent]) * value - payments[agent]


def misreport_grid(n: int, deadline: float = 1.0, points: int = 50, upper: float = 1.0):
    """Uniform misreports on [0, upper] plus every 1/(k*deadline) entry threshold."""
    grid = set(np.linspace(0.0, upper, points).tolist())
    if deadline > 0.0:
        grid.update(1.0 / (k * deadline) for k in range(1, n + 1))
    return tuple(sorted(grid))


def check_sp(
    mechanism: Mechanism,
    profiles: Iterable[TypeProfile],
    report_grid: Sequence[float],
    epsilon: float = DEFAULT_EPSILON,
) -> AuditReport:
    """Grid-probe truthfulness: no misreport may beat the truth by more than epsilon."""
    if epsilon < 0.0:
        raise ValueError("epsilon must be non-negative")
    violations = []
    for profile in profiles:
        truth = mechanism(profile)
        for agent, value in enumerate(profile.values):
            u_truth = utility(value, truth.times, truth.payments, agent)
            for report in report_grid:
                if report == value:
                    continue
                dev = mechanism(profile.replace(agent, report))
                u_dev = utility(value, dev.times, dev.payments, agent)
                if u_dev > u_truth + epsilon:
                    violations.append(
                        Violation(profile.values, agent, float(report), u_dev - u_truth)
                    )
    return AuditReport("SP", violations)


def check_ir(mechanism: Mechanism, profiles: Iterable[TypeProfile]) -> AuditReport:
    """Truthful utility must never be negative."""
    violations = []
    for profile in profiles:
        out = mechanism(profile)
        for agent, value in enumerate(profile.values):
            u = utility(value, out.times, out.payments, agent)
            if u < -IR_TOL:
                violations.append(Violation(profile.values, agent, None, u))
    return AuditReport("IR", violations)


def check_bb(
    mechanism: Callable[[TypeProfile], Outcome | Iterable[Outcome]],
    profiles: Iterable[TypeProfile],
) -> AuditReport:
    """Ex post budget balance on realized outcomes.

    The mechanism may return one outcome or an iterable of realizations (the
    group rule is checked per grouping); sold runs must collect exactly 1 and
    failed runs must charge nothing and deliver nothing before time 1.
    """
    violations = []
    for profile in profiles:
        result = mechanism(profile)
        outcomes = [result] if isinstance(result, Outcome) else list(result)
        for out in outcomes:
            if out.sold:
                imbalance = sum(out.payments) - 1.0
                if abs(imbalance) > BB_TOL:
                    violations.append(Violation(profile.values, -1, None, imbalance))
            else:
                if any(p != 0.0 for p in out.payments):
                    violations.append(
                        Violation(profile.values, -1, None, sum(out.payments))
                    )
                for agent, t in enumerate(out.times):
                    if t < 1.0 - BB_TOL:
                        violations.append(Violation(profile.values, agent, t, 1.0 - t))
    return AuditReport("BB", violations)


def check_monotonicity(
    mechanism: Mechanism,
    profiles: Iterable[TypeProfile],
    grid: Sequence[float],
) -> AuditReport:
    """Allocation time must be non-increasing along each agent's report sweep."""
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("report grid must be sorted ascending")
    violations = []
    for profile in profiles:
        for agent in range(len(profile)):
            previous = None
            for report in grid:
                t = mechanism(profile.replace(agent, report)).times[agent]
                if previous is not None and t > previous + MONO_TOL:
                    violations.append(
                        Violation(profile.values, agent, float(report), t - previous)
                    )
                previous = t
    return AuditReport("MONO", violations)


def myerson_payment(
    mechanism: Mechanism,
    agent: int,
    profile: TypeProfile,
    integration_grid_size: int = 10_000,
) -> float:
    """Payment implied by the allocation curve of a monotone truthful mechanism.

    Midpoint-integrates the agent's allocation-time curve from 0 to her
    report; for a strategy-proof mechanism the result matches the charged
    payment up to the integration step, making this an independent oracle.
    """
    if integration_grid_size < 1:
        raise ValueError("integration grid must have at least one cell")
    value = profile.values[agent]
    t_truth = mechanism(profile).times[agent]
    if value == 0.0:
        return 0.0
    step = value / integration_grid_size
    acc = 0.0
    for j in range(integration_grid_size):
        z = (j + 0.5) * step
        acc += 1.0 - mechanism(profile.replace(agent, z)).times[agent]
    return value * (1.0 - t_truth) - acc * step


def alpha(k: int) -> float:
    """Expected deadline stretch of a fair split of k cost sharers.

    Average over the binomial split sizes of k / max(1, min(left, right)),
    evaluated in exact rational arithmetic before the final conversion.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    total = Fraction(0)
    for k_left in range(k + 1):
        weight = math.comb(k, k_left) * k
        total += Fraction(weight, max(1, min(k_left, k - k_left)))
    return float(total / 2**k)


def verify_alpha_bound(k_max: int) -> bool:
    """True iff the split stretch factor stays below 4 for every k up to k_max."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    return all(alpha(k) < MAX_DELAY_BOUND for k in range(1, k_max + 1))


def _competitive_report(profile: TypeProfile, cap: int) -> tuple[CompetitiveReport, int]:
    baseline = csod_allocate(profile)
    expected = gcsod_expected(profile, cap=cap)
    k_star = sum(1 for p in baseline.payments if p > 0.0)
    denom_max = max_delay(baseline)
    denom_sum = sum_delay(baseline)
    ratio_max = expected.max_delay / denom_max if denom_max > 0.0 else math.inf
    ratio_sum = expected.sum_delay / denom_sum if denom_sum > 0.0 else math.inf
    values_ok = all(v <= 1.0 + QUALIFY_TOL for v in profile.values)
    report = CompetitiveReport(profile.values, ratio_max, ratio_sum, values_ok)
    return report, k_star


def check_competitive_max(profile: TypeProfile, cap: int = ENUMERATION_CAP) -> CompetitiveReport:
    """Expected max delay of the group rule within 4x of the optimal-deadline rule.

    Requires every value at most 1 and at least one agent outside the cost
    sharing set; otherwise the report is returned with
    ``assumptions_hold=False`` and nothing is asserted.
    """
    report, k_star = _competitive_report(profile, cap)
    holds = report.assumptions_hold and k_star < len(profile)
    report = CompetitiveReport(report.profile, report.ratio_max, report.ratio_sum, holds)
    if holds and report.ratio_max > MAX_DELAY_BOUND + DEFAULT_EPSILON:
        raise BoundViolation(
            f"max-delay ratio {report.ratio_max} exceeds {MAX_DELAY_BOUND} on {profile.values}"
        )
    return report


def check_competitive_sum(profile: TypeProfile, cap: int = ENUMERATION_CAP) -> CompetitiveReport:
    """Expected sum delay of the group rule within 8x of the optimal-deadline rule.

    Requires every value at most 1 and at least half the agents outside the
    cost sharing set.
    """
    report, k_star = _competitive_report(profile, cap)
    holds = report.assumptions_hold and 2 * k_star <= len(profile)
    report = CompetitiveReport(report.profile, report.ratio_max, report.ratio_sum, holds)
    if holds and report.ratio_sum > SUM_DELAY_BOUND + DEFAULT_EPSILON:
        raise BoundViolation(
            f"sum-delay ratio {report.ratio_sum} exceeds {SUM_DELAY_BOUND} on {profile.values}"
        )
    return report
