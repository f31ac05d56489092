"""Monte-Carlo and exact-expectation estimation of mechanism delays under priors.

Profiles are sampled in chunks from a seeded stream and pushed through
vectorized replicas of the allocation rules that only track the max and sum
of the allocation times (the scalar rules in :mod:`bugshare.mechanisms` stay
the reference; the test suite checks row-by-row agreement).  The group rule
runs either with one sampled coin-flip vector per profile (``monte_carlo``)
or with the full 2^n grouping enumeration per profile (``exact_grouping``).

``reproduce_table`` assembles the benchmark grid: expected max/sum delay of
the plain and group cost-sharing rules plus the two LP lower bounds, for
U(0,1), N(0.5,0.2) and N(0.5,0.4) at n in {1, 2, 5, 10}.
"""

from __future__ import annotations

import io
import json
import csv as _csv
from dataclasses import dataclass

import numpy as np

from .distributions import DistributionSpec, draw
from .lowerbound import max_delay_lower_bound, sum_delay_lower_bound
from .mechanisms import ENUMERATION_CAP, QUALIFY_TOL, grouping_table

MECHANISMS = ("cs", "csd", "csod", "gcsod")
MODES = ("monte_carlo", "exact_grouping")

TABLE_DISTRIBUTIONS = ("U(0,1)", "N(0.5,0.2)", "N(0.5,0.4)")
TABLE_AGENT_COUNTS = (1, 2, 5, 10)

_CHUNK_ROWS = 200_000


@dataclass(frozen=True)
class SimulationConfig:
    mechanism: str
    spec: DistributionSpec
    n: int
    samples: int
    seed: int
    mode: str = "monte_carlo"
    t_c: float | None = None

    def __post_init__(self) -> None:
        if self.mechanism not in MECHANISMS:
            raise ValueError(f"unknown mechanism {self.mechanism!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.mechanism == "csd":
            if self.t_c is None or not 0.0 <= self.t_c <= 1.0:
                raise ValueError("csd needs a deadline t_c in [0, 1]")
        if self.mode == "exact_grouping":
            if self.mechanism != "gcsod":
                raise ValueError("exact_grouping mode only applies to gcsod")
            if self.n > ENUMERATION_CAP:
                raise ValueError(f"exact_grouping capped at n={ENUMERATION_CAP}")


@dataclass(frozen=True)
class SimulationReport:
    expected_max_delay: float
    expected_sum_delay: float
    standard_error_max: float
    standard_error_sum: float
    samples_used: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "expected_max_delay": self.expected_max_delay,
            "expected_sum_delay": self.expected_sum_delay,
            "standard_error_max": self.standard_error_max,
            "standard_error_sum": self.standard_error_sum,
            "samples_used": self.samples_used,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationReport":
        return cls(**data)


@dataclass(frozen=True)
class TableRow:
    distribution: str
    n: int
    mechanism: str  # "gcsod" | "cs" | "lower_bound"
    objective: str  # "max" | "sum"
    value: float
    stderr: float | None

    def to_dict(self) -> dict:
        return {
            "distribution": self.distribution,
            "n": self.n,
            "mechanism": self.mechanism,
            "objective": self.objective,
            "value": self.value,
            "stderr": self.stderr,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TableRow":
        return cls(**data)


def _sorted_desc(values: np.ndarray) -> np.ndarray:
    return -np.sort(-values, axis=1)


def _kstar_rows(sorted_desc: np.ndarray, deadlines: np.ndarray) -> np.ndarray:
    """Row-wise largest k with k values >= 1/(k*deadline); 0 where none."""
    n = sorted_desc.shape[1]
    ks = np.arange(1, n + 1)
    with np.errstate(divide="ignore"):
        thresholds = 1.0 / (ks[None, :] * deadlines[:, None])
    ok = sorted_desc >= thresholds - QUALIFY_TOL
    return np.where(ok, ks[None, :], 0).max(axis=1)


def _deadline_raw_rows(sorted_desc: np.ndarray) -> np.ndarray:
    """Row-wise uncapped optimal deadline (inf when no positive value)."""
    n = sorted_desc.shape[1]
    ks = np.arange(1, n + 1)
    with np.errstate(divide="ignore"):
        candidates = 1.0 / (ks * sorted_desc)
    candidates = np.where(sorted_desc > 0.0, candidates, np.inf)
    return candidates.min(axis=1)


def batch_csd_delays(values: np.ndarray, t_c: float) -> tuple[np.ndarray, np.ndarray]:
    """(max delay, sum delay) per row under the fixed-deadline rule."""
    rows, n = values.shape
    k_star = _kstar_rows(_sorted_desc(values), np.full(rows, t_c))
    sold = k_star > 0
    mx = np.where(sold & (k_star == n), 0.0, t_c)
    sm = np.where(sold, (n - k_star) * t_c, n * t_c)
    return mx, sm


def batch_cs_delays(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return batch_csd_delays(values, 1.0)


def batch_csod_delays(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(max delay, sum delay) per row under the optimal-deadline rule."""
    n = values.shape[1]
    vs = _sorted_desc(values)
    t_star = np.minimum(_deadline_raw_rows(vs), 1.0)
    k_star = _kstar_rows(vs, t_star)
    sold = k_star > 0
    mx = np.where(sold, np.where(k_star == n, 0.0, t_star), 1.0)
    sm = np.where(sold, (n - k_star) * t_star, float(n))
    return mx, sm


def batch_gcsod_delays(values: np.ndarray, left: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(max delay, sum delay) per row of the group rule under given coin flips."""
    rows, n = values.shape
    ks = np.arange(1, n + 1)

    def side(member: np.ndarray):
        vals_sorted = _sorted_desc(np.where(member, values, 0.0))
        raw = _deadline_raw_rows(vals_sorted)
        t_star = np.minimum(raw, 1.0)
        sellable = _kstar_rows(vals_sorted, t_star) > 0
        return vals_sorted, t_star, sellable

    l_sorted, dl, l_ok = side(left)
    r_sorted, dr, r_ok = side(~left)

    left_wins = (dl < dr) | ((dl == dr) & l_ok)
    right_wins = ~left_wins & ((dr < dl) | r_ok)
    sold = left_wins | right_wins

    win_sorted = np.where(left_wins[:, None], l_sorted, r_sorted)
    own = np.where(left_wins, dl, dr)
    extended = np.where(left_wins, dr, dl)
    k_star = _kstar_rows(win_sorted, extended)

    n_win = np.where(left_wins, left.sum(axis=1), n - left.sum(axis=1))
    n_lose = n - n_win
    mx = np.maximum(
        np.where(n_win > k_star, extended, 0.0),
        np.where(n_lose > 0, own, 0.0),
    )
    sm = (n_win - k_star) * extended + n_lose * own
    mx = np.where(sold, mx, 1.0)
    sm = np.where(sold, sm, float(n))
    return mx, sm


def _exact_grouping_delays(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-profile exact expectations over all groupings of (max, sum) delay."""
    rows = values.shape[0]
    mx = np.empty(rows)
    sm = np.empty(rows)
    for r in range(rows):
        times, _ = grouping_table(values[r])
        mx[r] = times.max(axis=1).mean()
        sm[r] = times.sum(axis=1).mean()
    return mx, sm


def estimate(config: SimulationConfig) -> SimulationReport:
    """Expected delays of a mechanism under a prior, with standard errors.

    Identical configs and seeds produce bit-identical reports; the profile
    and coin-flip streams are split so the draws do not interleave.
    """
    seq = np.random.SeedSequence(config.seed)
    value_seed, coin_seed = seq.spawn(2)
    rng_values = np.random.default_rng(value_seed)
    rng_coins = np.random.default_rng(coin_seed)

    total = np.zeros(2)
    total_sq = np.zeros(2)
    remaining = config.samples
    while remaining > 0:
        m = min(remaining, _CHUNK_ROWS)
        values = draw(config.spec, (m, config.n), rng_values)
        if config.mechanism == "cs":
            mx, sm = batch_cs_delays(values)
        elif config.mechanism == "csd":
            mx, sm = batch_csd_delays(values, config.t_c)
        elif config.mechanism == "csod":
            mx, sm = batch_csod_delays(values)
        elif config.mode == "exact_grouping":
            mx, sm = _exact_grouping_delays(values)
        else:
            left = rng_coins.random((m, config.n)) < 0.5
            mx, sm = batch_gcsod_delays(values, left)
        total += (mx.sum(), sm.sum())
        total_sq += ((mx * mx).sum(), (sm * sm).sum())
        remaining -= m

    count = config.samples
    mean = total / count
    if count > 1:
        var = np.maximum(total_sq - count * mean**2, 0.0) / (count - 1)
        stderr = np.sqrt(var / count)
    else:
        stderr = np.zeros(2)
    return SimulationReport(
        expected_max_delay=float(mean[0]),
        expected_sum_delay=float(mean[1]),
        standard_error_max=float(stderr[0]),
        standard_error_sum=float(stderr[1]),
        samples_used=count,
        seed=config.seed,
    )


def reproduce_table(H: int = 100, samples: int = 1_000_000, seed: int = 0) -> list[TableRow]:
    """Benchmark grid of simulated delays and LP bounds, in long-record form.

    Mechanisms in one grid row share the sampled profiles (same seed), which
    keeps their comparison common-random-number friendly.
    """
    records: list[TableRow] = []
    for label in TABLE_DISTRIBUTIONS:
        spec = DistributionSpec.parse(label)
        for n in TABLE_AGENT_COUNTS:
            for mech in ("gcsod", "cs"):
                report = estimate(
                    SimulationConfig(mechanism=mech, spec=spec, n=n, samples=samples, seed=seed)
                )
                for objective, value, err in (
                    ("max", report.expected_max_delay, report.standard_error_max),
                    ("sum", report.expected_sum_delay, report.standard_error_sum),
                ):
                    records.append(TableRow(label, n, mech, objective, value, err))
            records.append(
                TableRow(label, n, "lower_bound", "max", max_delay_lower_bound(spec, n, H), None)
            )
            records.append(
                TableRow(label, n, "lower_bound", "sum", sum_delay_lower_bound(spec, n, H), None)
            )
    return records


def table_to_csv(records: list[TableRow]) -> str:
    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerow(["distribution", "n", "mechanism", "objective", "value", "stderr"])
    for row in records:
        writer.writerow(
            [
                row.distribution,
                row.n,
                row.mechanism,
                row.objective,
                f"{row.value:.6f}",
                "" if row.stderr is None else f"{row.stderr:.6f}",
            ]
        )
    return buf.getvalue()


def table_to_json(records: list[TableRow]) -> str:
    return json.dumps([row.to_dict() for row in records], indent=2)


def table_from_csv(text: str) -> list[TableRow]:
    reader = _csv.DictReader(io.StringIO(text))
    records = []
    for entry in reader:
        records.append(
            TableRow(
                distribution=entry["distribution"],
                n=int(entry["n"]),
                mechanism=entry["mechanism"],
                objective=entry["objective"],
                value=float(entry["value"]),
                stderr=float(entry["stderr"]) if entry["stderr"] else None,
            )
        )
    return records
