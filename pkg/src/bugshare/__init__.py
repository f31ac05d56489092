"""Cost-sharing mechanisms for timed release of security information."""

from .mechanisms import (
    DeadlineResult,
    ExpectedOutcome,
    Grouping,
    Outcome,
    TypeProfile,
    cs_allocate,
    csd_allocate,
    csod_allocate,
    gcsod_allocate,
    gcsod_expected,
    gcsod_sample,
    optimal_deadline,
)
from .audit import (
    AuditReport,
    CompetitiveReport,
    alpha,
    check_bb,
    check_competitive_max,
    check_competitive_sum,
    check_ir,
    check_monotonicity,
    check_sp,
    max_delay,
    misreport_grid,
    myerson_payment,
    sum_delay,
    verify_alpha_bound,
)
from .distributions import DistributionSpec, SegmentedDistribution, cdf, discretize, sample
from .lowerbound import (
    LPModel,
    LPSolution,
    LPStatus,
    build_common_constraints,
    max_delay_lower_bound,
    solve_lp,
    sum_delay_lower_bound,
)
from .simulate import (
    SimulationConfig,
    SimulationReport,
    TableRow,
    estimate,
    reproduce_table,
)

__version__ = "0.1.0"

__all__ = [
    "TypeProfile",
    "Outcome",
    "Grouping",
    "DeadlineResult",
    "ExpectedOutcome",
    "cs_allocate",
    "csd_allocate",
    "csod_allocate",
    "optimal_deadline",
    "gcsod_allocate",
    "gcsod_sample",
    "gcsod_expected",
    "AuditReport",
    "CompetitiveReport",
    "max_delay",
    "sum_delay",
    "check_sp",
    "check_ir",
    "check_bb",
    "check_monotonicity",
    "misreport_grid",
    "myerson_payment",
    "alpha",
    "verify_alpha_bound",
    "check_competitive_max",
    "check_competitive_sum",
    "DistributionSpec",
    "SegmentedDistribution",
    "cdf",
    "sample",
    "discretize",
    "LPModel",
    "LPSolution",
    "LPStatus",
    "build_common_constraints",
    "solve_lp",
    "sum_delay_lower_bound",
    "max_delay_lower_bound",
    "SimulationConfig",
    "SimulationReport",
    "TableRow",
    "estimate",
    "reproduce_table",
]
