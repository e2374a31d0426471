"""Slot-level simulator and analysis toolkit for modern random access protocols."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    DegreeDistribution,
    FrameConfig,
    ProtocolConfig,
    ProtocolKind,
    REFERENCE_DISTRIBUTION,
    TransmissionSchedule,
    avg_degree,
    edge_perspective,
    format_distribution,
    generate_schedule,
    inject_schedule,
    parse_distribution,
)
from .decoder import DecodeOutcome, SlotOccupancy, build_occupancy, peel, stopping_set  # noqa: F401
from .analysis import DeResult, de_fixed_point, de_threshold, sa_throughput  # noqa: F401
from .engine import (  # noqa: F401
    SweepPoint,
    SweepResult,
    TrialMetrics,
    load_at_target_plr,
    load_results,
    persist,
    run_trial,
    sweep,
)
