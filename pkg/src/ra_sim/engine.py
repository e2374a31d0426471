"""Monte Carlo trial runner, load sweeps, and results persistence.

One trial is one buffered frame: generate a schedule, peel it, count the
decoded packets. A sweep runs a fixed number of trials per load point with
per-trial seeds derived from (master seed, load index, trial index), so the
numbers are identical no matter how many workers execute the trials or in
what order they finish.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import (
    FrameConfig,
    ProtocolConfig,
    format_distribution,
    generate_schedule,
)
from .decoder import peel

CSV_COLUMNS = (
    "protocol",
    "distribution",
    "n_slots",
    "load",
    "trials",
    "throughput_mean",
    "throughput_ci95",
    "plr_mean",
    "plr_ci95_low",
    "plr_ci95_high",
    "packets_total",
)

_Z95 = 1.959963984540054  # two-sided 95% normal quantile

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SchemaError(ValueError):
    """A results file does not match the sweep CSV schema."""


@dataclass(frozen=True, slots=True)
class TrialMetrics:
    """Outcome counts for one simulated frame."""

    n_users: int
    n_slots: int
    decoded: int
    lost: int
    throughput: float

    def __post_init__(self) -> None:
        if self.decoded + self.lost != self.n_users:
            raise ValueError(
                f"decoded {self.decoded} + lost {self.lost} != users {self.n_users}"
            )
        bound = min(self.n_users / self.n_slots, 1.0)
        if not 0.0 <= self.throughput <= bound + 1e-12:
            raise ValueError(f"throughput {self.throughput} outside [0, {bound}]")

    @property
    def plr(self) -> float:
        return self.lost / self.n_users if self.n_users else 0.0


@dataclass(frozen=True, slots=True)
class SweepPoint:
    """Aggregated statistics for one load point."""

    load: float
    trials: int
    throughput_mean: float
    throughput_ci95: float  # normal-approximation half-width
    plr_mean: float
    plr_ci95_low: float     # Wilson 95% bounds on the pooled loss proportion
    plr_ci95_high: float
    packets_total: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.plr_mean <= 1.0:
            raise ValueError(f"plr_mean {self.plr_mean} outside [0,1]")
        if self.throughput_ci95 < 0:
            raise ValueError("confidence half-width must be >= 0")


@dataclass(frozen=True, slots=True)
class SweepResult:
    """All load points of one sweep, sorted by load."""

    protocol: str      # protocol kind label, e.g. "irsa"
    distribution: str  # degree distribution literal
    n_slots: int
    points: tuple[SweepPoint, ...]

    def __post_init__(self) -> None:
        loads = [p.load for p in self.points]
        if loads != sorted(loads):
            raise ValueError("sweep points must be sorted by load")


def _splitmix64(x: int) -> int:
    x &= _MASK64
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & _MASK64
    return x ^ (x >> 31)


def trial_seed(master_seed: int, load_index: int, trial_index: int) -> int:
    """Derive one trial's seed; splitmix64 over the three indices in order."""
    h = _splitmix64(master_seed & _MASK64)
    h = _splitmix64(h ^ ((load_index * _GOLDEN) & _MASK64))
    h = _splitmix64(h ^ ((trial_index * _GOLDEN) & _MASK64))
    return h


def run_trial(cfg: FrameConfig, seed: int) -> TrialMetrics:
    """Generate one frame, peel it, count decoded packets."""
    schedule = generate_schedule(cfg, seed)
    outcome = peel(schedule, cfg.protocol)
    decoded = len(outcome.resolved)
    return TrialMetrics(
        n_users=cfg.n_users,
        n_slots=cfg.n_slots,
        decoded=decoded,
        lost=cfg.n_users - decoded,
        throughput=decoded / cfg.n_slots,
    )


def _decoded_counts(
    protocol: ProtocolConfig,
    n_slots: int,
    n_users: int,
    seeds: Sequence[int],
) -> list[int]:
    cfg = FrameConfig(n_slots=n_slots, n_users=n_users, protocol=protocol)
    return [run_trial(cfg, s).decoded for s in seeds]


def _chunk_worker(args: tuple) -> tuple[tuple[int, int], list[int]]:
    protocol, n_slots, n_users, load_idx, start, seeds = args
    return (load_idx, start), _decoded_counts(protocol, n_slots, n_users, seeds)


def _wilson_interval(successes: int, n: int) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    phat = successes / n
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2 * n)) / denom
    half = _Z95 * math.sqrt(phat * (1.0 - phat) / n + z2 / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _aggregate_point(load: float, n_users: int, n_slots: int,
                     decoded: np.ndarray) -> SweepPoint:
    trials = decoded.shape[0]
    throughput = decoded / n_slots
    mean = float(throughput.mean())
    if trials > 1:
        ci95 = float(_Z95 * throughput.std(ddof=1) / math.sqrt(trials))
    else:
        ci95 = 0.0
    packets = n_users * trials
    lost = int(packets - decoded.sum())
    plr = lost / packets if packets else 0.0
    low, high = _wilson_interval(lost, packets)
    return SweepPoint(
        load=load,
        trials=trials,
        throughput_mean=mean,
        throughput_ci95=ci95,
        plr_mean=plr,
        plr_ci95_low=low,
        plr_ci95_high=high,
        packets_total=packets,
    )


def sweep(
    protocol: ProtocolConfig,
    n_slots: int,
    loads: Sequence[float],
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> SweepResult:
    """Run `trials` frames at each load and aggregate per-point statistics.

    Loads are sorted ascending; users per point is round(G * n_slots). Trials
    are independent work items farmed out to `workers` processes; results are
    keyed by (load index, trial index), so aggregation does not depend on
    scheduling and repeated sweeps produce identical numbers.
    """
    if not loads:
        raise ValueError("loads must be non-empty")
    if any(g < 0 for g in loads):
        raise ValueError("loads must be >= 0")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    sorted_loads = sorted(float(g) for g in loads)
    users_per_point = [round(g * n_slots) for g in sorted_loads]
    # validate every point's frame config up front
    for n_users in users_per_point:
        FrameConfig(n_slots=n_slots, n_users=n_users, protocol=protocol)

    decoded = [np.zeros(trials, dtype=np.int64) for _ in sorted_loads]
    tasks = []
    chunk = max(1, math.ceil(trials / max(workers, 1)))
    for li, (g, n_users) in enumerate(zip(sorted_loads, users_per_point)):
        for start in range(0, trials, chunk):
            idxs = range(start, min(start + chunk, trials))
            seeds = [trial_seed(master_seed, li, ti) for ti in idxs]
            tasks.append((protocol, n_slots, n_users, li, start, seeds))

    if workers == 1:
        results = map(_chunk_worker, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        try:
            results = list(pool.map(_chunk_worker, tasks))
        finally:
            pool.shutdown()
    for (li, start), counts in results:
        decoded[li][start:start + len(counts)] = counts

    points = tuple(
        _aggregate_point(g, n_users, n_slots, decoded[li])
        for li, (g, n_users) in enumerate(zip(sorted_loads, users_per_point))
    )
    return SweepResult(
        protocol=protocol.kind.value,
        distribution=format_distribution(protocol.distribution),
        n_slots=n_slots,
        points=points,
    )


def load_at_target_plr(result: SweepResult, target: float) -> tuple[float, float] | None:
    """Largest measured load with mean PLR <= target, with its throughput.

    Returns None when no point qualifies.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must be in (0,1), got {target}")
    best: tuple[float, float] | None = None
    for p in result.points:
        if p.plr_mean <= target:
            best = (p.load, p.throughput_mean)
    return best


def dumps_csv(result: SweepResult) -> str:
    """Render the sweep as CSV text; floats via repr so reloading is lossless."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for p in result.points:
        writer.writerow([
            result.protocol,
            result.distribution,
            result.n_slots,
            repr(p.load),
            p.trials,
            repr(p.throughput_mean),
            repr(p.throughput_ci95),
            repr(p.plr_mean),
            repr(p.plr_ci95_low),
            repr(p.plr_ci95_high),
            p.packets_total,
        ])
    return buf.getvalue()


def loads_csv(text: str, source: str = "<csv>") -> SweepResult:
    """Parse sweep CSV text; malformed input raises SchemaError naming line/column."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{source}: line 1: empty file, expected header") from None
    if tuple(header) != CSV_COLUMNS:
        raise SchemaError(
            f"{source}: line 1: header {header!r} does not match "
            f"expected columns {','.join(CSV_COLUMNS)}"
        )
    meta: tuple[str, str, int] | None = None
    points = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_COLUMNS):
            raise SchemaError(
                f"{source}: line {line_no}: expected {len(CSV_COLUMNS)} fields, got {len(row)}"
            )

        def _get(col: str, cast):
            value = row[CSV_COLUMNS.index(col)]
            try:
                return cast(value)
            except ValueError:
                raise SchemaError(
                    f"{source}: line {line_no}: column {col!r}: cannot parse {value!r}"
                ) from None

        row_meta = (row[0], row[1], _get("n_slots", int))
        if meta is None:
            meta = row_meta
        elif row_meta != meta:
            raise SchemaError(
                f"{source}: line {line_no}: mixed protocol/distribution/n_slots in one file"
            )
        points.append(SweepPoint(
            load=_get("load", float),
            trials=_get("trials", int),
            throughput_mean=_get("throughput_mean", float),
            throughput_ci95=_get("throughput_ci95", float),
            plr_mean=_get("plr_mean", float),
            plr_ci95_low=_get("plr_ci95_low", float),
            plr_ci95_high=_get("plr_ci95_high", float),
            packets_total=_get("packets_total", int),
        ))
    if meta is None:
        return SweepResult(protocol="", distribution="", n_slots=0, points=())
    points.sort(key=lambda p: p.load)
    return SweepResult(protocol=meta[0], distribution=meta[1], n_slots=meta[2],
                       points=tuple(points))


def persist(result: SweepResult, path: str | Path) -> None:
    """Write the sweep CSV to a file."""
    Path(path).write_text(dumps_csv(result))


def load_results(path: str | Path) -> SweepResult:
    """Read a sweep CSV from a file."""
    return loads_csv(Path(path).read_text(), source=str(path))
