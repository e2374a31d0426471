"""Asymptotic analysis: slotted-ALOHA baseline and density evolution.

Density evolution tracks, over peeling iterations, the probability q that a
randomly chosen replica is still unknown, in the infinite-frame limit where
slot occupancy is Poisson with mean G times the average degree. A degree
distribution "decodes" at load G when the recursion drives q to zero; the
decoding threshold is the largest such G.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import DegreeDistribution, avg_degree, edge_perspective, format_distribution

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERS = 10_000
DEFAULT_TOL_LOAD = 1e-4
VANISH_EPS = 1e-6  # fixed point below this counts as fully decoded


@dataclass(frozen=True, slots=True)
class DeResult:
    """Fixed point of the density-evolution recursion at one load."""

    load: float
    fixed_point: float   # limiting probability that an edge stays erased
    plr_estimate: float  # node-perspective packet loss estimate sum p_d * q^d
    iterations: int
    converged: bool

    def __post_init__(self) -> None:
        if not 0.0 <= self.fixed_point <= 1.0:
            raise ValueError(f"fixed_point {self.fixed_point} outside [0,1]")
        if not 0.0 <= self.plr_estimate <= 1.0:
            raise ValueError(f"plr_estimate {self.plr_estimate} outside [0,1]")


def sa_throughput(load: float) -> float:
    """Expected decoded packets per slot for slotted ALOHA: G * exp(-G)."""
    if load < 0:
        raise ValueError(f"load must be >= 0, got {load}")
    return load * math.exp(-load)


def de_fixed_point(
    dist: DegreeDistribution,
    load: float,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> DeResult:
    """Iterate q <- 1 - exp(-G * m * lambda(q)) from q = 1 to its fixed point.

    m is the average degree and lambda the edge-perspective polynomial
    sum lambda_d q^(d-1). Iterates are monotone non-increasing in [0, 1].
    """
    if load < 0:
        raise ValueError(f"load must be >= 0, got {load}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    m = avg_degree(dist)
    lam = edge_perspective(dist).entries
    q = 1.0
    iterations = 0
    converged = False
    for i in range(1, max_iters + 1):
        lam_q = sum(p * q ** (d - 1) for d, p in lam)
        q_next = 1.0 - math.exp(-load * m * lam_q)
        iterations = i
        delta = abs(q_next - q)
        q = q_next
        if delta < tol:
            converged = True
            break
    plr = sum(p * q**d for d, p in dist.entries)
    return DeResult(load=load, fixed_point=q, plr_estimate=plr,
                    iterations=iterations, converged=converged)


def de_threshold(dist: DegreeDistribution, tol_load: float = DEFAULT_TOL_LOAD) -> float:
    """Largest load in [0, 1] whose fixed point vanishes, by bisection.

    Relies on the fixed point being monotone non-decreasing in the load.
    Degree-1 traffic gets no peeling gain, so its threshold is 0; no
    distribution exceeds 1 pk/slot.
    """
    if tol_load <= 0:
        raise ValueError(f"tol_load must be positive, got {tol_load}")

    def vanishes(load: float) -> bool:
        return de_fixed_point(dist, load).fixed_point < VANISH_EPS

    lo, hi = 0.0, 1.0
    if vanishes(hi):
        return hi
    while hi - lo > tol_load:
        mid = (lo + hi) / 2.0
        if vanishes(mid):
            lo = mid
        else:
            hi = mid
    return lo


def threshold_report(dist: DegreeDistribution, tol_load: float = DEFAULT_TOL_LOAD) -> str:
    """One-line record: distribution literal, threshold, tolerance."""
    g_star = de_threshold(dist, tol_load)
    return f"distribution={format_distribution(dist)} threshold={g_star:.6f} tol_load={tol_load:g}"
