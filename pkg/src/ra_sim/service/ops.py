"""Service operations shared by the HTTP routes and the in-process CLI client.

Each op takes a validated request model and returns the canonical textual
payload (or a response model). Invalid domain input raises ValueError; the
HTTP layer maps that to a 400, the CLI to an `error:` line.
"""

from __future__ import annotations

from .. import analysis, engine
from ..core import (
    DegreeDistribution,
    ProtocolConfig,
    ProtocolKind,
    REFERENCE_DISTRIBUTION,
    parse_distribution,
)
from ..decoder import demo_instance, peel, trace_lines
from .schemas import CompareRequest, SweepRequest, ThresholdRequest, ThresholdResponse

TRACE_HEADER = "iteration,slot,user"

_DEFAULT_DISTS = {
    ProtocolKind.SLOTTED_ALOHA: DegreeDistribution.constant(1, "sa"),
    ProtocolKind.CRDSA: DegreeDistribution.constant(2),
    ProtocolKind.IRSA: REFERENCE_DISTRIBUTION,
}


def build_protocol(name: str, dist: str | None, csa_k: int | None) -> ProtocolConfig:
    """Resolve protocol name + optional distribution literal into a config."""
    try:
        kind = ProtocolKind(name)
    except ValueError:
        raise ValueError(f"unknown protocol {name!r}, expected sa|crdsa|irsa|csa") from None
    if dist is not None:
        distribution = parse_distribution(dist)
    elif kind in _DEFAULT_DISTS:
        distribution = _DEFAULT_DISTS[kind]
    else:
        raise ValueError("csa requires an explicit --dist")
    return ProtocolConfig(kind, distribution, csa_k=csa_k)


def render_demo() -> str:
    """Peel the canonical four-user instance and render its trace."""
    schedule, protocol = demo_instance()
    outcome = peel(schedule, protocol)
    lines = [f"slots: {schedule.n_slots}"]
    for user, slots in enumerate(schedule.placements):
        lines.append(f"user {user}: slots {','.join(map(str, slots))}")
    lines.append(TRACE_HEADER)
    lines.extend(trace_lines(outcome))
    lines.append(
        f"resolved {len(outcome.resolved)}/{schedule.n_users} users "
        f"in {outcome.iterations} iterations"
    )
    return "\n".join(lines) + "\n"


def run_sweep(req: SweepRequest) -> str:
    """Execute the sweep and return its CSV rendering."""
    protocol = build_protocol(req.protocol, req.dist, req.csa_k)
    result = engine.sweep(
        protocol=protocol,
        n_slots=req.slots,
        loads=req.loads,
        trials=req.trials,
        master_seed=req.seed,
        workers=req.workers,
    )
    return engine.dumps_csv(result)


def run_threshold(req: ThresholdRequest) -> ThresholdResponse:
    dist = parse_distribution(req.dist)
    threshold = analysis.de_threshold(dist, req.tol_load)
    return ThresholdResponse(
        distribution=req.dist,
        threshold=threshold,
        tol_load=req.tol_load,
        report=analysis.threshold_report(dist, req.tol_load),
    )


def run_compare(req: CompareRequest) -> str:
    """Tabulate supported load/throughput per scheme at each PLR target.

    The first input is the baseline for the load-ratio column; schemes with
    no qualifying point render `-`.
    """
    for t in req.targets:
        if not 0.0 < t < 1.0:
            raise ValueError(f"target must be in (0,1), got {t}")
    results = [
        (inp.label, engine.loads_csv(inp.csv_text, source=inp.label))
        for inp in req.inputs
    ]
    width = max(len("scheme"), max(len(label) for label, _ in results))
    out = []
    for target in req.targets:
        picks = [(label, engine.load_at_target_plr(res, target)) for label, res in results]
        base = picks[0][1]
        out.append(f"# target PLR <= {target:g}")
        out.append(f"{'scheme':<{width}}  {'load':>10}  {'throughput':>10}  {'load_ratio':>10}")
        for label, pick in picks:
            if pick is None:
                out.append(f"{label:<{width}}  {'-':>10}  {'-':>10}  {'-':>10}")
                continue
            load, thr = pick
            if base is None or base[0] == 0:
                ratio = "-"
            else:
                ratio = f"{load / base[0]:.2f}"
            out.append(f"{label:<{width}}  {load:>10.4g}  {thr:>10.4g}  {ratio:>10}")
        out.append("")
    return "\n".join(out)
