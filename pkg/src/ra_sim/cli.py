"""Batch command line front end.

A thin client over the service operations: flags are parsed into the service
request models and dispatched either in-process (default) or to a running
server (``--server`` / ``RA_SIM_SERVER``). Subcommands: demo, sweep,
threshold, compare, serve.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import httpx
from pydantic import ValidationError

from .engine import SchemaError
from .service import ops
from .service.schemas import (
    CompareInput,
    CompareRequest,
    SweepRequest,
    ThresholdRequest,
)

GRID_EPS = 1e-9


class CliError(Exception):
    """Fatal CLI failure; message is printed as a single `error:` line."""


def parse_loads(text: str) -> list[float]:
    """Load grid: `start:stop:step` (stop inclusive within 1e-9) or `a,b,c`."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise CliError(f"bad load grid {text!r}, expected start:stop:step")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise CliError(f"bad load grid {text!r}, expected numbers") from None
        if step <= 0:
            raise CliError(f"load grid step must be positive, got {step}")
        loads = []
        k = 0
        while True:
            value = start + k * step
            if value > stop + GRID_EPS:
                break
            loads.append(round(value, 12))
            k += 1
        if not loads:
            raise CliError(f"load grid {text!r} is empty")
        return loads
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise CliError(f"bad loads {text!r}") from None


def read_config(path: str) -> dict[str, str]:
    """Flat key-value config mirroring the flags; `key = value` per line."""
    values: dict[str, str] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from None
    for no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"{path}:{no}: expected key = value")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


class ServiceClient:
    """Dispatches requests in-process or over HTTP, returning text payloads."""

    def __init__(self, server: str | None):
        self.server = server

    def _post(self, path: str, payload: dict) -> httpx.Response:
        with httpx.Client(base_url=self.server, timeout=None) as client:
            resp = client.post(path, json=payload)
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise CliError(f"server rejected {path}: {detail}")
        return resp

    def demo(self) -> str:
        if self.server is None:
            return ops.render_demo()
        with httpx.Client(base_url=self.server, timeout=None) as client:
            resp = client.get("/demo")
        if resp.status_code >= 400:
            raise CliError(f"server rejected /demo: {resp.text}")
        return resp.text

    def sweep(self, req: SweepRequest) -> str:
        if self.server is None:
            return ops.run_sweep(req)
        return self._post("/sweep", req.model_dump()).text

    def threshold(self, req: ThresholdRequest) -> str:
        if self.server is None:
            return ops.run_threshold(req).report
        return self._post("/threshold", req.model_dump()).json()["report"]

    def compare(self, req: CompareRequest) -> str:
        if self.server is None:
            return ops.run_compare(req)
        return self._post("/compare", req.model_dump()).text


def _resolve(args: argparse.Namespace, config: dict[str, str], name: str, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _default_seed() -> int:
    env = os.environ.get("RA_SIM_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise CliError(f"RA_SIM_SEED must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ra-sim",
        description="Random access protocol simulator: SIC peeling, density "
        "evolution thresholds, Monte Carlo load sweeps.",
    )
    parser.add_argument("--server", default=os.environ.get("RA_SIM_SERVER"),
                        help="base URL of a running ra-sim service; default runs in-process")
    parser.add_argument("--config", help="flat key=value file mirroring the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("demo", help="peel the canonical four-user frame and print the trace")

    p_sweep = sub.add_parser("sweep", help="Monte Carlo load sweep, writes the results CSV")
    p_sweep.add_argument("--protocol", choices=["sa", "crdsa", "irsa", "csa"])
    p_sweep.add_argument("--dist", help="degree distribution literal d1:p1,d2:p2,...")
    p_sweep.add_argument("--csa-k", type=int, dest="csa_k",
                         help="segments needed to recover a CSA user")
    p_sweep.add_argument("--slots", type=int)
    p_sweep.add_argument("--loads", help="grid start:stop:step (stop inclusive) or comma list")
    p_sweep.add_argument("--trials", type=int)
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--workers", type=int)
    p_sweep.add_argument("--out", help="output CSV path; default prints to stdout")

    p_thr = sub.add_parser("threshold", help="density-evolution decoding threshold")
    p_thr.add_argument("--dist", help="degree distribution literal")
    p_thr.add_argument("--tol-load", type=float, dest="tol_load")

    p_cmp = sub.add_parser("compare", help="supported load per scheme at target PLRs")
    p_cmp.add_argument("paths", nargs="*", help="two or more sweep CSV files")
    p_cmp.add_argument("--targets", help="comma-separated PLR targets, default 0.01,0.001")

    p_srv = sub.add_parser("serve", help="run the HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    return parser


def cmd_demo(client: ServiceClient) -> int:
    sys.stdout.write(client.demo())
    return 0


def cmd_sweep(client: ServiceClient, args, config) -> int:
    protocol = _resolve(args, config, "protocol")
    if protocol is None:
        raise CliError("sweep requires --protocol")
    slots = _resolve(args, config, "slots")
    if slots is None:
        raise CliError("sweep requires --slots")
    loads_raw = _resolve(args, config, "loads")
    if loads_raw is None:
        raise CliError("sweep requires --loads")
    loads = parse_loads(loads_raw) if isinstance(loads_raw, str) else loads_raw
    csa_k = _resolve(args, config, "csa_k")
    seed = _resolve(args, config, "seed")
    req = SweepRequest(
        protocol=protocol,
        dist=_resolve(args, config, "dist"),
        csa_k=int(csa_k) if csa_k is not None else None,
        slots=int(slots),
        loads=loads,
        trials=int(_resolve(args, config, "trials", 1000)),
        seed=int(seed) if seed is not None else _default_seed(),
        workers=int(_resolve(args, config, "workers", 1)),
    )
    csv_text = client.sweep(req)
    out = _resolve(args, config, "out")
    if out is None:
        sys.stdout.write(csv_text)
    else:
        Path(out).write_text(csv_text)
    return 0


def cmd_threshold(client: ServiceClient, args, config) -> int:
    dist = _resolve(args, config, "dist")
    if dist is None:
        raise CliError("threshold requires --dist")
    tol_load = _resolve(args, config, "tol_load")
    req = ThresholdRequest(dist=dist, tol_load=float(tol_load) if tol_load else 1e-4)
    print(client.threshold(req))
    return 0


def cmd_compare(client: ServiceClient, args, config) -> int:
    paths = args.paths or (config.get("paths", "").split() if "paths" in config else [])
    if len(paths) < 2:
        raise CliError("compare needs at least two result files")
    targets_raw = _resolve(args, config, "targets")
    if targets_raw:
        try:
            targets = [float(t) for t in str(targets_raw).split(",") if t.strip()]
        except ValueError:
            raise CliError(f"bad targets {targets_raw!r}") from None
    else:
        targets = [1e-2, 1e-3]
    inputs = []
    for p in paths:
        try:
            inputs.append(CompareInput(label=Path(p).stem, csv_text=Path(p).read_text()))
        except OSError as exc:
            raise CliError(f"cannot read {p}: {exc}") from None
    print(client.compare(CompareRequest(inputs=inputs, targets=targets)), end="")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("ra_sim.service.app:app", host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = read_config(args.config) if args.config else {}
        client = ServiceClient(args.server)
        if args.command == "demo":
            return cmd_demo(client)
        if args.command == "sweep":
            return cmd_sweep(client, args, config)
        if args.command == "threshold":
            return cmd_threshold(client, args, config)
        if args.command == "compare":
            return cmd_compare(client, args, config)
        if args.command == "serve":
            return cmd_serve(args)
        raise CliError(f"unknown command {args.command!r}")
    except ValidationError as exc:
        # pydantic's ValidationError subclasses ValueError; handle it first
        first = exc.errors()[0]
        loc = ".".join(str(x) for x in first.get("loc", ()))
        print(f"error: invalid {loc}: {first.get('msg')}", file=sys.stderr)
        return 1
    except (CliError, SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"error: cannot reach server: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
