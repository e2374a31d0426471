"""FastAPI app exposing the simulator to multiple clients.

Long sweeps run server-side; clients receive the canonical text formats
(sweep CSV, demo trace, threshold record, comparison table) so results match
the CLI byte for byte.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse, Response

from .. import __version__
from ..engine import SchemaError
from . import ops
from .schemas import (
    CompareRequest,
    HealthResponse,
    SweepRequest,
    ThresholdRequest,
    ThresholdResponse,
)

app = FastAPI(
    title="ra-sim",
    version=__version__,
    description="Slot-level random access simulator: SIC peeling decoder, "
    "density-evolution thresholds, Monte Carlo load sweeps.",
)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.get("/demo", response_class=PlainTextResponse)
def demo() -> str:
    return ops.render_demo()


@app.post("/sweep")
def sweep(req: SweepRequest) -> Response:
    try:
        csv_text = ops.run_sweep(req)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return Response(content=csv_text, media_type="text/csv")


@app.post("/threshold", response_model=ThresholdResponse)
def threshold(req: ThresholdRequest) -> ThresholdResponse:
    try:
        return ops.run_threshold(req)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@app.post("/compare", response_class=PlainTextResponse)
def compare(req: CompareRequest) -> str:
    try:
        return ops.run_compare(req)
    except (SchemaError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
