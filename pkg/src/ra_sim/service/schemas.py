"""Request/response models for the simulation service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

ProtocolName = Literal["sa", "crdsa", "irsa", "csa"]


class SweepRequest(BaseModel):
    protocol: ProtocolName
    dist: str | None = None  # degree distribution literal, e.g. "2:0.5,3:0.28,8:0.22"
    csa_k: int | None = Field(default=None, ge=1)
    slots: int = Field(ge=1)
    loads: list[float] = Field(min_length=1)
    trials: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)


class ThresholdRequest(BaseModel):
    dist: str
    tol_load: float = Field(default=1e-4, gt=0)


class ThresholdResponse(BaseModel):
    distribution: str
    threshold: float
    tol_load: float
    report: str  # the one-line structured record


class CompareInput(BaseModel):
    label: str
    csv_text: str


class CompareRequest(BaseModel):
    inputs: list[CompareInput] = Field(min_length=2)
    targets: list[float] = Field(default=[1e-2, 1e-3])


class HealthResponse(BaseModel):
    status: str
    version: str
