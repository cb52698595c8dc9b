"""Pydantic request/response models for the HTTP service."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class BranchModel(BaseModel):
    u: str
    v: str
    g: float


class NetworkModel(BaseModel):
    """Interchange form of a network; branch order defines branch ids."""
    nodes: list[str]
    branches: list[BranchModel]


class CurrentEntry(BaseModel):
    u: str
    v: str
    i: float
    std_error: Optional[float] = None


class SolveRequest(BaseModel):
    network: NetworkModel
    fixed: Optional[dict[str, float]] = None
    inject: Optional[dict[str, float]] = None
    ground: Optional[str] = None


class SolveResponse(BaseModel):
    voltages: dict[str, float]
    currents: list[CurrentEntry]


class ExactRequest(BaseModel):
    network: NetworkModel
    theorem: Literal["vj", "vv", "ji", "iv"]
    fixed: Optional[dict[str, float]] = None
    inject: Optional[dict[str, float]] = None
    ground: Optional[str] = None
    check: bool = False
    tol: float = 1e-9


class ExactResponse(BaseModel):
    theorem: str
    voltages: Optional[dict[str, float]] = None
    injected: Optional[dict[str, float]] = None
    currents: Optional[list[CurrentEntry]] = None
    oracle: Optional[dict] = None
    max_rel_err: Optional[float] = None


class EstimateRequest(BaseModel):
    network: NetworkModel
    theorem: Literal["vj", "vv", "ji", "iv"]
    fixed: Optional[dict[str, float]] = None
    inject: Optional[dict[str, float]] = None
    ground: Optional[str] = None
    count: int = Field(gt=0)
    seed: int = 0
    workers: int = Field(default=1, ge=1)
    check: bool = False


class EstimateResponse(BaseModel):
    theorem: str
    samples: int
    seed: int
    voltages: Optional[dict[str, float]] = None
    injected: Optional[dict[str, float]] = None
    currents: Optional[list[CurrentEntry]] = None
    std_error: Optional[dict[str, float]] = None
    oracle: Optional[dict] = None
    max_rel_err: Optional[float] = None


class EnumerateRequest(BaseModel):
    network: NetworkModel
    roots: Optional[list[str]] = None
    cap: int = Field(default=10**6, gt=0)


class EnumeratedObject(BaseModel):
    branches: list[int]
    weight: float
    block_of: Optional[dict[str, str]] = None


class EnumerateResponse(BaseModel):
    objects: list[EnumeratedObject]
    weight_sum: float


class SampleRequest(BaseModel):
    network: NetworkModel
    roots: Optional[list[str]] = None
    count: int = Field(gt=0)
    seed: int = 0


class SampledObject(BaseModel):
    branches: list[int]


class SampleResponse(BaseModel):
    samples: list[SampledObject]


class HittingRequest(BaseModel):
    network: NetworkModel
    start: str
    roots: list[str]
    check: bool = False


class HittingResponse(BaseModel):
    tau: float
    oracle: Optional[dict] = None
    max_rel_err: Optional[float] = None


class AbsorbRequest(BaseModel):
    network: NetworkModel
    start: str
    roots: list[str]
    estimate: Optional[int] = Field(default=None, gt=0)
    seed: int = 0
    check: bool = False


class AbsorbResponse(BaseModel):
    probabilities: dict[str, float]
    std_error: Optional[dict[str, float]] = None
    samples: Optional[int] = None
    oracle: Optional[dict] = None
    max_rel_err: Optional[float] = None


class FlowRequest(BaseModel):
    network: NetworkModel
    p0: dict[str, float]
    check: bool = False


class FlowEntry(BaseModel):
    u: str
    v: str
    flow: float


class FlowResponse(BaseModel):
    flows: list[FlowEntry]
    oracle: Optional[dict] = None
    max_rel_err: Optional[float] = None


class ErrorResponse(BaseModel):
    error: str
    detail: str
