"""Request/response models for the synthesis and verification service.

The schedule document here is the on-disk format too: the CLI writes and
reads exactly these models, so files round-trip through the API unchanged.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field


class OperatorTermDoc(BaseModel):
    coeff: float
    word: dict[str, str]


class OperatorDoc(BaseModel):
    n_qubits: int
    terms: list[OperatorTermDoc]


class ShapeDoc(BaseModel):
    kind: Literal["sine_squared", "triangle", "constant", "tabulated"]
    duration: float
    area: float
    samples: Optional[list[list[float]]] = None


class SegmentDoc(BaseModel):
    kind: Literal["ramp", "coast"]
    start: float
    duration: float
    frame: int
    generator: Optional[str] = None
    reversed: bool = False


class ScheduleDoc(BaseModel):
    format_version: int = 1
    mode: Literal["bb", "eulerian", "symmetric"]
    cycle_time: float
    sim_interval: float
    delta: float
    shape: Optional[ShapeDoc] = None
    group: str
    group_size: Optional[int] = None
    weights: Optional[dict[str, float]] = None
    segments: list[SegmentDoc]
    hamiltonian: Optional[OperatorDoc] = None
    target: Optional[OperatorDoc] = None
    error_generators: list[OperatorDoc] = Field(default_factory=list)
    tolerances: dict[str, float] = Field(default_factory=dict)


class SynthRequest(BaseModel):
    model: Union[str, OperatorDoc] = "heisenberg2"
    target: Union[str, OperatorDoc] = "dipolar"
    group: str = "g1"
    mode: Literal["bb", "eulerian", "symmetric"] = "eulerian"
    n_qubits: Optional[int] = None
    coupling: float = 1.0
    tsim: float = Field(default=0.05, gt=0)
    delta: Optional[float] = Field(default=None, gt=0)
    shape: Literal["sine2", "triangle", "constant", "tabulated"] = "sine2"
    shape_samples: Optional[list[list[float]]] = None
    decouple: list[str] = Field(default_factory=list)
    seed: int = 7
    tolerance: float = 1e-8


class SynthResponse(BaseModel):
    feasible: bool
    group: str
    group_order: int
    generator_count: int
    segment_count: int
    weights: dict[str, float]
    total_weight: float
    cycle_time: float
    mixture_residual: float
    schedule: ScheduleDoc


class VerifyRequest(BaseModel):
    schedule: ScheduleDoc
    tolerance: Optional[float] = None


class VerifyResponse(BaseModel):
    residual_norm: float
    decoupling_residuals: dict[str, float]
    magnus_bound_estimate: float
    magnus_constant_is_assumed_unity: bool = True
    tolerance: float
    passed: bool


class SimulateRequest(BaseModel):
    schedule: ScheduleDoc
    cycles: int = Field(default=1, ge=1)
    metric: Literal["infidelity", "frobenius"] = "infidelity"


class SimulateResponse(BaseModel):
    cycles: int
    metric: str
    infidelity: float
    per_cycle_error: list[float]
    unitarity_defect: float


class SweepRequest(BaseModel):
    base: SynthRequest = Field(default_factory=SynthRequest)
    param: Literal["delta", "tsim", "cycle"] = "cycle"
    minimum: float = Field(gt=0)
    maximum: float = Field(gt=0)
    points: int = Field(default=6, ge=4)


class SweepPoint(BaseModel):
    value: float
    cycle_time: float
    error: float


class SweepResponse(BaseModel):
    param: str
    rows: list[SweepPoint]
    slope: float
    intercept: float
    r_squared: float
    csv: str


class PresetsResponse(BaseModel):
    models: list[str]
    targets: list[str]
    groups: list[str]
    shapes: list[str]
    modes: list[str]
    honeycomb_plaquette: dict


class GroupExport(BaseModel):
    name: str
    order: int
    generator_labels: list[str]
    element_labels: list[str]
    euler_cycle: list[str]
