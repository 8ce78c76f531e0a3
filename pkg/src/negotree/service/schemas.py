"""Request/response models for the negotiation service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class NetAttribute(BaseModel):
    name: str
    values: list[str]


class CptRow(BaseModel):
    given: dict[str, str] = Field(default_factory=dict)
    order: list[str]


class NetDoc(BaseModel):
    """A CP-net document, same layout as the net file format."""

    attributes: list[NetAttribute]
    edges: list[tuple[str, str]] = Field(default_factory=list)
    cpt: dict[str, list[CptRow]]


class GenSettings(BaseModel):
    attrs: int
    domain_max: int = 2
    max_in_degree: int = 5
    edge_prob: float = 0.5


class StatsOut(BaseModel):
    s_attr: int
    s_os: int
    s_out: list[int]
    s_dq: list[int]
    s_iter: int
    s_time_sec: float
    s_out_mean: float
    s_dq_mean: float


class TraceEventOut(BaseModel):
    iteration: int
    agent: int | None
    event: str
    node: int | None
    outcome: dict[str, str] | None


class NegotiateRequest(BaseModel):
    net1: NetDoc
    net2: NetDoc
    seed: int
    oracle_bound: int | None = None
    improvement_bound: int | None = None


class NegotiateResponse(BaseModel):
    chosen: dict[str, str]
    final_set: list[dict[str, str]]
    initial_agreements: list[dict[str, str]]
    stats: StatsOut
    trace: list[TraceEventOut]


class BatchRequest(BaseModel):
    config: GenSettings
    rounds: int
    seed: int
    oracle_bound: int | None = None


class BatchRow(BaseModel):
    s_attr: int
    s_os: float
    s_out: float
    s_dq: float
    s_iter: float
    s_time_sec: float


class BatchResponse(BaseModel):
    rounds: int
    row: BatchRow
    csv: str


class GenerateRequest(BaseModel):
    config: GenSettings
    count: int = 2
    seed: int


class GenerateResponse(BaseModel):
    nets: list[NetDoc]


class VerifyRequest(BaseModel):
    config: GenSettings
    rounds: int
    seed: int
    oracle_bound: int | None = None


class CounterexampleOut(BaseModel):
    round_index: int
    pair_seed: int
    run_seed: int
    reason: str
    nets: list[NetDoc]
    chosen: dict[str, str]
    trace: list[TraceEventOut]


class VerifyResponse(BaseModel):
    rounds: int
    po_passes: int
    wpo_passes: int
    ok: bool
    counterexamples: list[CounterexampleOut]


class ValidateRequest(BaseModel):
    net: NetDoc


class ValidateResponse(BaseModel):
    ok: bool
    violations: list[str]


class HealthResponse(BaseModel):
    status: str
    version: str
