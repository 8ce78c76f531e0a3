"""HTTP front end over the negotiation engine.

Stateless: every endpoint takes whole inputs and returns whole results as
JSON; file handling is the client's business.  Engine errors surface as
422 responses carrying the violation text.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..cpnet import DEFAULT_EXACT_BOUND
from ..errors import NegotreeError, ValidationError
from ..generator import GenConfig
from ..harness import batch, generate_nets, verify
from ..netio import event_record, net_from_doc, net_to_doc, outcome_record
from ..protocol import negotiate
from . import schemas

app = FastAPI(title="negotree", version=__version__)


def _net(doc: schemas.NetDoc):
    try:
        return net_from_doc(doc.model_dump()).require_valid()
    except ValidationError as exc:
        raise HTTPException(status_code=422, detail=exc.violations) from exc
    except NegotreeError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _gen_config(settings: schemas.GenSettings, seed: int) -> GenConfig:
    try:
        return GenConfig(
            attrs=settings.attrs,
            domain_max=settings.domain_max,
            max_in_degree=settings.max_in_degree,
            edge_prob=settings.edge_prob,
            seed=seed,
        )
    except NegotreeError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _bound(value: int | None) -> int:
    return DEFAULT_EXACT_BOUND if value is None else value


@app.get("/health", response_model=schemas.HealthResponse)
def health():
    return schemas.HealthResponse(status="ok", version=__version__)


@app.post("/negotiate", response_model=schemas.NegotiateResponse)
def negotiate_endpoint(req: schemas.NegotiateRequest):
    net1, net2 = _net(req.net1), _net(req.net2)
    try:
        result = negotiate(
            [net1, net2],
            req.seed,
            exact_bound=_bound(req.oracle_bound),
            improvement_bound=_bound(req.improvement_bound),
        )
    except NegotreeError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    space = net1.space
    stats = result.stats
    return schemas.NegotiateResponse(
        chosen=outcome_record(result.chosen, space),
        final_set=[outcome_record(o, space) for o in result.final_set],
        initial_agreements=[
            outcome_record(o, space) for o in result.phase1.initial_agreements
        ],
        stats=schemas.StatsOut(
            s_attr=stats.s_attr,
            s_os=stats.s_os,
            s_out=list(stats.s_out),
            s_dq=list(stats.s_dq),
            s_iter=stats.s_iter,
            s_time_sec=stats.s_time_sec,
            s_out_mean=stats.s_out_mean,
            s_dq_mean=stats.s_dq_mean,
        ),
        trace=[
            schemas.TraceEventOut(**event_record(e, space)) for e in result.trace
        ],
    )


@app.post("/batch", response_model=schemas.BatchResponse)
def batch_endpoint(req: schemas.BatchRequest):
    cfg = _gen_config(req.config, seed=0)
    try:
        result = batch(cfg, req.rounds, req.seed, exact_bound=_bound(req.oracle_bound))
    except NegotreeError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return schemas.BatchResponse(
        rounds=req.rounds,
        row=schemas.BatchRow(
            s_attr=cfg.attrs,
            s_os=result.mean_s_os,
            s_out=result.mean_s_out,
            s_dq=result.mean_s_dq,
            s_iter=result.mean_s_iter,
            s_time_sec=result.mean_s_time,
        ),
        csv=result.csv(),
    )


@app.post("/generate", response_model=schemas.GenerateResponse)
def generate_endpoint(req: schemas.GenerateRequest):
    cfg = _gen_config(req.config, seed=req.seed)
    try:
        nets = generate_nets(cfg, req.count)
    except NegotreeError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return schemas.GenerateResponse(
        nets=[schemas.NetDoc(**net_to_doc(net)) for net in nets]
    )


@app.post("/verify", response_model=schemas.VerifyResponse)
def verify_endpoint(req: schemas.VerifyRequest):
    cfg = _gen_config(req.config, seed=0)
    try:
        report = verify(cfg, req.rounds, req.seed, exact_bound=_bound(req.oracle_bound))
    except NegotreeError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return schemas.VerifyResponse(
        rounds=report.rounds,
        po_passes=report.po_passes,
        wpo_passes=report.wpo_passes,
        ok=report.ok,
        counterexamples=[
            schemas.CounterexampleOut(
                round_index=ce.round_index,
                pair_seed=ce.pair_seed,
                run_seed=ce.run_seed,
                reason=ce.reason,
                nets=[schemas.NetDoc(**doc) for doc in ce.nets],
                chosen=ce.chosen,
                trace=[schemas.TraceEventOut(**rec) for rec in ce.trace],
            )
            for ce in report.counterexamples
        ],
    )


@app.post("/validate", response_model=schemas.ValidateResponse)
def validate_endpoint(req: schemas.ValidateRequest):
    try:
        net = net_from_doc(req.net.model_dump())
    except NegotreeError as exc:
        return schemas.ValidateResponse(ok=False, violations=[str(exc)])
    violations = net.validate()
    return schemas.ValidateResponse(ok=not violations, violations=violations)
