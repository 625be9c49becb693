"""HTTP service exposing runs, tables, bounds, and trace validation.

The CLI calls the handle_* functions in-process; the FastAPI app wraps the
same handlers, so both front ends produce identical reports.
"""

from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import analysis, validator
from .engine import IncompleteSchedule, Objective, run
from .protocols import PROTOCOLS, build_schedule
from .topology import build_cycle

ProtocolName = Literal["circular", "nc-multicast", "routing", "nc-gaming"]
ObjectiveName = Literal["GAMING", "MULTICAST"]


class RunRequest(BaseModel):
    protocol: ProtocolName
    n: int = Field(ge=2, le=10000)
    objective: Optional[ObjectiveName] = None
    compaction: bool = True
    include_trace: bool = False


class RunReport(BaseModel):
    protocol: str
    n: int
    objective: str
    objective_overridden: bool
    t: int
    l: int
    overshoot: int
    completion_round: int
    t_lb: int
    t_ub: int
    l_kind: str
    l_value: int
    conformance: Literal["PASS", "FAIL", "N/A"]
    trace: Optional[list] = None


class TableRequest(BaseModel):
    n_list: list[int] = Field(min_length=1)


class TableRow(BaseModel):
    n: int
    protocol: str
    t_lb: int
    t_ub: int
    t_measured: int
    l_formula_or_bound: int
    l_measured: int
    gain: Optional[float] = None


class TableReport(BaseModel):
    rows: list[TableRow]
    footnotes: list[str]


class ValidateRequest(BaseModel):
    trace_text: str
    n: int = Field(ge=2)
    objective: ObjectiveName
    claimed_t: int
    claimed_l: int


class ViolationRecord(BaseModel):
    slot: int
    nodes: list[int]
    kind: str
    detail: str


class ValidateReport(BaseModel):
    ok: bool
    violations: list[ViolationRecord]


class BoundsReport(BaseModel):
    protocol: str
    n: int
    t_lb: int
    t_ub: int
    l_kind: str
    l_value: int


def handle_run(req: RunRequest) -> RunReport:
    top = build_cycle(req.n)
    schedule = build_schedule(req.protocol, top)
    objective = Objective[req.objective] if req.objective else None
    result = run(schedule, objective=objective, compaction=req.compaction)
    default = PROTOCOLS[req.protocol][1]
    out_of_scope = req.objective is not None and req.objective != default
    bounds = analysis.bounds_for(req.protocol, req.n)
    if out_of_scope:
        conformance = "N/A"
    else:
        conformance = "PASS" if analysis.check_run(result, bounds).passed else "FAIL"
    trace = None
    if req.include_trace:
        trace = [ev.to_record() for ev in result.trace]
    return RunReport(
        protocol=req.protocol,
        n=req.n,
        objective=result.objective.name,
        objective_overridden=out_of_scope,
        t=result.T,
        l=result.L,
        overshoot=result.overshoot,
        completion_round=result.completion_round,
        t_lb=bounds.t_lb,
        t_ub=bounds.t_ub,
        l_kind=bounds.l_kind,
        l_value=bounds.l_value,
        conformance=conformance,
        trace=trace,
    )


def handle_table(req: TableRequest) -> TableReport:
    for n in req.n_list:
        if n < 2:
            raise ValueError(f"need at least 2 players, got n={n}")
    report = analysis.comparison_table(req.n_list)
    return TableReport(
        rows=[TableRow(**row) for row in report.rows],
        footnotes=report.footnotes,
    )


def handle_validate(req: ValidateRequest) -> ValidateReport:
    records = validator.load_trace(req.trace_text)
    violations = validator.validate_trace(
        records, req.n, req.objective, req.claimed_t, req.claimed_l
    )
    return ValidateReport(
        ok=not violations,
        violations=[ViolationRecord(**v.to_record()) for v in violations],
    )


def handle_bounds(protocol: str, n: int) -> BoundsReport:
    b = analysis.bounds_for(protocol, n)
    return BoundsReport(
        protocol=b.protocol, n=b.n, t_lb=b.t_lb, t_ub=b.t_ub,
        l_kind=b.l_kind, l_value=b.l_value,
    )


app = FastAPI(title="ringcast", version="1.0.0")


@app.post("/run", response_model=RunReport)
def run_endpoint(req: RunRequest) -> RunReport:
    try:
        return handle_run(req)
    except IncompleteSchedule as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@app.post("/table", response_model=TableReport)
def table_endpoint(req: TableRequest) -> TableReport:
    try:
        return handle_table(req)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@app.post("/validate", response_model=ValidateReport)
def validate_endpoint(req: ValidateRequest) -> ValidateReport:
    try:
        return handle_validate(req)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@app.get("/bounds", response_model=BoundsReport)
def bounds_endpoint(protocol: ProtocolName, n: int) -> BoundsReport:
    try:
        return handle_bounds(protocol, n)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@app.get("/healthz")
def healthz():
    return {"status": "ok"}
