"""HTTP service exposing the smooth-runs toolkit.

Thin wrapper: pydantic models on the wire, the library underneath.  The
CLI is a client of this app (in-process by default, remote with --server),
so every operation is exercised through one surface.

Run standalone with:  uvicorn smoothruns.service:app
"""

from __future__ import annotations

import os
import time
from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .arith import ParameterError, sieve_primes
from .contfrac import DomainError
from .pell import smooth_solutions
from .search import (
    BruteEvidence,
    CampaignEvidence,
    IntegrityError,
    assemble_f,
    brute_force_windows,
    count_equations,
    derive_params,
    known_f,
    run_campaign,
    verify_table,
)
from .search.params import CursorError
from .search.records import load_records, parse_checkpoint_line, _read_valid_prefix

app = FastAPI(
    title="smoothruns",
    version=__version__,
    description="Runs of consecutive smooth integers via Pell equations "
    "with compact representations and an unconditional guard.",
)

_TABLE = sieve_primes(2000)


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail=f"{type(exc).__name__}: {exc}")


_DOMAIN_ERRORS = (ParameterError, DomainError, CursorError, IntegrityError, ValueError)


# ---------------------------------------------------------------------------
# wire models
# ---------------------------------------------------------------------------


class FactorsModel(BaseModel):
    factors: list[tuple[int, int]]
    cofactor: int


class SolutionModel(BaseModel):
    index: int
    x: int
    y: int
    y_factors: FactorsModel
    x_factors: FactorsModel | None = None


class CertificationModel(BaseModel):
    status: Literal["Unconditional", "RecomputedFromSmaller"]
    z_used: int
    convergents_scanned: int


class SolveRequest(BaseModel):
    d: int = Field(ge=2)
    t: int = Field(ge=1)
    require_x_smooth: bool = False


class SolveResponse(BaseModel):
    d: int
    t: int
    solutions: list[SolutionModel]
    certification: CertificationModel


class CountRequest(BaseModel):
    m: int
    t: int


class CountResponse(BaseModel):
    m: int
    t: int
    t0: int
    pair_starts: list[int]
    upper_allowance: int
    equation_count: int


class RecordModel(BaseModel):
    n: int
    length: int
    p_max: int
    source: str
    coefficient: int = 0
    index: int = 0


class BruteRequest(BaseModel):
    k: int = Field(ge=1)
    length: int = Field(ge=1)
    max_n: int = Field(ge=1)


class BruteResponse(BaseModel):
    records: list[RecordModel]


class CampaignRequest(BaseModel):
    m: int
    t: int
    store_path: str | None = None
    checkpoint_path: str | None = None
    workers: int = 1
    checkpoint_every: int = 10_000
    max_equations: int | None = None


class CampaignResponse(BaseModel):
    m: int
    t: int
    equation_count: int
    position: int
    completed: bool
    new_records: int
    records_total: int
    guard_statuses: dict[str, int]
    elapsed: float
    halted: str | None = None


class CampaignEvidenceRef(BaseModel):
    store_path: str
    checkpoint_path: str


class BruteEvidenceRef(BaseModel):
    store_path: str | None = None
    k_max: int
    length: int
    max_n: int
    scan: bool = False  # run the scan now instead of loading a store


class FRequest(BaseModel):
    k_from: int = Field(ge=1)
    k_to: int = Field(ge=1)
    campaigns: list[CampaignEvidenceRef] = []
    brutes: list[BruteEvidenceRef] = []


class FRow(BaseModel):
    k: int
    lower: int
    upper: int | None
    exact: bool
    unconditional: bool


class FResponse(BaseModel):
    rows: list[FRow]


class VerifyTableRequest(BaseModel):
    k_max: int = 40
    max_n: int = 10**7


class VerifyTableRow(BaseModel):
    k: int
    expected: int
    got_lower: int
    got_upper: int | None
    ok: bool


class VerifyTableResponse(BaseModel):
    rows: list[VerifyTableRow]
    ok: bool


# ---------------------------------------------------------------------------
# endpoints
# ---------------------------------------------------------------------------


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest) -> SolveResponse:
    try:
        solutions, cert = smooth_solutions(
            req.d, req.t, require_x_smooth=req.require_x_smooth, table=_TABLE
        )
    except _DOMAIN_ERRORS as exc:
        raise _bad_request(exc)
    return SolveResponse(
        d=req.d,
        t=req.t,
        solutions=[
            SolutionModel(
                index=s.index,
                x=s.x,
                y=s.y,
                y_factors=FactorsModel(
                    factors=s.y_factorization.factors, cofactor=s.y_factorization.cofactor
                ),
                x_factors=(
                    FactorsModel(
                        factors=s.x_factorization.factors,
                        cofactor=s.x_factorization.cofactor,
                    )
                    if s.x_factorization is not None
                    else None
                ),
            )
            for s in solutions
        ],
        certification=CertificationModel(
            status=cert.status,
            z_used=cert.z_used,
            convergents_scanned=cert.convergents_scanned,
        ),
    )


@app.post("/count", response_model=CountResponse)
def count(req: CountRequest) -> CountResponse:
    try:
        params = derive_params(req.m, req.t, _TABLE)
    except _DOMAIN_ERRORS as exc:
        raise _bad_request(exc)
    return CountResponse(
        m=params.m,
        t=params.t,
        t0=params.t0,
        pair_starts=list(params.pair_starts),
        upper_allowance=params.upper_allowance,
        equation_count=params.equation_count,
    )


@app.post("/brute", response_model=BruteResponse)
def brute(req: BruteRequest) -> BruteResponse:
    try:
        records = brute_force_windows(req.k, req.max_n, req.length)
    except _DOMAIN_ERRORS as exc:
        raise _bad_request(exc)
    return BruteResponse(records=[RecordModel(**vars(r)) for r in records])


@app.post("/campaign", response_model=CampaignResponse)
def campaign(req: CampaignRequest) -> CampaignResponse:
    try:
        result = run_campaign(
            req.m,
            req.t,
            req.store_path,
            req.checkpoint_path,
            workers=req.workers,
            checkpoint_every=req.checkpoint_every,
            max_equations=req.max_equations,
            table=_TABLE,
        )
    except _DOMAIN_ERRORS as exc:
        raise _bad_request(exc)
    return CampaignResponse(
        m=result.m,
        t=result.t,
        equation_count=result.equation_count,
        position=result.position,
        completed=result.completed,
        new_records=result.new_records,
        records_total=len(result.records),
        guard_statuses=result.guard_statuses,
        elapsed=result.elapsed,
        halted=result.halted,
    )


def _load_campaign_evidence(ref: CampaignEvidenceRef) -> CampaignEvidence:
    entries, _ = _read_valid_prefix(ref.checkpoint_path, parse_checkpoint_line)
    if not entries:
        raise ValueError(f"no valid checkpoint in {ref.checkpoint_path}")
    last = entries[-1]
    total = count_equations(last.m, last.t, _TABLE)
    records = tuple(load_records(ref.store_path))
    return CampaignEvidence(
        m=last.m, t=last.t, records=records, complete=(last.position == total)
    )


def _load_brute_evidence(ref: BruteEvidenceRef) -> BruteEvidence:
    if ref.scan:
        records = tuple(brute_force_windows(ref.k_max, ref.max_n, ref.length))
    else:
        if not ref.store_path:
            raise ValueError("brute evidence needs a store_path or scan=true")
        records = tuple(
            r for r in load_records(ref.store_path) if r.length == ref.length
        )
    return BruteEvidence(
        k_max=ref.k_max, length=ref.length, max_n=ref.max_n, records=records
    )


@app.post("/f", response_model=FResponse)
def f_table(req: FRequest) -> FResponse:
    try:
        campaigns = [_load_campaign_evidence(ref) for ref in req.campaigns]
        brutes = [_load_brute_evidence(ref) for ref in req.brutes]
        rows = []
        for k in range(req.k_from, req.k_to + 1):
            fv = assemble_f(k, campaigns=campaigns, brutes=brutes, table=_TABLE)
            rows.append(
                FRow(
                    k=k,
                    lower=fv.lower,
                    upper=fv.upper,
                    exact=fv.exact,
                    unconditional=fv.upper_unconditional,
                )
            )
    except FileNotFoundError as exc:
        raise _bad_request(exc)
    except _DOMAIN_ERRORS as exc:
        raise _bad_request(exc)
    return FResponse(rows=rows)


@app.post("/verify-table", response_model=VerifyTableResponse)
def verify_table_endpoint(req: VerifyTableRequest) -> VerifyTableResponse:
    try:
        rows = verify_table(req.k_max, req.max_n, table=_TABLE)
    except _DOMAIN_ERRORS as exc:
        raise _bad_request(exc)
    out = [
        VerifyTableRow(
            k=r.k, expected=r.expected, got_lower=r.lower, got_upper=r.upper, ok=r.ok
        )
        for r in rows
    ]
    return VerifyTableResponse(rows=out, ok=all(r.ok for r in out))
