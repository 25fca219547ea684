from __future__ import annotations

from typing import Any, Literal, Optional, Union

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import Settings, Thresholds, load_env
from .errors import SeqSpaceError
from .package import to_jsonable
from .sequences import ExponentSeq, LambdaSeq
from .services import lambda_ops, matrix_class, paranorm
from .specs import (
    exponent_from_json,
    matrix_from_json,
    parse_exponent,
    parse_lambda,
    parse_matrix,
    parse_seq,
    seq_from_json,
)

load_env()
app = FastAPI(title="seqspace")

# Inline shorthand strings or the JSON spec objects
SpecIn = Union[str, dict]


class _Request(BaseModel):
    N: int = Field(1000, ge=1)
    mode: Literal["float", "rational"] = "float"


class TransformRequest(_Request):
    lam: SpecIn = Field(alias="lambda")
    x: SpecIn
    inverse: bool = False


class ParanormRequest(_Request):
    x: SpecIn
    p: SpecIn
    lam: Optional[SpecIn] = Field(None, alias="lambda")


class MemberRequest(ParanormRequest):
    space: Literal["ellp", "ell_lambda", "c0_lambda"]


class ClassifyRequest(BaseModel):
    A: SpecIn
    lam: SpecIn = Field(alias="lambda")
    p: SpecIn
    q: SpecIn
    target: Literal["lq", "c0q", "cq", "linfq"]
    N: int = Field(1000, ge=1)


def _seq(spec: SpecIn):
    return parse_seq(spec) if isinstance(spec, str) else seq_from_json(spec)


def _lam(spec: SpecIn) -> LambdaSeq:
    return parse_lambda(spec) if isinstance(spec, str) else LambdaSeq(seq_from_json(spec))


def _exponent(spec: SpecIn) -> ExponentSeq:
    return parse_exponent(spec) if isinstance(spec, str) else exponent_from_json(spec)


def _matrix(spec: SpecIn):
    return parse_matrix(spec) if isinstance(spec, str) else matrix_from_json(spec)


def _thresholds() -> Thresholds:
    return Settings.from_env().thresholds


@app.exception_handler(SeqSpaceError)
async def input_error(request: Request, exc: SeqSpaceError):
    return JSONResponse(status_code=422, content={"error": type(exc).__name__, "detail": str(exc)})


@app.get("/healthz")
async def healthz():
    return {"status": "ok", "threads": Settings.from_env().threads}


@app.post("/transform")
async def transform(body: TransformRequest) -> Any:
    lam, seq = _lam(body.lam), _seq(body.x)
    op = lambda_ops.inverse_transform if body.inverse else lambda_ops.lambda_transform
    values = op(lam, seq, body.N, body.mode)
    return to_jsonable({"N": body.N, "mode": body.mode, "values": values})


@app.post("/paranorm")
async def paranorm_endpoint(body: ParanormRequest) -> Any:
    seq, p = _seq(body.x), _exponent(body.p)
    if body.lam is None:
        report = paranorm.paranorm_ellp(seq, p, body.N, body.mode, _thresholds())
    else:
        report = paranorm.paranorm_lambda(seq, _lam(body.lam), p, body.N, body.mode, _thresholds())
    return to_jsonable(report)


@app.post("/member")
async def member(body: MemberRequest) -> Any:
    lam = _lam(body.lam) if body.lam is not None else None
    space = paranorm.Space(body.space, _exponent(body.p), lam)
    return to_jsonable(
        paranorm.membership_report(_seq(body.x), space, body.N, body.mode, _thresholds())
    )


@app.post("/classify")
async def classify(body: ClassifyRequest) -> Any:
    result = await matrix_class.classify_async(
        _matrix(body.A),
        _lam(body.lam),
        _exponent(body.p),
        _exponent(body.q),
        body.target,
        body.N,
        _thresholds(),
    )
    return to_jsonable(result)
