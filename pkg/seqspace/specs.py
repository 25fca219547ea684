"""Reading sequence, exponent, λ and matrix specs from JSON or inline shorthand.

JSON schema::

    {"kind": "expr", "expr": "1/(n+1)"}
    {"kind": "list", "values": [1, "1/2", {"num": 1, "den": 3}], "tail": {"rule": "zero"}}
    {"kind": "derived", "transform": "lambda", "parent": {...}, "lambda": {...}}
    {"kind": "matrix", "form": "triangle", "expr": "1/(n+1)"}
    {"kind": "matrix", "form": "banded", "bands": [{"offset": 0, "expr": "1"}]}

Exponent specs may carry "bound" (the declared H). Inline forms: bare expressions,
``list:1,0,0;tail=zero|const:c|repeat``, ``@path`` (JSON file, or CSV whose last column
is read), a literal JSON object, and for matrices ``zero``, ``identity``, ``diag:<expr>``,
``triangle:<expr>`` and ``full:<expr>``. Exponent text may end in ``;bound=H``.
"""

from __future__ import annotations

import csv
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, TypeAdapter, ValidationError

from .errors import SpecFormatError
from .numeric import to_fraction
from .sequences import (
    IDENTITY,
    ZERO_MATRIX,
    Band,
    BandedMatrix,
    ClosedForm,
    Derived,
    ExponentSeq,
    Explicit,
    FullMatrix,
    LambdaSeq,
    MatrixSpec,
    SeqSpec,
    Tail,
    TriangleMatrix,
    diagonal,
)

logger = logging.getLogger(__name__)


class RationalModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    num: int
    den: int = 1


NumberIn = Union[StrictInt, float, str, RationalModel]


class TailModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rule: Literal["zero", "const", "repeat"] = "zero"
    value: Optional[NumberIn] = None


class ExprSeqModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["expr"]
    expr: str
    bound: Optional[NumberIn] = None


class ListSeqModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["list"]
    values: List[NumberIn]
    tail: TailModel = TailModel()
    bound: Optional[NumberIn] = None


class DerivedSeqModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kind: Literal["derived"]
    transform: Literal["lambda", "inverse", "s_operator"]
    parent: Union[str, SeqModel]
    lam: Union[str, SeqModel] = Field(alias="lambda")


SeqModel = Annotated[
    Union[ExprSeqModel, ListSeqModel, DerivedSeqModel], Field(discriminator="kind")
]
DerivedSeqModel.model_rebuild()


class BandModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    offset: int
    expr: str


class MatrixModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["matrix"] = "matrix"
    form: Literal["full", "triangle", "banded", "diag", "zero", "identity"]
    expr: Optional[str] = None
    bands: List[BandModel] = []


_SEQ = TypeAdapter(SeqModel)


def parse_number(value: Any) -> Fraction:
    """Exact reading of ints, decimals, "p/q" strings and {"num", "den"} objects."""
    if isinstance(value, RationalModel):
        value = {"num": value.num, "den": value.den}
    if isinstance(value, dict):
        if set(value) - {"num", "den"} or "num" not in value:
            raise SpecFormatError(f"rational objects look like {{'num', 'den'}}, got {value!r}")
        den = int(value.get("den", 1))
        if den == 0:
            raise SpecFormatError("rational with zero denominator")
        return Fraction(int(value["num"]), den)
    try:
        return to_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SpecFormatError(f"not a number: {value!r}") from exc


def _validation_message(exc: ValidationError) -> str:
    first = exc.errors()[0]
    where = ".".join(str(p) for p in first.get("loc", ())) or "spec"
    return f"{where}: {first.get('msg', 'invalid')}"


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"invalid JSON at byte {exc.pos}: {exc.msg}") from exc


def _read_path(ref: str) -> Any:
    """Contents of an @path reference: parsed JSON, or the last CSV column as a list spec."""
    path = Path(ref[1:])
    if not path.is_file():
        raise SpecFormatError(f"no such spec file: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        return {"kind": "list", "values": csv_column(text)}
    return _load_json(text)


def csv_column(text: str) -> List[str]:
    """Last column of a CSV with a header row."""
    rows = [row for row in csv.reader(text.splitlines()) if row]
    if len(rows) < 2:
        raise SpecFormatError("CSV spec needs a header row and at least one value")
    return [row[-1].strip() for row in rows[1:]]


def _tail(text: str) -> Tail:
    rule, _, arg = text.partition(":")
    rule = rule.strip()
    if rule == "const":
        if not arg:
            raise SpecFormatError("tail=const needs a value, e.g. tail=const:1/2")
        return Tail("const", parse_number(arg))
    if rule in ("zero", "repeat") and not arg:
        return Tail(rule)  # type: ignore[arg-type]
    raise SpecFormatError(f"unknown tail rule {text!r}; expected zero, const:c or repeat")


def parse_list(text: str) -> Explicit:
    """``list:v1,v2,...;tail=zero|const:c|repeat`` (tail defaults to zero)."""
    body = text[len("list:") :]
    values_part, *options = body.split(";")
    tail = Tail()
    for option in options:
        key, _, val = option.partition("=")
        if key.strip() != "tail":
            raise SpecFormatError(f"unknown list option {key.strip()!r}")
        tail = _tail(val)
    values = [parse_number(v) for v in values_part.split(",") if v.strip()]
    return Explicit(tuple(values), tail)


def _split_bound(text: str) -> tuple[str, Optional[Fraction]]:
    head, sep, tail = text.rpartition(";bound=")
    if not sep:
        return text, None
    return head, parse_number(tail)


def seq_from_model(model: Union[str, ExprSeqModel, ListSeqModel, DerivedSeqModel]) -> SeqSpec:
    if isinstance(model, str):
        return parse_seq(model)
    if isinstance(model, ExprSeqModel):
        return ClosedForm(model.expr)
    if isinstance(model, ListSeqModel):
        tail = model.tail
        value = parse_number(tail.value) if tail.value is not None else Fraction(0)
        if tail.rule == "const" and tail.value is None:
            raise SpecFormatError("tail rule 'const' needs a value")
        return Explicit(tuple(parse_number(v) for v in model.values), Tail(tail.rule, value))
    lam = LambdaSeq(seq_from_model(model.lam))
    return Derived(model.transform, seq_from_model(model.parent), lam)


def _seq_model(data: Any):
    try:
        return _SEQ.validate_python(data)
    except ValidationError as exc:
        raise SpecFormatError(f"invalid sequence spec: {_validation_message(exc)}") from exc


def seq_from_json(data: Any) -> SeqSpec:
    return seq_from_model(_seq_model(data))


def _structured(text: str) -> Optional[Any]:
    if text.startswith("@"):
        return _read_path(text)
    if text.startswith("{"):
        return _load_json(text)
    return None


def parse_seq(text: str) -> SeqSpec:
    """Sequence from any inline form; bare text is an expression in n."""
    text = text.strip()
    if not text:
        raise SpecFormatError("empty sequence spec")
    data = _structured(text)
    if data is not None:
        return seq_from_json(data)
    if text.startswith("list:"):
        return parse_list(text)
    return ClosedForm(text)


def parse_lambda(text: str) -> LambdaSeq:
    return LambdaSeq(parse_seq(text))


def exponent_from_json(data: Any, bound: Any = None) -> ExponentSeq:
    model = _seq_model(data)
    declared = getattr(model, "bound", None)
    if bound is None and declared is not None:
        bound = parse_number(declared)
    return ExponentSeq.of(seq_from_model(model), bound)


def parse_exponent(text: str, bound: Any = None) -> ExponentSeq:
    """Exponent sequence; H comes from `bound`, a JSON "bound" or a ``;bound=H`` suffix."""
    text = text.strip()
    data = _structured(text)
    if data is not None:
        return exponent_from_json(data, bound)
    text, suffix = _split_bound(text)
    return ExponentSeq.of(parse_seq(text), bound if bound is not None else suffix)


def matrix_from_model(model: MatrixModel) -> MatrixSpec:
    if model.form == "zero":
        return ZERO_MATRIX
    if model.form == "identity":
        return IDENTITY
    if model.form == "banded":
        if not model.bands:
            raise SpecFormatError("banded matrix needs at least one band")
        return BandedMatrix(tuple(Band(b.offset, b.expr) for b in model.bands))
    if not model.expr:
        raise SpecFormatError(f"matrix form {model.form!r} needs an expression")
    if model.form == "diag":
        return diagonal(model.expr)
    if model.form == "triangle":
        return TriangleMatrix(model.expr)
    return FullMatrix(model.expr)


def matrix_from_json(data: Any) -> MatrixSpec:
    try:
        model = MatrixModel.model_validate(data)
    except ValidationError as exc:
        raise SpecFormatError(f"invalid matrix spec: {_validation_message(exc)}") from exc
    return matrix_from_model(model)


_NAMED_FORMS = ("diag", "triangle", "full")


def parse_matrix(text: str) -> MatrixSpec:
    """Matrix from ``zero``, ``identity``, ``diag:``/``triangle:``/``full:`` prefixes,
    @path or JSON; a bare expression in n and k is a full matrix."""
    text = text.strip()
    if not text:
        raise SpecFormatError("empty matrix spec")
    if text.startswith("@") and text.lower().endswith(".csv"):
        raise SpecFormatError("matrices cannot be read from CSV")
    data = _structured(text)
    if data is not None:
        return matrix_from_json(data)
    if text in ("zero", "identity"):
        return matrix_from_model(MatrixModel(form=text))  # type: ignore[arg-type]
    form, sep, expr = text.partition(":")
    if sep and form in _NAMED_FORMS:
        return matrix_from_model(MatrixModel(form=form, expr=expr))  # type: ignore[arg-type]
    return FullMatrix(text)
