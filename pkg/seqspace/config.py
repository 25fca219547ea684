from __future__ import annotations

import os
from typing import Any, Dict, Iterable, Literal

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from .errors import RationalUnsupported, SpecFormatError


def load_env() -> None:
    if not os.getenv("ENV_LOADED"):
        load_dotenv(override=False)
        os.environ["ENV_LOADED"] = "1"


class Thresholds(BaseModel):
    """Every knob that turns finite evidence into a verdict."""

    model_config = {"frozen": True}

    tail_tol: float = Field(1e-9, gt=0)
    divergence_cap: float = Field(1e12, gt=0)
    window: float = Field(0.25, gt=0, lt=1)
    c0_ratio: float = Field(0.01, gt=0, lt=1)
    decay_margin: float = Field(0.05, ge=0)
    trend_slack: float = Field(1e-3, ge=0)
    harmonic_floor: float = Field(1e-12, ge=0)
    flat_tol: float = Field(1e-6, ge=0)
    growth_factor: float = Field(2.0, gt=1)
    limit_tol: float = Field(1e-6, gt=0)
    grid_max_exp: int = Field(10, ge=1, le=60)

    def grid(self) -> list[int]:
        """Geometric search grid 2^1 .. 2^grid_max_exp for M and L."""
        return [2**j for j in range(1, self.grid_max_exp + 1)]

    def as_dict(self) -> dict[str, float]:
        return self.model_dump()


def _env_number(name: str, default: float, kind=float):
    raw = os.getenv(name)
    if raw in (None, ""):
        return default
    try:
        return kind(raw)
    except ValueError as exc:
        raise SpecFormatError(f"{name}={raw!r} is not a valid {kind.__name__}") from exc


class Settings(BaseModel):
    threads: int = Field(4, ge=1)
    log_level: str = "WARNING"
    thresholds: Thresholds = Thresholds()

    @classmethod
    def from_env(cls) -> "Settings":
        # Read dynamically so tests can monkeypatch the environment
        load_env()
        try:
            thresholds = Thresholds(
                tail_tol=_env_number("SEQSPACE_TAIL_TOL", 1e-9),
                divergence_cap=_env_number("SEQSPACE_DIVERGENCE_CAP", 1e12),
                window=_env_number("SEQSPACE_WINDOW", 0.25),
                c0_ratio=_env_number("SEQSPACE_C0_RATIO", 0.01),
                grid_max_exp=_env_number("SEQSPACE_GRID_MAX_EXP", 10, int),
            )
            return cls(
                threads=_env_number("SEQSPACE_THREADS", 4, int),
                log_level=os.getenv("SEQSPACE_LOG_LEVEL", "WARNING").upper(),
                thresholds=thresholds,
            )
        except ValidationError as exc:
            first = exc.errors()[0]
            where = ".".join(str(p) for p in first["loc"])
            raise SpecFormatError(f"environment setting {where}: {first['msg']}") from exc


def parse_overrides(pairs: Iterable[str], base: Thresholds) -> Thresholds:
    """Apply ``key=value`` threshold overrides on top of `base`."""
    updates: Dict[str, str] = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in Thresholds.model_fields:
            raise SpecFormatError(f"unknown threshold override {pair!r}")
        updates[key] = raw.strip()
    try:
        return Thresholds(**{**base.model_dump(), **updates})
    except ValidationError as exc:
        raise SpecFormatError(f"invalid threshold override: {exc.errors()[0]['msg']}") from exc


class RunConfig(BaseModel):
    """One CLI invocation: horizon, arithmetic mode, output format and thresholds."""

    command: str
    N: int = Field(..., ge=1)
    mode: Literal["float", "rational"] = "float"
    format: Literal["table", "json", "csv"] = "table"
    thresholds: Thresholds = Thresholds()

    @classmethod
    def build(cls, command: str, N: int, mode: str, format: str, overrides: Iterable[str] = ()):
        settings = Settings.from_env()
        try:
            return cls(
                command=command,
                N=N,
                mode=mode,
                format=format,
                thresholds=parse_overrides(overrides, settings.thresholds),
            )
        except ValidationError as exc:
            first = exc.errors()[0]
            where = ".".join(str(p) for p in first["loc"])
            raise SpecFormatError(f"{where}: {first['msg']}") from exc

    def check_exact(self, **specs: Any) -> None:
        """Rational mode needs every input to evaluate exactly."""
        if self.mode != "rational":
            return
        for name, spec in specs.items():
            if spec is None:
                continue
            exact = spec.spec.exact() if hasattr(spec, "spec") else spec.exact()
            if not exact:
                raise RationalUnsupported(f"--{name} cannot be evaluated exactly in rational mode")
