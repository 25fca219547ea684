from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Optional, Union

import numpy as np

from .errors import (
    ConjugateUndefined,
    NonPositive,
    NonPositiveExponent,
    NotIncreasing,
    QNotMonotone,
    SpecFormatError,
    UnboundedExponent,
)
from .expr import Expr, eval_grid, free_vars, is_rational_closed
from .models import LambdaValidation
from .numeric import Mode, array, readonly, to_float, to_fraction
from .parser import parse_expr

logger = logging.getLogger(__name__)

TailRule = Literal["zero", "const", "repeat"]
Transform = Literal["lambda", "inverse", "s_operator"]


def _as_expr(value: Union[str, Expr]) -> Expr:
    return parse_expr(value) if isinstance(value, str) else value


@dataclass(frozen=True)
class Tail:
    rule: TailRule = "zero"
    value: Fraction = Fraction(0)

    def __post_init__(self):
        if self.rule not in ("zero", "const", "repeat"):
            raise SpecFormatError(f"unknown tail rule {self.rule!r}")
        object.__setattr__(self, "value", to_fraction(self.value))


@dataclass(frozen=True)
class ClosedForm:
    """x_n given by an expression in n."""

    expr: Expr

    def __post_init__(self):
        object.__setattr__(self, "expr", _as_expr(self.expr))
        extra = free_vars(self.expr) - {"n"}
        if extra:
            raise SpecFormatError(f"sequence expressions use n only, found {sorted(extra)}")

    def exact(self) -> bool:
        return is_rational_closed(self.expr)

    def _sample(self, N: int, mode: Mode) -> np.ndarray:
        return eval_grid(self.expr, mode, n=np.arange(N + 1))


@dataclass(frozen=True)
class Explicit:
    """Finite prefix followed by a tail rule."""

    prefix: tuple[Fraction, ...]
    tail: Tail = field(default_factory=Tail)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(to_fraction(v) for v in self.prefix))
        if self.tail.rule == "repeat" and not self.prefix:
            raise SpecFormatError("repeat tail needs a non-empty prefix")

    def exact(self) -> bool:
        return True

    def tail_value(self) -> Fraction:
        if self.tail.rule == "zero":
            return Fraction(0)
        if self.tail.rule == "const":
            return self.tail.value
        return self.prefix[-1]

    def _sample(self, N: int, mode: Mode) -> np.ndarray:
        head = list(self.prefix[: N + 1])
        head += [self.tail_value()] * (N + 1 - len(head))
        return array(head, mode)


@dataclass(frozen=True)
class Derived:
    """A sequence obtained from another one through Λ, Λ⁻¹ or S."""

    transform: Transform
    parent: "SeqSpec"
    lam: "LambdaSeq"

    def __post_init__(self):
        if self.transform not in ("lambda", "inverse", "s_operator"):
            raise SpecFormatError(f"unknown transform {self.transform!r}")

    def exact(self) -> bool:
        return self.parent.exact() and self.lam.spec.exact()

    def _sample(self, N: int, mode: Mode) -> np.ndarray:
        from .services import lambda_ops

        op = {
            "lambda": lambda_ops.lambda_transform,
            "inverse": lambda_ops.inverse_transform,
            "s_operator": lambda_ops.s_operator,
        }[self.transform]
        return op(self.lam, self.parent, N, mode)


SeqSpec = Union[ClosedForm, Explicit, Derived]


@lru_cache(maxsize=256)
def _cached_sample(spec: SeqSpec, N: int, mode: Mode) -> np.ndarray:
    logger.debug("sampling %s to N=%d (%s)", type(spec).__name__, N, mode)
    values = spec._sample(N, mode)
    if mode == "float":
        values = np.asarray(values, dtype=np.float64)
    return readonly(values)


def sample(spec: SeqSpec, N: int, mode: Mode = "float") -> np.ndarray:
    """Values x_0..x_N as a read-only array (float64, or object-of-Fraction when rational)."""
    if N < 0:
        raise ValueError("horizon must be non-negative")
    return _cached_sample(spec, N, mode)


def value(spec: SeqSpec, n: int, mode: Mode = "float"):
    return sample(spec, n, mode)[n]


def best_mode(*specs: SeqSpec) -> Mode:
    return "rational" if all(s.exact() for s in specs) else "float"


def expr_seq(text: str) -> ClosedForm:
    return ClosedForm(parse_expr(text))


def list_seq(values, tail: Optional[Tail] = None) -> Explicit:
    return Explicit(tuple(values), tail or Tail())


def unit(index: int = 0) -> Explicit:
    """e_index = (0,..,0,1,0,...)."""
    return Explicit(tuple([0] * index + [1]), Tail("zero"))


ONES = Explicit((Fraction(1),), Tail("repeat"))
ZERO = Explicit((), Tail("zero"))


@dataclass(frozen=True)
class LambdaSeq:
    """Strictly increasing positive λ with the convention λ_{-1} = 0."""

    spec: SeqSpec

    def values(self, N: int, mode: Mode = "float") -> np.ndarray:
        return sample(self.spec, N, mode)

    def with_previous(self, N: int, mode: Mode = "float") -> tuple[np.ndarray, np.ndarray]:
        """(λ_0..λ_N, λ_{-1}..λ_{N-1})."""
        lam = self.values(N, mode)
        prev = np.concatenate((array([0], mode), lam[:-1]))
        return lam, prev

    def require(self, N: int, mode: Mode = "float") -> None:
        report = validate_lambda(self, N, mode)
        if not report.ok:
            if report.violation == "non_positive":
                raise NonPositive(report.index)  # type: ignore[arg-type]
            raise NotIncreasing(report.index)  # type: ignore[arg-type]


def validate_lambda(lam: LambdaSeq, horizon: int, mode: Mode = "float") -> LambdaValidation:
    """Check positivity and strict increase on [0, horizon]; growth is only sampled."""
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    values = lam.values(horizon, mode)
    note = f"strict increase checked on [0, {horizon}]; unbounded growth is not certified"
    nonpos = np.nonzero(values <= 0)[0]
    steps = np.nonzero(values[1:] <= values[:-1])[0]
    first_nonpos = int(nonpos[0]) if nonpos.size else None
    first_step = int(steps[0]) + 1 if steps.size else None
    if first_nonpos is not None and (first_step is None or first_nonpos <= first_step):
        return LambdaValidation(False, horizon, "non_positive", first_nonpos, note)
    if first_step is not None:
        return LambdaValidation(False, horizon, "not_increasing", first_step, note)
    growth = float(values[-1]) / float(values[0])
    return LambdaValidation(True, horizon, None, None, note, growth=growth)


@dataclass(frozen=True)
class ExponentSeq:
    """Bounded positive exponents p_k with a declared bound H."""

    spec: SeqSpec
    bound: Fraction

    def __post_init__(self):
        object.__setattr__(self, "bound", to_fraction(self.bound))
        if self.bound <= 0:
            raise UnboundedExponent("declared bound must be positive")

    @classmethod
    def of(cls, spec: SeqSpec, bound=None) -> "ExponentSeq":
        """Build from a spec, inferring H only where the spec determines it exactly."""
        if bound is not None:
            return cls(spec, to_fraction(bound))
        if isinstance(spec, ClosedForm) and not free_vars(spec.expr):
            return cls(spec, to_fraction(sample(spec, 0, best_mode(spec))[0]))
        if isinstance(spec, Explicit) and spec.tail.rule != "zero":
            return cls(spec, max(spec.prefix + (spec.tail_value(),)))
        raise UnboundedExponent("an exponent sequence needs a declared bound H")

    @property
    def H(self) -> Fraction:
        return self.bound

    @property
    def M(self) -> Fraction:
        return max(Fraction(1), self.bound)

    def values(self, N: int, mode: Mode = "float") -> np.ndarray:
        if mode == "rational" and not self.spec.exact():
            mode = "float"
        values = sample(self.spec, N, mode)
        bad = np.nonzero(values <= 0)[0]
        if bad.size:
            raise NonPositiveExponent(int(bad[0]))
        over = np.nonzero(to_float(values) > float(self.bound) * (1 + 1e-12))[0]
        if over.size:
            raise UnboundedExponent(
                f"p_{int(over[0])} = {values[over[0]]} exceeds the declared bound {self.bound}"
            )
        return values

    def sup(self, N: int) -> float:
        return float(to_float(self.values(N)).max())

    def partition(self, N: int) -> tuple[np.ndarray, np.ndarray]:
        """Index sets K1 = {p_k <= 1} and K2 = {p_k > 1} on [0, N]."""
        values = self.values(N, "rational" if self.spec.exact() else "float")
        small = np.asarray(values <= 1, dtype=bool)
        idx = np.arange(N + 1)
        return idx[small], idx[~small]

    def conjugate(self, N: int) -> np.ndarray:
        """p̀_k = p_k/(p_k - 1) on K2, NaN on K1 (never read there)."""
        values = to_float(self.values(N))
        out = np.full(N + 1, np.nan)
        _, k2 = self.partition(N)
        if np.any(values[k2] == 1):
            raise ConjugateUndefined("p_k = 1 has no conjugate exponent")
        out[k2] = values[k2] / (values[k2] - 1)
        return out

    def require_nondecreasing(self, N: int) -> None:
        values = to_float(self.values(N))
        drops = np.nonzero(values[1:] < values[:-1])[0]
        if drops.size:
            raise QNotMonotone(int(drops[0]) + 1)


def constant_exponent(value) -> ExponentSeq:
    v = to_fraction(value)
    return ExponentSeq(Explicit((v,), Tail("repeat")), v)


# -- matrices -----------------------------------------------------------------------


@dataclass(frozen=True)
class FullMatrix:
    """a_nk given by an expression in n and k everywhere."""

    expr: Expr

    def __post_init__(self):
        object.__setattr__(self, "expr", _as_expr(self.expr))

    def exact(self) -> bool:
        return is_rational_closed(self.expr)

    def _block(self, rows: int, cols: int, mode: Mode) -> np.ndarray:
        n = np.arange(rows)[:, None]
        k = np.arange(cols)[None, :]
        return eval_grid(self.expr, mode, n=n, k=k)


@dataclass(frozen=True)
class TriangleMatrix:
    """Lower triangle: a_nk from the expression for k <= n, exactly 0 above."""

    expr: Expr

    def __post_init__(self):
        object.__setattr__(self, "expr", _as_expr(self.expr))

    def exact(self) -> bool:
        return is_rational_closed(self.expr)

    def _block(self, rows: int, cols: int, mode: Mode) -> np.ndarray:
        out = np.zeros((rows, cols), dtype=np.float64) if mode == "float" else None
        if mode == "rational":
            out = np.empty((rows, cols), dtype=object)
            out.fill(Fraction(0))
        for n in range(rows):
            width = min(n + 1, cols)
            if width:
                out[n, :width] = eval_grid(self.expr, mode, n=np.full(width, n), k=np.arange(width))
        return out


@dataclass(frozen=True)
class Band:
    offset: int  # k - n
    expr: Expr

    def __post_init__(self):
        object.__setattr__(self, "expr", _as_expr(self.expr))


@dataclass(frozen=True)
class BandedMatrix:
    """Nonzero only on the listed diagonals k = n + offset."""

    bands: tuple[Band, ...]

    def __post_init__(self):
        object.__setattr__(self, "bands", tuple(self.bands))

    def exact(self) -> bool:
        return all(is_rational_closed(b.expr) for b in self.bands)

    def _block(self, rows: int, cols: int, mode: Mode) -> np.ndarray:
        if mode == "rational":
            out = np.empty((rows, cols), dtype=object)
            out.fill(Fraction(0))
        else:
            out = np.zeros((rows, cols), dtype=np.float64)
        for band in self.bands:
            n = np.arange(rows)
            k = n + band.offset
            keep = (k >= 0) & (k < cols)
            if keep.any():
                out[n[keep], k[keep]] = eval_grid(band.expr, mode, n=n[keep], k=k[keep])
        return out


MatrixSpec = Union[FullMatrix, TriangleMatrix, BandedMatrix]


@lru_cache(maxsize=32)
def _cached_block(spec: MatrixSpec, rows: int, cols: int, mode: Mode) -> np.ndarray:
    logger.debug("sampling matrix %s %dx%d (%s)", type(spec).__name__, rows, cols, mode)
    return readonly(spec._block(rows, cols, mode))


def block(spec: MatrixSpec, rows: int, cols: int, mode: Mode = "float") -> np.ndarray:
    """The top-left rows x cols corner of the matrix as a read-only array."""
    return _cached_block(spec, rows, cols, mode)


def entry(spec: MatrixSpec, n: int, k: int, mode: Mode = "float"):
    return block(spec, n + 1, k + 1, mode)[n, k]


ZERO_MATRIX = BandedMatrix(())
IDENTITY = BandedMatrix((Band(0, parse_expr("1")),))


def diagonal(text: str) -> BandedMatrix:
    return BandedMatrix((Band(0, parse_expr(text)),))
