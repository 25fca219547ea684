"""Expression trees over the index variables n and k.

The language is intentionally tiny: literals, n, k, + - * / ^, unary minus and the
functions log, exp, sqrt, abs, min, max. Trees are immutable and hashable so they
can key sampling caches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Mapping, Union

import numpy as np

from .errors import DivisionByZero, DomainError, RationalUnsupported, UnboundVariable
from .numeric import Mode, Scalar, exact_decimal, to_fraction

VARIABLES = frozenset({"n", "k"})
UNARY_FUNCS = frozenset({"log", "exp", "sqrt", "abs"})
VARIADIC_FUNCS = frozenset({"min", "max"})
FUNCTIONS = UNARY_FUNCS | VARIADIC_FUNCS
TRANSCENDENTAL = frozenset({"log", "exp", "sqrt"})

BINARY_OPS = ("+", "-", "*", "/", "^")
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}
_ATOM = 5


@dataclass(frozen=True)
class Num:
    value: Fraction

    def __post_init__(self):
        value = to_fraction(self.value)
        if value < 0:
            raise ValueError("literals are non-negative; use Neg for a sign")
        if exact_decimal(value) is None:
            raise ValueError(f"{value} has no finite decimal literal")
        object.__setattr__(self, "value", value)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if self.name not in VARIABLES:
            raise ValueError(f"unknown variable {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Neg:
    operand: "Expr"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown operator {self.op!r}")

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if self.func not in FUNCTIONS:
            raise ValueError(f"unknown function {self.func!r}")
        if self.func in UNARY_FUNCS and len(self.args) != 1:
            raise ValueError(f"{self.func} takes one argument")
        if self.func in VARIADIC_FUNCS and len(self.args) < 2:
            raise ValueError(f"{self.func} takes at least two arguments")

    def __str__(self) -> str:
        return to_text(self)


Expr = Union[Num, Var, Neg, BinOp, Call]


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    return _ATOM


def _wrap(e: Expr, paren: bool) -> str:
    text = to_text(e)
    return f"({text})" if paren else text


def to_text(e: Expr) -> str:
    """Print with the fewest parentheses that still parse back to the same tree."""
    if isinstance(e, Num):
        return exact_decimal(e.value)  # type: ignore[return-value]
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({', '.join(to_text(a) for a in e.args)})"
    if isinstance(e, Neg):
        return "-" + _wrap(e.operand, _prec(e.operand) < _PREC["neg"])
    prec = _PREC[e.op]
    if e.op == "^":
        # right associative; the exponent is parsed at unary level
        left = _wrap(e.left, _prec(e.left) <= prec)
        right = _wrap(e.right, _prec(e.right) < _PREC["neg"])
        return f"{left}^{right}"
    left = _wrap(e.left, _prec(e.left) < prec)
    right = _wrap(e.right, _prec(e.right) <= prec)
    return f"{left} {e.op} {right}"


def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset({e.name})
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, Neg):
        return free_vars(e.operand)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    return frozenset().union(*(free_vars(a) for a in e.args))


def _integer_valued(e: Expr) -> bool:
    if isinstance(e, Num):
        return e.value.denominator == 1
    if isinstance(e, Var):
        return True
    if isinstance(e, Neg):
        return _integer_valued(e.operand)
    if isinstance(e, BinOp):
        if e.op in ("+", "-", "*"):
            return _integer_valued(e.left) and _integer_valued(e.right)
        return False
    if e.func in ("abs", "min", "max"):
        return all(_integer_valued(a) for a in e.args)
    return False


def is_rational_closed(e: Expr) -> bool:
    """True when the tree can be evaluated exactly: no log/exp/sqrt and integer exponents."""
    if isinstance(e, (Num, Var)):
        return True
    if isinstance(e, Neg):
        return is_rational_closed(e.operand)
    if isinstance(e, Call):
        return e.func not in TRANSCENDENTAL and all(is_rational_closed(a) for a in e.args)
    if e.op == "^" and not _integer_valued(e.right):
        return False
    return is_rational_closed(e.left) and is_rational_closed(e.right)


class _RationalOps:
    def var(self, value: int) -> Fraction:
        return Fraction(value)

    def num(self, value: Fraction) -> Fraction:
        return value

    def div(self, a: Fraction, b: Fraction) -> Fraction:
        if b == 0:
            raise DivisionByZero("division by zero")
        return a / b

    def pow(self, a: Fraction, b: Fraction) -> Fraction:
        if b.denominator != 1:
            raise RationalUnsupported(f"non-integer exponent {b} in rational mode")
        if a == 0 and b < 0:
            raise DivisionByZero("zero raised to a negative power")
        return a ** int(b)

    def call(self, func: str, args: list[Fraction]) -> Fraction:
        if func in TRANSCENDENTAL:
            raise RationalUnsupported(f"{func} is not available in rational mode")
        if func == "abs":
            return abs(args[0])
        return min(args) if func == "min" else max(args)


class _FloatOps:
    """Vectorised float64 evaluation; values may be scalars or numpy arrays."""

    def var(self, value):
        return np.asarray(value, dtype=np.float64)

    def num(self, value: Fraction):
        return np.float64(float(value))

    def div(self, a, b):
        if np.any(np.asarray(b) == 0):
            raise DivisionByZero("division by zero")
        return np.divide(a, b)

    def pow(self, a, b):
        a_arr, b_arr = np.asarray(a), np.asarray(b)
        if np.any((a_arr == 0) & (b_arr < 0)):
            raise DivisionByZero("zero raised to a negative power")
        if np.any((a_arr < 0) & (b_arr != np.floor(b_arr))):
            raise DomainError("negative base with non-integer exponent")
        with np.errstate(over="ignore", under="ignore"):
            return np.power(a, b)

    def call(self, func: str, args: list):
        head = np.asarray(args[0])
        if func == "log":
            if np.any(head <= 0):
                raise DomainError("log of a non-positive value")
            return np.log(head)
        if func == "sqrt":
            if np.any(head < 0):
                raise DomainError("sqrt of a negative value")
            return np.sqrt(head)
        if func == "exp":
            with np.errstate(over="ignore"):
                return np.exp(head)
        if func == "abs":
            return np.abs(head)
        combine = np.minimum if func == "min" else np.maximum
        return reduce(combine, args)


_OPS = {"rational": _RationalOps(), "float": _FloatOps()}


def _evaluate(e: Expr, env: Mapping[str, object], ops) -> object:
    if isinstance(e, Num):
        return ops.num(e.value)
    if isinstance(e, Var):
        if e.name not in env:
            raise UnboundVariable(e.name)
        return ops.var(env[e.name])
    if isinstance(e, Neg):
        return -_evaluate(e.operand, env, ops)
    if isinstance(e, Call):
        return ops.call(e.func, [_evaluate(a, env, ops) for a in e.args])
    left = _evaluate(e.left, env, ops)
    right = _evaluate(e.right, env, ops)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if e.op == "*":
        return left * right
    if e.op == "/":
        return ops.div(left, right)
    return ops.pow(left, right)


def eval_expr(e: Expr, bindings: Mapping[str, int], mode: Mode = "float") -> Scalar:
    """Evaluate at one integer point; exact in rational mode."""
    value = _evaluate(e, bindings, _OPS[mode])
    if mode == "rational":
        return value  # type: ignore[return-value]
    return float(value)  # type: ignore[arg-type]


def eval_grid(e: Expr, mode: Mode = "float", **axes: np.ndarray) -> np.ndarray:
    """Evaluate over broadcastable integer index arrays (e.g. n=arange(N+1)).

    Float mode is vectorised; rational mode walks the points and returns an object array.
    """
    arrays = np.broadcast_arrays(*axes.values())
    shape = arrays[0].shape if arrays else ()
    if mode == "float":
        with np.errstate(invalid="ignore"):
            value = _evaluate(e, dict(zip(axes.keys(), arrays)), _OPS["float"])
        return np.broadcast_to(np.asarray(value, dtype=np.float64), shape).copy()
    out = np.empty(shape, dtype=object)
    names = list(axes.keys())
    for idx in np.ndindex(*shape):
        env = {name: int(arr[idx]) for name, arr in zip(names, arrays)}
        out[idx] = _evaluate(e, env, _OPS["rational"])
    return out
