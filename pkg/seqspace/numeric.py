from __future__ import annotations

import logging
from fractions import Fraction
from typing import Iterable, Literal, Union

import numpy as np

logger = logging.getLogger(__name__)

Mode = Literal["float", "rational"]
Scalar = Union[float, Fraction]

MODES: tuple[Mode, ...] = ("float", "rational")


def check_mode(mode: str) -> Mode:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    return mode  # type: ignore[return-value]


def to_fraction(value: object) -> Fraction:
    """Exact reading of ints, Fractions, decimal strings, 'p/q' strings and floats.

    Floats are read through their shortest repr so 0.1 becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


def scalar(value: object, mode: Mode) -> Scalar:
    if mode == "rational":
        return to_fraction(value)
    return float(value)  # type: ignore[arg-type]


def array(values: Iterable[object], mode: Mode) -> np.ndarray:
    """Build a 1-D array: float64 in float mode, object-of-Fraction in rational mode."""
    if mode == "rational":
        items = [to_fraction(v) for v in values]
        out = np.empty(len(items), dtype=object)
        out[:] = items
        return out
    return np.asarray([float(v) for v in values], dtype=np.float64)  # type: ignore[arg-type]


def zeros(length: int, mode: Mode) -> np.ndarray:
    if mode == "rational":
        out = np.empty(length, dtype=object)
        out[:] = [Fraction(0)] * length
        return out
    return np.zeros(length, dtype=np.float64)


def zeros2d(rows: int, cols: int, mode: Mode) -> np.ndarray:
    if mode == "rational":
        out = np.empty((rows, cols), dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros((rows, cols), dtype=np.float64)


def shift_right(values: np.ndarray, mode: Mode) -> np.ndarray:
    """(v_{-1}, v_0, ..., v_{N-1}) with v_{-1} = 0."""
    head = zeros(1, mode)
    return np.concatenate((head, values[:-1]))


def to_float(values: np.ndarray) -> np.ndarray:
    return np.asarray(values, dtype=object).astype(np.float64) if values.dtype == object else values


def is_integral(value: Scalar) -> bool:
    if isinstance(value, Fraction):
        return value.denominator == 1
    return float(value).is_integer()


def readonly(values: np.ndarray) -> np.ndarray:
    values.flags.writeable = False
    return values


def abs_pow(
    values: np.ndarray, exponents: np.ndarray, mode: Mode
) -> tuple[np.ndarray, Mode, list[str]]:
    """|v_n|^{e_n} termwise.

    Rational mode stays exact only while every exponent is an integer; otherwise the
    whole computation drops to float and a note records the precision loss.
    """
    notes: list[str] = []
    if mode == "rational":
        if all(is_integral(e) for e in exponents):
            out = np.empty(len(values), dtype=object)
            out[:] = [abs(v) ** int(e) for v, e in zip(values, exponents)]
            return out, "rational", notes
        notes.append("fractional exponents evaluated in float")
        logger.warning("rational mode falls back to float for fractional exponents")
    base = np.abs(to_float(values))
    exps = to_float(exponents)
    return np.power(base, exps), "float", notes


def exact_decimal(value: Fraction) -> str | None:
    """Finite decimal text for value, or None when the expansion does not terminate."""
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    if value.denominator == 1:
        return str(value.numerator)
    places = max(twos, fives)
    scaled = abs(value.numerator) * 10**places // value.denominator
    digits = str(scaled).rjust(places + 1, "0")
    sign = "-" if value < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}"
