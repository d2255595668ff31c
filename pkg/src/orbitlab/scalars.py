"""Scalar modes: exact rationals (default) or binary floats with a tolerance.

A whole scenario runs in one mode.  Exact mode is the basis of every
acceptance check; float mode exists for larger experiments and compares
values up to a relative tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, float]

DEFAULT_FLOAT_TOL = 2.0 ** -40


def as_fraction(value) -> Fraction:
    """Coerce ints, strings and fractions; reject floats (lossy by intent)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot use {value!r} as an exact scalar")


@dataclass(frozen=True)
class ScalarContext:
    """Comparison rules for one scalar mode."""

    mode: str = "exact"
    tol: float = DEFAULT_FLOAT_TOL

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown scalar mode {self.mode!r}")
        if self.mode == "float" and not self.tol > 0:
            raise ValueError("float mode requires a positive tolerance")

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def coerce(self, value) -> Scalar:
        if self.exact:
            return as_fraction(value)
        return float(value)

    def is_zero(self, x: Scalar) -> bool:
        if self.exact:
            return x == 0
        return abs(x) <= self.tol

    def eq(self, a: Scalar, b: Scalar) -> bool:
        if self.exact:
            return a == b
        return abs(a - b) <= self.tol * max(1.0, abs(a), abs(b))

    def lt(self, a: Scalar, b: Scalar) -> bool:
        """Strictly less, up to tolerance in float mode."""
        if self.exact:
            return a < b
        return a < b and not self.eq(a, b)


EXACT = ScalarContext()
FLOAT = ScalarContext(mode="float")


def format_scalar(x: Scalar) -> str:
    """Canonical text: rationals as p/q in lowest terms, floats as repr."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def parse_scalar(text: str, mode: str = "exact") -> Scalar:
    text = text.strip()
    if mode == "exact":
        return Fraction(text)
    return float(Fraction(text)) if "/" in text else float(text)
