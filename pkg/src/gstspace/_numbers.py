"""Scalar plumbing shared by every module.

Exact values are :class:`fractions.Fraction`; float values are plain
``float``.  A computation is exact when every input is an ``int`` or a
``Fraction``; a single float anywhere switches it to float mode.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Union[Fraction, float]

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def all_exact(values: Iterable) -> bool:
    return all(is_exact(v) for v in values)


def mode_of(values: Iterable) -> str:
    return EXACT if all_exact(values) else FLOAT


def parse_scalar(text, mode: str = EXACT) -> Scalar:
    """Parse ``"num/den"``, a decimal string or a number.

    In exact mode decimals are read exactly (``"0.3"`` is 3/10).
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(text, bool):
        raise ValueError("booleans are not scalars")
    if mode == EXACT:
        if isinstance(text, float):
            return Fraction(text)
        return Fraction(str(text).strip()) if isinstance(text, str) else Fraction(text)
    if isinstance(text, str) and "/" in text:
        value = float(Fraction(text.strip()))
    else:
        value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {text!r}")
    return value


def parse_vector(text: str | Sequence, mode: str = EXACT) -> list[Scalar]:
    """Parse ``"1,1/2,1/3"`` or a sequence of scalars/strings."""
    if isinstance(text, str):
        parts = [t for t in text.replace(" ", "").split(",") if t]
    else:
        parts = list(text)
    if not parts:
        raise ValueError("empty vector")
    return [parse_scalar(t, mode) for t in parts]


def coerce(values: Iterable, mode: str) -> list[Scalar]:
    if mode == EXACT:
        out = []
        for v in values:
            if not is_exact(v):
                raise TypeError(f"exact mode requires rational input, got {v!r}")
            out.append(Fraction(v))
        return out
    return [float(v) for v in values]


def to_json(x) -> str | float:
    """Rationals serialize as ``"num/den"`` strings, floats as JSON numbers."""
    if is_exact(x):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return float(x)


def vector_to_json(values: Iterable) -> list:
    return [to_json(v) for v in values]


def sign(x) -> int:
    return (x > 0) - (x < 0)
