"""Exact rational parsing and formatting shared across the package.

All levels, mixing parameters and weights are `fractions.Fraction`; floats
appear only in Monte Carlo estimates and display mirrors.
"""
from __future__ import annotations

from fractions import Fraction


def parse_rational(value) -> Fraction:
    """Parse a decimal or rational string (or int) into an exact Fraction.

    Accepts "1/2", "0.2", "3", 3. Floats are rejected: a float literal in an
    instance file has already lost exactness upstream.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ValueError(f"refusing inexact float {value!r}; pass a string")
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def exact_str(x: Fraction) -> str:
    """Canonical exact form, e.g. '7261/3600' or '2'."""
    return str(x)


def decimal_str(x: Fraction, digits: int = 12) -> str:
    """Approximate decimal mirror for display; never used in computation."""
    return f"{float(x):.{digits}g}"
