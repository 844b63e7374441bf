"""Exact rational helpers shared by every module."""

from fractions import Fraction
from typing import Union

from recforge.errors import ParameterError

RationalLike = Union[int, float, str, Fraction]


def to_fraction(value: RationalLike) -> Fraction:
    """
    Convert to Fraction exactly.

    Floats go through their shortest decimal repr so 0.45 becomes 9/20,
    never the binary approximation. Strings may be "p/q" or decimals.
    """
    if isinstance(value, bool):
        raise ParameterError(f"Not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ParameterError(f"Cannot parse rational {value!r}: {e}") from e
    raise ParameterError(f"Not a rational: {value!r}")


def format_fraction(value: Fraction) -> str:
    """Serialize as "p/q" (integers keep the "/1" so the field type never varies)."""
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    if not isinstance(text, str) or "/" not in text:
        raise ParameterError(f"Expected 'p/q', got {text!r}")
    return to_fraction(text)


def require_open_half(delta: RationalLike, name: str = "delta") -> Fraction:
    """Validate 0 < delta < 1/2 and return it as a Fraction."""
    value = to_fraction(delta)
    if not (0 < value < Fraction(1, 2)):
        raise ParameterError(f"{name} must lie in the open interval (0, 1/2), got {value}")
    return value


def frac_mod1(value: Fraction) -> Fraction:
    """Reduce into [0, 1)."""
    return value - (value.numerator // value.denominator)


def circle_norm(value: Fraction) -> Fraction:
    """Distance from value to the nearest integer."""
    reduced = frac_mod1(value)
    return min(reduced, 1 - reduced)
