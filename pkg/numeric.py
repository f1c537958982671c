"""
Dual arithmetic mode: exact rationals (fractions.Fraction) or 64-bit floats.

A problem is exact when every coefficient is a Fraction. Integers are
promoted to Fractions on construction, so mixing in a float switches the
whole computation to float mode.
"""

import logging
import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]


def parse_number(value, exact: bool = True) -> Number:
    """Parse an int, float, numeric string or "p/q" string into the requested mode."""
    if isinstance(value, bool):
        raise TypeError(f"Boolean is not a valid coefficient: {value!r}")
    if isinstance(value, Fraction):
        return value if exact else float(value)
    if isinstance(value, int):
        return Fraction(value) if exact else float(value)
    if isinstance(value, float):
        # Decimal reading: "0.1" in a JSON file means one tenth, not its binary neighbour.
        return Fraction(repr(value)) if exact else value
    if isinstance(value, str):
        text = value.strip()
        try:
            parsed = Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Cannot parse numeric value {value!r}: {e}") from e
        return parsed if exact else float(parsed)
    raise TypeError(f"Unsupported numeric type {type(value).__name__}: {value!r}")


def normalize(value) -> Number:
    """Promote ints to Fractions and leave Fractions and floats untouched."""
    if isinstance(value, bool):
        raise TypeError(f"Boolean is not a valid coefficient: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    # numpy scalars and similar
    if hasattr(value, "item"):
        return normalize(value.item())
    raise TypeError(f"Unsupported numeric type {type(value).__name__}: {value!r}")


def is_exact(values: Iterable) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def sgn(value) -> int:
    """Sign with sgn(0) = +1."""
    return -1 if value < 0 else 1


def to_json_number(value):
    """Render a Fraction as int or "p/q"; floats pass through."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return value.numerator
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def scale_to_integers(values: List[Number]) -> Optional[Tuple[List[int], int]]:
    """
    Multiply exact values by their common denominator.

    Returns (integers, denominator), or None when any value is a float.
    """
    if not is_exact(values):
        return None
    denominator = 1
    for v in values:
        denominator = math.lcm(denominator, v.denominator)
    return [int(v * denominator) for v in values], denominator


INT64_HEADROOM = 1 << 62


def integer_array(integers: Sequence[int], terms: int) -> np.ndarray:
    """
    Array for scaled exact coefficients.

    int64 when any sum of `terms` entries stays below 2^62 in magnitude,
    otherwise an object array of Python ints (slower, never wraps).
    """
    largest = max((abs(v) for v in integers), default=0)
    if largest * (terms + 1) < INT64_HEADROOM:
        return np.asarray(integers, dtype=np.int64)
    logger.debug(f"Scaled coefficients reach {largest}; evaluating with Python integers")
    array = np.empty(len(integers), dtype=object)
    array[:] = [int(v) for v in integers]
    return array


def numbers_equal(a: Number, b: Number, rel_tol: float = 1e-12) -> bool:
    """Exact equality for rationals, relative tolerance once a float is involved."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return math.isclose(float(a), float(b), rel_tol=rel_tol, abs_tol=rel_tol)


def divide(value: Number, count: int) -> Number:
    if isinstance(value, Fraction):
        return value / count
    return float(value) / count
