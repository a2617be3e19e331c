import math
from fractions import Fraction
from numbers import Rational

Rat = Fraction | int | str

MAX_DECIMALS = 12


def as_fraction(value: "Rat | float | Rational") -> Fraction:
    """Exact rational from an int, a Fraction, "0.7", "3/4" or a float.

    Floats go through their shortest repr, so 0.1 becomes 1/10 rather than
    the binary value closest to it.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"{value} is not finite")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())

    return Fraction(value)


def format_fraction(value: Fraction) -> str:
    """"n/d" form, or the plain integer when the denominator is 1."""
    if value.denominator == 1:
        return str(value.numerator)

    return f"{value.numerator}/{value.denominator}"


def format_number(value: Fraction | float | int | None) -> str:
    """Decimal text for reports, always with a '.' separator."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)

    number = float(value)
    if not math.isfinite(number):
        return repr(number)

    return f"{number:.{MAX_DECIMALS}g}"


def ceil_fraction(value: Fraction) -> int:
    return -((-value.numerator) // value.denominator)


def floor_fraction(value: Fraction) -> int:
    return value.numerator // value.denominator

