"""Exact rational parsing, canonical formatting and the sympy bridge."""

import math
from fractions import Fraction
from typing import Annotated, Any, Iterable, Sequence

import sympy
from pydantic import PlainSerializer, PlainValidator, WithJsonSchema

RATIONAL_PATTERN = r"^-?\d+(/\d+)?$"


def parse_rational(value: Any) -> Fraction:
    """Parses "p/q", "p", integers and fractions. Floats are refused."""
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        text = value.strip()
        try:
            numerator, slash, denominator = text.partition("/")
            if slash and not denominator.strip().isdigit():
                raise ValueError
            return Fraction(int(numerator), int(denominator) if denominator else 1)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not an exact rational: {value!r}") from None
    raise ValueError(f"expected a 'p/q' string or integer, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Canonical form: "p" for integers, "p/q" in lowest terms otherwise."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


Rational = Annotated[
    Fraction,
    PlainValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
    WithJsonSchema({"type": "string", "pattern": RATIONAL_PATTERN}),
]

RationalMatrix = tuple[tuple[Rational, ...], ...]
RationalVector = tuple[Rational, ...]


def is_integral(value: Fraction) -> bool:
    return value.denominator == 1


def all_integral(values: Iterable[Fraction]) -> bool:
    return all(v.denominator == 1 for v in values)


def common_denominator(values: Iterable[Fraction]) -> int:
    """Least common multiple of the denominators (1 for an empty input)."""
    return math.lcm(1, *(v.denominator for v in values))


def round_half_toward_zero(value: Fraction) -> int:
    """Nearest integer; exact half-integers go toward zero."""
    floor = math.floor(value)
    remainder = value - floor
    if remainder < Fraction(1, 2):
        return floor
    if remainder > Fraction(1, 2):
        return floor + 1
    return floor if value > 0 else floor + 1


def to_matrix(rows: Sequence[Sequence[Fraction]]) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in rows])


def from_matrix(matrix: sympy.Matrix) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(
        tuple(parse_rational(sympy.Rational(matrix[i, j])) for j in range(matrix.cols))
        for i in range(matrix.rows)
    )


def identity_rows(n: int) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
