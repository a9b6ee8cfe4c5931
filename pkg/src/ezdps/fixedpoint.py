"""Signed Q31.32 fixed-point numbers and their embedding into the field.

A FixedPoint stores a signed 64-bit integer `raw` read as raw / 2^32:
1 sign bit, 31 integer bits, 32 fractional bits. Negative values embed
into the field as p - |raw| (two's complement in the field), which makes
field addition of signed quantities homomorphic.

ExponentFixed is the narrower unsigned encoding used only for the
exponent argument of the RBF kernel: 20 fractional bits, excess
fractional bits truncated toward zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

FRAC_BITS = 32
SCALE = 1 << FRAC_BITS
RAW_LIMIT = 1 << 63  # |raw| must stay below this

EXP_FRAC_BITS = 20
EXP_SCALE = 1 << EXP_FRAC_BITS

Real = Union[int, float, Fraction, str]


class FxpRangeError(ValueError):
    pass


@dataclass(frozen=True)
class FixedPoint:
    raw: int

    def __post_init__(self):
        if abs(self.raw) >= RAW_LIMIT:
            raise FxpRangeError(f"raw value {self.raw} exceeds 63 bits")

    @staticmethod
    def encode(v: Real) -> "FixedPoint":
        """Round v to the nearest multiple of 2^-32 (half away from zero)."""
        f = Fraction(v)
        if abs(f) >= (1 << 31):
            raise FxpRangeError(f"value {v} out of Q31.32 range")
        scaled = f * SCALE
        if scaled >= 0:
            raw = int(scaled + Fraction(1, 2))
        else:
            raw = -int(-scaled + Fraction(1, 2))
        return FixedPoint(raw)

    def decode(self) -> Fraction:
        return Fraction(self.raw, SCALE)

    def to_float(self) -> float:
        return self.raw / SCALE

    def __add__(self, other: "FixedPoint") -> "FixedPoint":
        return FixedPoint(self.raw + other.raw)

    def __sub__(self, other: "FixedPoint") -> "FixedPoint":
        return FixedPoint(self.raw - other.raw)

    def __neg__(self) -> "FixedPoint":
        return FixedPoint(-self.raw)


ZERO = FixedPoint(0)
ONE = FixedPoint(SCALE)


def trunc_div_toward_zero(v: int, shift: int) -> int:
    """Drop `shift` low bits of |v|, keeping the sign (floor of magnitude)."""
    if v >= 0:
        return v >> shift
    return -((-v) >> shift)


def fxp_mul_rescale(a: FixedPoint, b: FixedPoint) -> FixedPoint:
    """Product with rescale: floor of magnitude of (a.raw * b.raw) / 2^32."""
    prod = a.raw * b.raw
    if abs(prod) >= 1 << 127:
        raise FxpRangeError("128-bit intermediate overflow in fixed-point multiply")
    raw = trunc_div_toward_zero(prod, FRAC_BITS)
    if abs(raw) >= RAW_LIMIT:
        raise FxpRangeError("fixed-point multiply result exceeds 63 bits")
    return FixedPoint(raw)


def raw_to_field(raw: int, modulus: int) -> int:
    """Signed raw integer -> canonical field residue (p - |raw| when negative)."""
    return raw % modulus


def fxp_to_field(f: FixedPoint, modulus: int) -> int:
    return f.raw % modulus


def field_to_signed(e: int, modulus: int, bound: int) -> int:
    """Signed value of a residue under the two's-complement-in-field
    embedding, for |value| < bound."""
    if 0 <= e < bound:
        return e
    if modulus - bound < e < modulus:
        return e - modulus
    raise FxpRangeError(f"field element {e} outside the signed range +-{bound}")


def field_to_raw(e: int, modulus: int) -> int:
    """Inverse of raw_to_field on the embedded range [0, 2^63) u (p - 2^63, p)."""
    return field_to_signed(e, modulus, RAW_LIMIT)


def field_to_fxp(e: int, modulus: int) -> FixedPoint:
    return FixedPoint(field_to_raw(e, modulus))


@dataclass(frozen=True)
class ExponentFixed:
    """Unsigned fixed-point with 20 fractional bits (RBF kernel exponent)."""

    raw: int

    def __post_init__(self):
        if self.raw < 0:
            raise FxpRangeError("exponent encoding is unsigned")

    @staticmethod
    def encode(v: Real) -> "ExponentFixed":
        f = Fraction(v)
        if f < 0:
            raise FxpRangeError("exponent encoding is unsigned")
        # excess fractional bits are truncated toward zero
        return ExponentFixed(int(f * EXP_SCALE))

    def decode(self) -> Fraction:
        return Fraction(self.raw, EXP_SCALE)


def fxp_sq64_to_exponent(raw_q64: int) -> ExponentFixed:
    """Q.64 nonnegative raw (e.g. a sum of squared Q.32 products) -> Q.20."""
    if raw_q64 < 0:
        raise FxpRangeError("squared-distance raw must be nonnegative")
    return ExponentFixed(raw_q64 >> (2 * FRAC_BITS - EXP_FRAC_BITS))
