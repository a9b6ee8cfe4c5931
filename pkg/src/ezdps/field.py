"""Prime-field scalar arithmetic over a configurable modulus.

The default modulus is the order of the ristretto255 scalar group, a
252-bit prime giving >= 128-bit security. The modulus is a construction
parameter so another large prime can be swapped in without code changes.
"""

from __future__ import annotations

from dataclasses import dataclass

# Order of the ristretto255 / curve25519 scalar group.
RISTRETTO_ORDER = 2**252 + 27742317777372353535851937790883648493


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class FieldElement:
    """Canonical residue in [0, modulus)."""

    value: int
    modulus: int = RISTRETTO_ORDER

    def __post_init__(self):
        if not (0 <= self.value < self.modulus):
            object.__setattr__(self, "value", self.value % self.modulus)

    def _check(self, other: "FieldElement"):
        if self.modulus != other.modulus:
            raise FieldError("mixed moduli in field operation")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value + other.value) % self.modulus, self.modulus)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value - other.value) % self.modulus, self.modulus)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement((self.value * other.value) % self.modulus, self.modulus)

    def __neg__(self) -> "FieldElement":
        return FieldElement(-self.value % self.modulus, self.modulus)

    def inv(self) -> "FieldElement":
        if self.value == 0:
            raise FieldError("inversion of zero")
        return FieldElement(pow(self.value, -1, self.modulus), self.modulus)

    def __pow__(self, e: int) -> "FieldElement":
        if e < 0:
            return self.inv() ** (-e)
        return FieldElement(pow(self.value, e, self.modulus), self.modulus)

    def __int__(self) -> int:
        return self.value

    def is_zero(self) -> bool:
        return self.value == 0


def fe(v: int, modulus: int = RISTRETTO_ORDER) -> FieldElement:
    return FieldElement(v % modulus, modulus)
