"""Exact arithmetic in the prime field Z_d (d an odd prime).

All basis labels, vector labels and measurement outcomes live here; no
floating point is ever involved.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass
from typing import Iterator, Union


class InvalidModulusError(ValueError):
    pass


class ModulusMismatchError(ValueError):
    pass


def is_odd_prime(d: int) -> bool:
    if not isinstance(d, int) or isinstance(d, bool) or d < 3 or d % 2 == 0:
        return False
    k = 3
    while k * k <= d:
        if d % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True, order=True)
class PrimeModulus:
    d: int

    def __post_init__(self):
        if not is_odd_prime(self.d):
            raise InvalidModulusError(f"d must be an odd prime, got {self.d!r}")

    def __call__(self, value: int) -> "FieldElem":
        return FieldElem(value, self)

    def __int__(self) -> int:
        return self.d

    def elements(self) -> Iterator["FieldElem"]:
        for k in range(self.d):
            yield FieldElem(k, self)

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(0, self)

    @property
    def one(self) -> "FieldElem":
        return FieldElem(1, self)


Operand = Union["FieldElem", int]


@dataclass(frozen=True, order=True)
class FieldElem:
    """Residue ``value`` mod ``modulus.d``; always stored reduced."""

    value: int
    modulus: PrimeModulus

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % self.modulus.d)

    @property
    def d(self) -> int:
        return self.modulus.d

    def _coerce(self, other: Operand) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.modulus != self.modulus:
                raise ModulusMismatchError(
                    f"cannot combine elements mod {self.d} and mod {other.d}"
                )
            return other
        if isinstance(other, numbers.Integral):
            return FieldElem(other, self.modulus)
        return NotImplemented

    def __add__(self, other: Operand) -> "FieldElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.value + o.value, self.modulus)

    __radd__ = __add__

    def __sub__(self, other: Operand) -> "FieldElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.value - o.value, self.modulus)

    def __rsub__(self, other: Operand) -> "FieldElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem(o.value - self.value, self.modulus)

    def __mul__(self, other: Operand) -> "FieldElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.value * o.value, self.modulus)

    __rmul__ = __mul__

    def __neg__(self) -> "FieldElem":
        return FieldElem(-self.value, self.modulus)

    def inv(self) -> "FieldElem":
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse mod {self.d}")
        # pow(.., -1, d) runs the extended Euclidean algorithm
        return FieldElem(pow(self.value, -1, self.d), self.modulus)

    def __truediv__(self, other: Operand) -> "FieldElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __rtruediv__(self, other: Operand) -> "FieldElem":
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inv()

    def __pow__(self, k: int) -> "FieldElem":
        if k < 0:
            return self.inv() ** (-k)
        return FieldElem(pow(self.value, k, self.d), self.modulus)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.d})"


def modulus(d: int | PrimeModulus) -> PrimeModulus:
    return d if isinstance(d, PrimeModulus) else PrimeModulus(d)


def add(a: FieldElem, b: FieldElem) -> FieldElem:
    return a + b


def sub(a: FieldElem, b: FieldElem) -> FieldElem:
    return a - b


def mul(a: FieldElem, b: FieldElem) -> FieldElem:
    return a * b


def neg(a: FieldElem) -> FieldElem:
    return -a


def inv(a: FieldElem) -> FieldElem:
    return a.inv()


def half(d: int | PrimeModulus) -> FieldElem:
    """The modular 1/2, i.e. (d+1)/2."""
    p = modulus(d)
    return FieldElem((p.d + 1) // 2, p)
