"""Collective (centre-of-mass / relative) coordinates for two qudits.

|n1>|n2>  <->  |nc>|nr>   with  nc = (n1+n2)/2, nr = (n1-n2)/2  (mod d).

Two maximally entangled bases are built from these coordinates:

* family A: |mdd>_c (x) |2 m0; 0>_r   (c computational, r Fourier)
* family B: |mdd>_r (x) |2 m0; 0>_c   (c and r interchanged)

Outcomes of the control measurements are labelled by (mdd, m0); the factor
2 in front of m0 is a relabelling because 2 is invertible mod odd d.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .mub import x_op, z_op
from .qstate import matrix_power_mod, omega_power
from .zmod import FieldElem, PrimeModulus, half, modulus


class MesFamily(enum.Enum):
    A = "a"
    B = "b"

    @property
    def conjugate(self) -> "MesFamily":
        return MesFamily.B if self is MesFamily.A else MesFamily.A

    @classmethod
    def parse(cls, text: "str | MesFamily") -> "MesFamily":
        if isinstance(text, MesFamily):
            return text
        return cls(text.strip().lower())


@dataclass(frozen=True)
class PairIndex:
    n1: FieldElem
    n2: FieldElem


@dataclass(frozen=True)
class CollectiveIndex:
    nc: FieldElem
    nr: FieldElem


@dataclass(frozen=True)
class MesLabel:
    family: MesFamily
    mdd: FieldElem
    m0: FieldElem

    @classmethod
    def of(cls, d: int | PrimeModulus, family: "MesFamily | str", mdd: int, m0: int) -> "MesLabel":
        p = modulus(d)
        return cls(MesFamily.parse(family), p(mdd), p(m0))

    @property
    def key(self) -> tuple[int, int]:
        return self.mdd.value, self.m0.value

    def __str__(self) -> str:
        return f"{self.family.value.upper()}({self.mdd.value},{self.m0.value})"


def to_collective(p: PairIndex) -> CollectiveIndex:
    h = half(p.n1.modulus)
    return CollectiveIndex(h * (p.n1 + p.n2), h * (p.n1 - p.n2))


def to_pair(c: CollectiveIndex) -> PairIndex:
    return PairIndex(c.nc + c.nr, c.nc - c.nr)


class CollectiveOps(NamedTuple):
    zc: np.ndarray
    zr: np.ndarray
    xc: np.ndarray
    xr: np.ndarray


def collective_ops(d: int) -> CollectiveOps:
    """Zc = Z^(1/2) (x) Z^(1/2), Zr = Z^(1/2) (x) Z^(-1/2), Xc = X (x) X, Xr = X (x) X^-1."""
    h = half(d).value
    Z, X = z_op(d), x_op(d)
    zh = matrix_power_mod(Z, h, d)
    zmh = matrix_power_mod(Z, -h, d)
    xinv = matrix_power_mod(X, -1, d)
    return CollectiveOps(np.kron(zh, zh), np.kron(zh, zmh), np.kron(X, X), np.kron(X, xinv))


def mes_state(d: int | PrimeModulus, label: MesLabel) -> np.ndarray:
    """Expand a collective product state into the |n1>|n2> basis.

    family A:  d**-1/2 sum_n omega**(-2 m0 n) |mdd+n>_1 |mdd-n>_2
    family B:  d**-1/2 sum_n omega**(-2 m0 n) |n+mdd>_1 |n-mdd>_2
    """
    p = modulus(d)
    n = np.arange(p.d)
    mdd, m0 = label.mdd.value, label.m0.value
    amps = omega_power(p.d, -2 * m0 * n) / np.sqrt(p.d)
    if label.family is MesFamily.A:
        # |mdd>_c |n>_r
        n1, n2 = (mdd + n) % p.d, (mdd - n) % p.d
    else:
        # |n>_c |mdd>_r
        n1, n2 = (n + mdd) % p.d, (n - mdd) % p.d
    s = np.zeros(p.d * p.d, dtype=complex)
    s[n1 * p.d + n2] = amps
    return s


def mes_labels(d: int | PrimeModulus, family: MesFamily) -> list[MesLabel]:
    p = modulus(d)
    return [MesLabel(family, a, b) for a in p.elements() for b in p.elements()]


@lru_cache(maxsize=None)
def _gamma(d: int, family: MesFamily) -> tuple[tuple[MesLabel, ...], np.ndarray]:
    labels = tuple(mes_labels(d, family))
    B = np.stack([mes_state(d, lab) for lab in labels])
    B.setflags(write=False)
    return labels, B


def gamma_basis(d: int | PrimeModulus, family: MesFamily) -> list[tuple[MesLabel, np.ndarray]]:
    """The control-measurement basis (Gamma^a for A, Gamma^b for B) as (label, state) pairs."""
    labels, B = _gamma(modulus(d).d, MesFamily.parse(family))
    return list(zip(labels, B))


def gamma_matrix(d: int | PrimeModulus, family: MesFamily) -> tuple[tuple[MesLabel, ...], np.ndarray]:
    """Same basis as ``gamma_basis`` with states stacked as rows (row k is labels[k])."""
    return _gamma(modulus(d).d, MesFamily.parse(family))


def label_index(label: MesLabel) -> int:
    """Row of ``label`` in ``gamma_matrix``."""
    return label.mdd.value * label.mdd.d + label.m0.value
