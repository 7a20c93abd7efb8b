"""The d+1 mutually unbiased bases of one qudit and the operators Z, X, K_b.

Basis labels follow the usual prime-dimension construction: the
computational basis plus d "shifted" bases b = 0..d-1 whose vectors are

    |m; b> = d**-1/2 sum_n omega**((b/2) n (n-1) - m n) |n>

with the exponent evaluated in Z_d.  b = 0 is the Fourier basis (the
eigenbasis of the shift X).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .qstate import omega_power, orthonormality_residual, roots_of_unity
from .zmod import FieldElem, PrimeModulus, half, modulus


@dataclass(frozen=True)
class Computational:
    """The eigenbasis of Z (often written with a double-dot zero)."""

    def __str__(self) -> str:
        return "comp"


@dataclass(frozen=True)
class Shifted:
    b: FieldElem

    def __str__(self) -> str:
        return str(self.b.value)


BasisLabel = Union[Computational, Shifted]
COMPUTATIONAL = Computational()


@dataclass(frozen=True)
class MubIndex:
    basis: BasisLabel
    m: FieldElem


def basis_labels(d: int | PrimeModulus) -> list[BasisLabel]:
    """All d+1 basis labels, computational first."""
    return list(_basis_labels(modulus(d).d))


@lru_cache(maxsize=None)
def _basis_labels(d: int) -> tuple[BasisLabel, ...]:
    return (COMPUTATIONAL,) + tuple(Shifted(b) for b in PrimeModulus(d).elements())


def parse_basis_label(d: int | PrimeModulus, text: str | int) -> BasisLabel:
    """'comp' (or 'c') for the computational basis, otherwise an integer b."""
    p = modulus(d)
    if isinstance(text, str) and text.strip().lower() in {"c", "comp", "computational"}:
        return COMPUTATIONAL
    return Shifted(p(int(text)))


def shifted_exponents(d: int | PrimeModulus, b: FieldElem, m: FieldElem) -> list[int]:
    """Exponents (b/2) n (n-1) - m n in Z_d for n = 0..d-1."""
    p = modulus(d)
    h = half(p)
    return [(h * b * (n * (n - 1)) - m * n).value for n in range(p.d)]


def z_op(d: int) -> np.ndarray:
    return np.diag(roots_of_unity(d)).astype(complex)


def x_op(d: int) -> np.ndarray:
    """Cyclic shift X|n> = |n+1 mod d>."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def mub_vector(d: int | PrimeModulus, idx: MubIndex) -> np.ndarray:
    p = modulus(d)
    if isinstance(idx.basis, Computational):
        v = np.zeros(p.d, dtype=complex)
        v[idx.m.value] = 1.0
        return v
    return omega_power(p.d, shifted_exponents(p, idx.basis.b, idx.m)) / np.sqrt(p.d)


@lru_cache(maxsize=None)
def _basis_matrix(d: int, label: BasisLabel) -> np.ndarray:
    p = PrimeModulus(d)
    B = np.stack([mub_vector(p, MubIndex(label, m)) for m in p.elements()])
    B.setflags(write=False)
    return B


def mub_basis(d: int | PrimeModulus, basis: BasisLabel) -> np.ndarray:
    """The d vectors of one basis as rows (row m is |m; b>)."""
    return _basis_matrix(modulus(d).d, basis)


def k_op(d: int | PrimeModulus, basis: BasisLabel) -> np.ndarray:
    """K_b = sum_m |m;b> omega**m <m;b|."""
    p = modulus(d)
    B = mub_basis(p, basis)
    return B.T @ np.diag(roots_of_unity(p.d)) @ B.conj()


@dataclass
class UnbiasednessReport:
    d: int
    basis_pairs: int
    vector_pairs: int
    max_deviation: float
    max_orthonormality_residual: float
    max_spectral_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.max_deviation, self.max_orthonormality_residual,
                   self.max_spectral_residual)


def unbiasedness_report(d: int | PrimeModulus) -> UnbiasednessReport:
    """Exhaustive overlap check over every pair of distinct bases.

    Alongside the unbiasedness deviation max | |<u|v>|**2 - 1/d |, records
    each basis's orthonormality defect and the residual of
    K_b |m;b> = omega**m |m;b>.
    """
    p = modulus(d)
    labels = basis_labels(p)
    mats = {lab: mub_basis(p, lab) for lab in labels}
    max_dev = 0.0
    basis_pairs = vector_pairs = 0
    for a, b in itertools.combinations(labels, 2):
        overlaps = np.abs(mats[a].conj() @ mats[b].T) ** 2
        max_dev = max(max_dev, float(np.abs(overlaps - 1.0 / p.d).max()))
        basis_pairs += 1
        vector_pairs += overlaps.size
    ortho = max(orthonormality_residual(m) for m in mats.values())
    roots = roots_of_unity(p.d)
    spectral = 0.0
    for lab, B in mats.items():
        K = k_op(p, lab)
        # rows: K |m;b> - omega**m |m;b>
        resid = (K @ B.T).T - roots[:, None] * B
        spectral = max(spectral, float(np.abs(resid).max()))
    return UnbiasednessReport(p.d, basis_pairs, vector_pairs, max_dev, ortho, spectral)
