"""Brute-force cross-checks from raw amplitudes.

Nothing here calls the modular inference in ``protocol``; supports are read
off amplitude magnitudes with full d**2 x d**2 projectors, one overlap at a
time.  ``cross_validate`` is the single place where the two routes meet.
"""
from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .collective import MesFamily, MesLabel, gamma_basis, mes_labels, mes_state
from .mub import BasisLabel, Computational, Shifted, basis_labels
from .protocol import (
    SUPPORT_THRESHOLD,
    ControlOutcome,
    ImpossibleOutcomeError,
    Undetermined,
    UrmRecord,
    infer_basis,
    infer_outcome,
    is_correct,
    predicted_support,
)
from .zmod import FieldElem, PrimeModulus, half, modulus


def particle_vector(d: int, basis: BasisLabel, m: int) -> np.ndarray:
    """|m; b> evaluated term by term (independent of ``mub.mub_vector``)."""
    v = np.zeros(d, dtype=complex)
    if isinstance(basis, Computational):
        v[m % d] = 1.0
        return v
    b = basis.b.value
    h = (d + 1) // 2
    for n in range(d):
        e = (h * b * n * (n - 1) - m * n) % d
        v[n] = cmath.exp(2j * math.pi * e / d) / math.sqrt(d)
    return v


def urm_projector(d: int, basis: BasisLabel, m: int) -> np.ndarray:
    v = particle_vector(d, basis, m)
    return np.kron(np.outer(v, v.conj()), np.eye(d))


@dataclass
class SupportSet:
    prepared: MesLabel
    basis: BasisLabel
    m: FieldElem
    family: MesFamily
    outcomes: list[tuple[ControlOutcome, float]]

    @property
    def keys(self) -> frozenset[tuple[int, int]]:
        return frozenset(o.key for o, _ in self.outcomes)

    @property
    def total_probability(self) -> float:
        return sum(p for _, p in self.outcomes)


def enumerate_support(d: int | PrimeModulus, prepared: MesLabel, basis: BasisLabel | None,
                      m: FieldElem | int | None, family: MesFamily) -> SupportSet:
    """Control outcomes with non-vanishing probability after Bob's projection.

    ``basis=None`` skips the URM entirely (the no-measurement baseline).
    """
    p = modulus(d)
    family = MesFamily.parse(family)
    state = mes_state(p, prepared)
    if basis is not None:
        P = urm_projector(p.d, basis, int(m))
        state = P @ state
        prob = float(np.vdot(state, state).real)
        if prob < SUPPORT_THRESHOLD:
            raise ImpossibleOutcomeError(f"b={basis} m={int(m)} has probability {prob:.3g}")
        state = state / math.sqrt(prob)
    outcomes = []
    for label, gamma in gamma_basis(p, family):
        prob = float(abs(np.vdot(gamma, state)) ** 2)
        if prob > SUPPORT_THRESHOLD:
            outcomes.append((ControlOutcome.from_label(label), prob))
    mm = None if m is None else p(int(m))
    return SupportSet(prepared, basis, mm, family, outcomes)


def closed_form_post_state(d: int | PrimeModulus, prepared: MesLabel, b: Shifted, m: FieldElem | int,
                           *, shift: int = 0) -> np.ndarray:
    """|m;b>_1 |-m'';-b>_2 with m'' = 2(m0 + b mdd - b/2) - m (+ ``shift``)."""
    p = modulus(d)
    bb = b.b
    m = p(int(m))
    mpp = 2 * (prepared.m0 + bb * prepared.mdd - bb * half(p)) - m + shift
    v1 = particle_vector(p.d, b, m.value)
    v2 = particle_vector(p.d, Shifted(-bb), (-mpp).value)
    return np.kron(v1, v2)


def simulated_post_state(d: int | PrimeModulus, prepared: MesLabel, basis: BasisLabel,
                         m: FieldElem | int) -> np.ndarray:
    p = modulus(d)
    s = urm_projector(p.d, basis, int(m)) @ mes_state(p, prepared)
    return s / np.linalg.norm(s)


def check_post_state_form(d: int | PrimeModulus, prepared: MesLabel, b: Shifted,
                          m: FieldElem | int) -> float:
    """1 - |<closed form|simulated>| for a family-A preparation and shifted b."""
    if prepared.family is not MesFamily.A:
        raise ValueError("the closed form is stated for family-A preparations")
    sim = simulated_post_state(d, prepared, b, m)
    return 1.0 - abs(np.vdot(closed_form_post_state(d, prepared, b, m), sim))


@dataclass
class ValidationReport:
    d: int
    cases: int = 0
    support_total: int = 0
    mismatches: list[dict] = field(default_factory=list)
    inference_disagreements: int = 0
    support_size_violations: int = 0
    max_residual: float = 0.0
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.mismatches and self.inference_disagreements == 0 \
            and self.support_size_violations == 0

    def counts(self) -> dict:
        return {
            "cases_total": self.cases,
            "support_total": self.support_total,
            "mismatches": len(self.mismatches),
            "inference_disagreements": self.inference_disagreements,
            "support_size_violations": self.support_size_violations,
        }


# (prepared family, control family) combinations checked by cross_validate
PAIRINGS = ((MesFamily.A, MesFamily.A), (MesFamily.A, MesFamily.B), (MesFamily.B, MesFamily.B))


def cross_validate(d: int | PrimeModulus) -> ValidationReport:
    """Quantum-enumerated supports vs the modular predictions, case by case.

    Also checks that protocol inference is right on every supported outcome
    and that each support has exactly d outcomes of probability 1/d.
    """
    p = modulus(d)
    rep = ValidationReport(p.d)
    t0 = time.perf_counter()
    for prep_family, family in PAIRINGS:
        for prepared in mes_labels(p, prep_family):
            for basis in basis_labels(p):
                for m in p.elements():
                    sup = enumerate_support(p, prepared, basis, m, family)
                    record = UrmRecord(basis, m)
                    rep.cases += 1
                    rep.support_total += len(sup.outcomes)
                    rep.max_residual = max(rep.max_residual, abs(sup.total_probability - 1.0),
                                           *(abs(q - 1.0 / p.d) for _, q in sup.outcomes))
                    predicted = predicted_support(prepared, record, family)
                    if sup.keys != predicted:
                        rep.mismatches.append({
                            "prepared": str(prepared), "basis": str(basis), "m": m.value,
                            "family": family.value,
                            "quantum": sorted(sup.keys), "predicted": sorted(predicted),
                        })
                    if len(sup.outcomes) != p.d:
                        rep.support_size_violations += 1
                    for outcome, _ in sup.outcomes:
                        if not _inference_agrees(prepared, record, outcome):
                            rep.inference_disagreements += 1
    rep.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return rep


def _inference_agrees(prepared: MesLabel, record: UrmRecord, outcome: ControlOutcome) -> bool:
    if outcome.family is prepared.family:
        verdict = infer_basis(prepared, outcome)
        return isinstance(verdict, Undetermined) or is_correct(verdict, record.basis)
    if isinstance(record.basis, Computational):
        return True
    return infer_outcome(prepared, outcome, record.basis) == record.m
