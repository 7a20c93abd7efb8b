"""Unrecorded-measurement (URM) episodes and the modular retrieval rules.

An episode: Alice prepares a maximally entangled label (mdd, m0); Bob
measures K_b on particle 1 and keeps (b, m) to himself; Alice measures the
pair in one of the two MES bases and gets (mdd', m0').

Protocol A (control in the prepared family) pins down the basis:

    m0' + b mdd' = m0 + b mdd   =>   b = (m0 - m0') / (mdd' - mdd)

Protocol B (control in the conjugate family) ties the outcome to the basis:

    m = (m0 + m0') + b (mdd + mdd') - b/2

All inference below is exact Z_d arithmetic.  The numerics only decide which
control outcomes can occur.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .collective import MesFamily, MesLabel, gamma_matrix, label_index, mes_labels
from .mub import COMPUTATIONAL, BasisLabel, Computational, Shifted, basis_labels, mub_basis
from .qstate import make_rng, project_particle1, sample_index
from .zmod import FieldElem, PrimeModulus, half, modulus

# Born probabilities at or below this count as exact zeros
SUPPORT_THRESHOLD = 1e-12


class ImpossibleOutcomeError(ValueError):
    pass


@dataclass(frozen=True)
class UrmRecord:
    """Bob's hidden data."""

    basis: BasisLabel
    m: FieldElem

    def __str__(self) -> str:
        return f"b={self.basis} m={self.m.value}"


@dataclass(frozen=True)
class ControlOutcome:
    family: MesFamily
    mdd_p: FieldElem
    m0_p: FieldElem

    @classmethod
    def from_label(cls, label: MesLabel) -> "ControlOutcome":
        return cls(label.family, label.mdd, label.m0)

    @property
    def key(self) -> tuple[int, int]:
        return self.mdd_p.value, self.m0_p.value

    def __str__(self) -> str:
        return f"{self.family.value.upper()}({self.mdd_p.value},{self.m0_p.value})"


@dataclass(frozen=True)
class ShiftedBasis:
    b: FieldElem

    def __str__(self) -> str:
        return f"basis b={self.b.value}"


@dataclass(frozen=True)
class ComputationalBasis:
    def __str__(self) -> str:
        return "computational basis"


@dataclass(frozen=True)
class Undetermined:
    def __str__(self) -> str:
        return "undetermined"


InferenceResult = Union[ShiftedBasis, ComputationalBasis, Undetermined]


def is_correct(result: InferenceResult, basis: BasisLabel) -> bool:
    """True when a definite verdict names ``basis``; Undetermined is never correct."""
    if isinstance(result, ShiftedBasis):
        return isinstance(basis, Shifted) and basis.b == result.b
    if isinstance(result, ComputationalBasis):
        return isinstance(basis, Computational)
    return False


# ---------------------------------------------------------------------------
# simulation


def urm_outcome_probabilities(d: int | PrimeModulus, state: np.ndarray,
                              basis: BasisLabel) -> np.ndarray:
    """Probability of each of Bob's outcomes m when measuring K_b on particle 1."""
    p = modulus(d)
    amps = mub_basis(p, basis).conj() @ state.reshape(p.d, p.d)
    return (np.abs(amps) ** 2).sum(axis=1)


def apply_urm(d: int | PrimeModulus, state: np.ndarray,
              hidden: UrmRecord | int | np.random.Generator | None = None,
              *, basis: BasisLabel | None = None) -> tuple[np.ndarray, UrmRecord]:
    """Bob measures K_b on particle 1 of ``state``.

    ``hidden`` is either an explicit record (enumeration mode: that projection
    is applied) or a seed/generator (Bob's m is Born-sampled; b is ``basis``
    if given, else drawn uniformly from the d+1 bases).
    """
    p = modulus(d)
    if isinstance(hidden, UrmRecord):
        record = hidden
    else:
        rng = make_rng(hidden)
        if basis is None:
            labels = basis_labels(p)
            basis = labels[int(rng.integers(len(labels)))]
        probs = urm_outcome_probabilities(p, state, basis)
        record = UrmRecord(basis, p(sample_index(probs, rng)))
    v = mub_basis(p, record.basis)[record.m.value]
    prob, post = project_particle1(state, v)
    if prob < SUPPORT_THRESHOLD:
        raise ImpossibleOutcomeError(f"outcome {record} has probability {prob:.3g}")
    return post / np.sqrt(prob), record


def run_urm(d: int | PrimeModulus, prepared: MesLabel,
            hidden: UrmRecord | int | np.random.Generator | None = None,
            *, basis: BasisLabel | None = None) -> tuple[np.ndarray, UrmRecord]:
    """Prepare ``prepared``, then ``apply_urm``; returns the normalized post state and Bob's record."""
    p = modulus(d)
    state = gamma_matrix(p, prepared.family)[1][label_index(prepared)]
    return apply_urm(p, state, hidden, basis=basis)


def control_distribution(state: np.ndarray, family: MesFamily) -> tuple[tuple[MesLabel, ...], np.ndarray]:
    """Born probabilities of every control outcome, aligned with the family's labels."""
    labels, G = gamma_matrix(math.isqrt(len(state)), family)
    return labels, np.abs(G.conj() @ state) ** 2


def control_measure(state: np.ndarray, family: MesFamily | str,
                    seed: int | np.random.Generator | None) -> ControlOutcome:
    labels, probs = control_distribution(state, MesFamily.parse(family))
    k = sample_index(probs, make_rng(seed))
    return ControlOutcome.from_label(labels[k])


@dataclass(frozen=True)
class Episode:
    prepared: MesLabel
    hidden: UrmRecord
    outcome: ControlOutcome


def sample_episodes(d: int | PrimeModulus, prepared: MesLabel, family: MesFamily | str,
                    trials: int, seed: int, *, basis: BasisLabel | None = None) -> list[Episode]:
    """``trials`` independent episodes driven by one seeded generator."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = modulus(d)
    family = MesFamily.parse(family)
    rng = make_rng(seed)
    out = []
    for _ in range(trials):
        state, record = run_urm(p, prepared, rng, basis=basis)
        out.append(Episode(prepared, record, control_measure(state, family, rng)))
    return out


# ---------------------------------------------------------------------------
# exact inference


def _prepared_pair(prepared: MesLabel | tuple) -> tuple[FieldElem, FieldElem]:
    if isinstance(prepared, MesLabel):
        return prepared.mdd, prepared.m0
    mdd, m0 = prepared
    return mdd, m0


def infer_basis(prepared: MesLabel | tuple, outcome: ControlOutcome) -> InferenceResult:
    """Protocol A: recover Bob's basis from a control outcome in the prepared family."""
    if isinstance(prepared, MesLabel) and prepared.family is not outcome.family:
        raise ValueError("protocol A needs the control outcome in the prepared family")
    mdd, m0 = _prepared_pair(prepared)
    if outcome.mdd_p != mdd:
        return ShiftedBasis((m0 - outcome.m0_p) / (outcome.mdd_p - mdd))
    if outcome.m0_p != m0:
        return ComputationalBasis()
    return Undetermined()


def infer_outcome(prepared: MesLabel | tuple, outcome: ControlOutcome, b: BasisLabel) -> FieldElem:
    """Protocol B: Bob's outcome m given his (shifted) basis b."""
    if isinstance(b, Computational):
        raise ValueError("the outcome rule applies to shifted bases only")
    if isinstance(prepared, MesLabel) and prepared.family is outcome.family:
        raise ValueError("protocol B needs the control outcome in the conjugate family")
    mdd, m0 = _prepared_pair(prepared)
    return (m0 + outcome.m0_p) + b.b * (mdd + outcome.mdd_p) - b.b * half(mdd.modulus)


def predicted_support(prepared: MesLabel, record: UrmRecord,
                      family: MesFamily) -> frozenset[tuple[int, int]]:
    """Control outcomes (mdd', m0') allowed by the modular constraints.

    Supported combinations: control in the prepared family (either family),
    or prepared A with control B.
    """
    p = prepared.mdd.modulus
    mdd, m0, m = prepared.mdd, prepared.m0, record.m
    same = family is prepared.family
    if not same and prepared.family is not MesFamily.A:
        raise ValueError("conjugate-family prediction is implemented for prepared family A")
    out = set()
    for x in p.elements():
        if isinstance(record.basis, Computational):
            # Bob's |m> fixes the collective coordinate shared with the prepared label
            if same:
                out.update((mdd.value, y.value) for y in p.elements())
                break
            out.add(((m - mdd).value, x.value))
            continue
        b = record.basis.b
        if same:
            # m0' + b mdd' = m0 + b mdd
            out.add((x.value, (m0 + b * mdd - b * x).value))
        else:
            # m - 2(m0' + b mdd') = 2(m0 + b mdd - b/2) - m
            out.add((x.value, (m - m0 - b * mdd + b * half(p) - b * x).value))
    return frozenset(out)


def constraint_holds(prepared: MesLabel, record: UrmRecord, outcome: ControlOutcome) -> bool:
    return outcome.key in predicted_support(prepared, record, outcome.family)


# ---------------------------------------------------------------------------
# exhaustive sweeps


@dataclass
class SweepReport:
    protocol: str
    d: int
    cases_total: int = 0
    support_total: int = 0
    correct_definite: int = 0
    undetermined: int = 0
    wrong_definite: int = 0
    constraint_violations: int = 0
    max_residual: float = 0.0
    elapsed_ms: float = 0.0
    extras: dict = field(default_factory=dict)

    def counts(self) -> dict:
        return {
            "cases_total": self.cases_total,
            "support_total": self.support_total,
            "correct_definite": self.correct_definite,
            "undetermined": self.undetermined,
            "wrong_definite": self.wrong_definite,
            "constraint_violations": self.constraint_violations,
        }

    @property
    def passed(self) -> bool:
        return (self.wrong_definite == 0 and self.constraint_violations == 0
                and self.extras.get("completeness_violations", 0) == 0)


def _cases(p: PrimeModulus):
    for prepared in mes_labels(p, MesFamily.A):
        for basis in basis_labels(p):
            for m in p.elements():
                yield prepared, UrmRecord(basis, m)


def _support(state: np.ndarray, family: MesFamily):
    labels, probs = control_distribution(state, family)
    idx = np.nonzero(probs > SUPPORT_THRESHOLD)[0]
    resid = abs(float(probs.sum()) - 1.0)
    return [(ControlOutcome.from_label(labels[k]), float(probs[k])) for k in idx], resid


def sweep_protocol_a(d: int | PrimeModulus) -> SweepReport:
    """Every prepared A label, every (b, m); control in family A; infer the basis."""
    p = modulus(d)
    rep = SweepReport("a", p.d)
    completeness_violations = comp_misnamed = 0
    comp_mass = np.zeros(p.d)
    comp_cases = 0
    t0 = time.perf_counter()
    for prepared, record in _cases(p):
        state, _ = run_urm(p, prepared, record)
        support, resid = _support(state, MesFamily.A)
        rep.cases_total += 1
        rep.support_total += len(support)
        rep.max_residual = max(rep.max_residual, resid)
        allowed = predicted_support(prepared, record, MesFamily.A)
        n_correct = n_undetermined = 0
        for outcome, prob in support:
            rep.max_residual = max(rep.max_residual, abs(prob - 1.0 / p.d))
            verdict = infer_basis(prepared, outcome)
            if isinstance(verdict, Undetermined):
                n_undetermined += 1
            elif is_correct(verdict, record.basis):
                n_correct += 1
            else:
                rep.wrong_definite += 1
                if isinstance(record.basis, Computational):
                    comp_misnamed += 1
            if outcome.key not in allowed:
                rep.constraint_violations += 1
            if isinstance(record.basis, Computational):
                comp_mass[(outcome.m0_p - prepared.m0).value] += prob
        rep.correct_definite += n_correct
        rep.undetermined += n_undetermined
        if isinstance(record.basis, Shifted):
            if not (len(support) == p.d and n_undetermined == 1 and n_correct == p.d - 1):
                completeness_violations += 1
        else:
            comp_cases += 1
    rep.elapsed_ms = (time.perf_counter() - t0) * 1e3
    rep.extras["completeness_violations"] = completeness_violations
    rep.extras["computational_misnamed"] = comp_misnamed
    # descriptive only: how computational-basis URMs spread over m0' - m0
    rep.extras["computational_m0_shift_distribution"] = (comp_mass / max(comp_cases, 1)).tolist()
    return rep


def sweep_protocol_b(d: int | PrimeModulus) -> SweepReport:
    """Every prepared A label, every (b, m); control in family B; infer m from b.

    Computational-basis URMs are counted as ``undetermined`` (the outcome rule
    does not cover them); whether m = mdd + mdd' holds there is recorded in
    ``extras`` without being asserted.
    """
    p = modulus(d)
    rep = SweepReport("b", p.d)
    comp_hits = comp_total = 0
    t0 = time.perf_counter()
    for prepared, record in _cases(p):
        state, _ = run_urm(p, prepared, record)
        support, resid = _support(state, MesFamily.B)
        rep.cases_total += 1
        rep.support_total += len(support)
        rep.max_residual = max(rep.max_residual, resid)
        allowed = predicted_support(prepared, record, MesFamily.B)
        for outcome, prob in support:
            rep.max_residual = max(rep.max_residual, abs(prob - 1.0 / p.d))
            if isinstance(record.basis, Computational):
                rep.undetermined += 1
                comp_total += 1
                comp_hits += (prepared.mdd + outcome.mdd_p) == record.m
                continue
            if infer_outcome(prepared, outcome, record.basis) == record.m:
                rep.correct_definite += 1
            else:
                rep.wrong_definite += 1
            if outcome.key not in allowed:
                rep.constraint_violations += 1
    rep.elapsed_ms = (time.perf_counter() - t0) * 1e3
    shifted_support = rep.support_total - comp_total
    rep.extras["recovery_rate"] = rep.correct_definite / shifted_support if shifted_support else 0.0
    rep.extras["computational_support"] = comp_total
    rep.extras["computational_m_equals_mdd_sum"] = comp_hits
    return rep


def sweep(d: int | PrimeModulus, family: MesFamily | str) -> SweepReport:
    family = MesFamily.parse(family)
    return sweep_protocol_a(d) if family is MesFamily.A else sweep_protocol_b(d)


def all_records(d: int | PrimeModulus) -> list[UrmRecord]:
    p = modulus(d)
    return [UrmRecord(b, m) for b, m in itertools.product(basis_labels(p), p.elements())]


__all__ = [
    "COMPUTATIONAL", "ComputationalBasis", "ControlOutcome", "Episode", "ImpossibleOutcomeError",
    "InferenceResult", "ShiftedBasis", "SweepReport", "Undetermined", "UrmRecord",
    "all_records", "apply_urm", "constraint_holds", "control_distribution", "control_measure", "infer_basis",
    "infer_outcome", "is_correct", "predicted_support", "run_urm", "sample_episodes", "sweep",
    "sweep_protocol_a", "sweep_protocol_b", "urm_outcome_probabilities",
]
