"""Exit criteria, one test per criterion.

Run ``pytest tests/test_acceptance.py`` (or this file directly); each criterion
prints a PASS/FAIL line, repeated in the pytest terminal summary.
"""
import itertools
import math
import time

import numpy as np
import pytest

from urm.collective import MesFamily, MesLabel, gamma_matrix, mes_labels, mes_state
from urm.mub import Shifted, basis_labels, unbiasedness_report
from urm.oracle import check_post_state_form, cross_validate, enumerate_support, urm_projector
from urm.protocol import (
    ControlOutcome,
    Undetermined,
    control_distribution,
    control_measure,
    infer_basis,
    sample_episodes,
    sweep_protocol_a,
    sweep_protocol_b,
)
from urm.qstate import partial_trace
from urm.zmod import PrimeModulus

TOL = 1e-9


@pytest.mark.parametrize("d", [3, 5, 7, 11, 13])
def test_ac1_mub_completeness(d, acceptance_report):
    t0 = time.perf_counter()
    rep = unbiasedness_report(d)
    elapsed = time.perf_counter() - t0
    ok = rep.max_deviation < TOL and elapsed < 2.0 and rep.basis_pairs == d * (d + 1) // 2
    acceptance_report(f"AC1 MUB completeness d={d}", ok,
                      f"max dev {rep.max_deviation:.2e} over {rep.basis_pairs} basis pairs in {elapsed:.3f}s")
    assert ok


@pytest.mark.parametrize("d", [3, 5, 7])
def test_ac2_mes_partial_traces(d, acceptance_report):
    worst = 0.0
    count = 0
    for family in MesFamily:
        for s in gamma_matrix(d, family)[1]:
            count += 1
            for side in (1, 2):
                worst = max(worst, float(np.abs(partial_trace(s, side) - np.eye(d) / d).max()))
    ok = worst < TOL and count == 2 * d * d
    acceptance_report(f"AC2 MES partial traces d={d}", ok, f"{count} states, max entry dev {worst:.2e}")
    assert ok


@pytest.mark.parametrize("d", [3, 5])
def test_ac3_conjugate_bases_unbiased(d, acceptance_report):
    A = gamma_matrix(d, MesFamily.A)[1]
    B = gamma_matrix(d, MesFamily.B)[1]
    sq = np.abs(A.conj() @ B.T) ** 2
    worst = float(np.abs(sq - 1 / d ** 2).max())
    ok = worst < TOL and sq.size == d ** 4
    acceptance_report(f"AC3 conjugate MES bases d={d}", ok, f"{sq.size} overlaps, max dev {worst:.2e}")
    assert ok


@pytest.mark.parametrize("d", [3, 5])
def test_ac4_post_state_closed_form(d, acceptance_report):
    Z = PrimeModulus(d)
    worst = 0.0
    n = 0
    for prep in mes_labels(d, MesFamily.A):
        for b, m in itertools.product(Z.elements(), Z.elements()):
            worst = max(worst, check_post_state_form(d, prep, Shifted(b), m))
            n += 1
    ok = worst < TOL and n == d ** 4
    acceptance_report(f"AC4 post-URM closed form d={d}", ok, f"{n} cases, max residual {worst:.2e}")
    assert ok


@pytest.mark.parametrize("d", [3, 5, 7])
def test_ac5_protocol_a_retrieval(d, acceptance_report):
    t0 = time.perf_counter()
    rep = sweep_protocol_a(d)
    elapsed = time.perf_counter() - t0
    ok = (rep.wrong_definite == 0
          and rep.extras["completeness_violations"] == 0
          and rep.extras["computational_misnamed"] == 0
          and rep.constraint_violations == 0
          and (d != 7 or elapsed < 30.0))
    acceptance_report(f"AC5 protocol A retrieval d={d}", ok,
                      f"{rep.cases_total} cases, correct {rep.correct_definite}, undetermined "
                      f"{rep.undetermined}, wrong {rep.wrong_definite}, incomplete "
                      f"{rep.extras['completeness_violations']}, {elapsed:.2f}s")
    assert ok


@pytest.mark.parametrize("d", [3, 5, 7])
def test_ac6_protocol_b_retrieval(d, acceptance_report):
    rep = sweep_protocol_b(d)
    shifted_support = rep.support_total - rep.extras["computational_support"]
    ok = rep.wrong_definite == 0 and rep.correct_definite == shifted_support > 0
    acceptance_report(f"AC6 protocol B retrieval d={d}", ok,
                      f"recovered m on {rep.correct_definite}/{shifted_support} support outcomes")
    assert ok


@pytest.mark.parametrize("d", [3, 5, 7])
def test_ac7_oracle_agreement(d, acceptance_report):
    rep = cross_validate(d)
    ok = not rep.mismatches and rep.inference_disagreements == 0
    acceptance_report(f"AC7 oracle agreement d={d}", ok,
                      f"{rep.cases} cases, {len(rep.mismatches)} support mismatches, "
                      f"{rep.inference_disagreements} inference disagreements")
    assert ok


def enumerated_control_distribution(d, prepared, family):
    """Outcome law with b uniform over the d+1 bases and m Born-distributed."""
    labels = gamma_matrix(d, family)[0]
    dist = {lab.key: 0.0 for lab in labels}
    state = mes_state(d, prepared)
    for basis in basis_labels(d):
        for m in range(d):
            s = urm_projector(d, basis, m) @ state
            pm = float(np.vdot(s, s).real)
            for outcome, q in enumerate_support(d, prepared, basis, m, family).outcomes:
                dist[outcome.key] += q * pm / (d + 1)
    return dist


@pytest.mark.parametrize("family", ["a", "b"])
def test_ac8_sampling_consistency(family, acceptance_report):
    d, N, seed = 3, 100_000, 20240611
    prepared = MesLabel.of(d, "a", 1, 2)
    episodes = sample_episodes(d, prepared, family, N, seed)
    expected = enumerated_control_distribution(d, prepared, MesFamily.parse(family))
    counts = dict.fromkeys(expected, 0)
    for ep in episodes:
        counts[ep.outcome.key] += 1
    worst_z = 0.0
    ok = True
    for key, p in expected.items():
        freq = counts[key] / N
        if p == 0.0:
            ok &= counts[key] == 0
            continue
        sigma = math.sqrt(p * (1 - p) / N)
        z = abs(freq - p) / sigma
        worst_z = max(worst_z, z)
        ok &= z < 5
    detail = f"N={N}, worst deviation {worst_z:.2f} sigma"
    if family == "a":
        rerun = sample_episodes(d, prepared, family, N, seed)
        identical = rerun == episodes
        ok &= identical
        detail += f", rerun identical: {identical}"
    acceptance_report(f"AC8 sampling consistency family {family.upper()}", ok, detail)
    assert ok


@pytest.mark.parametrize("d", [3, 5, 7])
def test_ac9_no_measurement_baseline(d, acceptance_report):
    ok = True
    for prep in mes_labels(d, MesFamily.A):
        state = mes_state(d, prep)
        labels, probs = control_distribution(state, MesFamily.A)
        k = labels.index(prep)
        ok &= abs(probs[k] - 1.0) < TOL
        outcome = control_measure(state, MesFamily.A, seed=prep.mdd.value * d + prep.m0.value)
        ok &= outcome == ControlOutcome.from_label(prep)
        ok &= isinstance(infer_basis(prep, outcome), Undetermined)
    acceptance_report(f"AC9 no-measurement baseline d={d}", ok,
                      f"{d * d} prepared labels return themselves with inference undetermined")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
