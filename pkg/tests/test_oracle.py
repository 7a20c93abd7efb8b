import itertools

import numpy as np
import pytest

from urm.collective import MesFamily, MesLabel
from urm.mub import COMPUTATIONAL, MubIndex, Shifted, basis_labels, mub_vector
from urm.oracle import (
    check_post_state_form,
    closed_form_post_state,
    cross_validate,
    enumerate_support,
    particle_vector,
    simulated_post_state,
)
from urm.zmod import PrimeModulus


def shifted(d, b):
    return Shifted(PrimeModulus(d)(b))


@pytest.mark.parametrize("d", [3, 5, 7])
def test_particle_vector_agrees_with_mub_module(d):
    Z = PrimeModulus(d)
    for lab in basis_labels(d):
        for m in Z.elements():
            assert np.abs(particle_vector(d, lab, m.value) - mub_vector(Z, MubIndex(lab, m))).max() < 1e-12


def test_support_shifted_example():
    sup = enumerate_support(3, MesLabel.of(3, "a", 0, 0), shifted(3, 1), 0, MesFamily.A)
    assert sup.keys == {(0, 0), (1, 2), (2, 1)}
    for _, p in sup.outcomes:
        assert p == pytest.approx(1 / 3, abs=1e-12)
    assert sup.total_probability == pytest.approx(1.0, abs=1e-9)


def test_support_computational_fixes_centre_coordinate():
    # Bob's |1> leaves |1>|-1>: centre coordinate (1 + -1)/2 = 0
    sup = enumerate_support(3, MesLabel.of(3, "a", 0, 0), COMPUTATIONAL, 1, MesFamily.A)
    assert {k[0] for k in sup.keys} == {0}
    assert len(sup.outcomes) == 3


@pytest.mark.parametrize("family", ["a", "b"])
def test_no_urm_support_is_prepared_label(family):
    prep = MesLabel.of(5, family, 3, 1)
    sup = enumerate_support(5, prep, None, None, family)
    assert sup.keys == {(3, 1)}
    assert sup.outcomes[0][1] == pytest.approx(1.0)


def test_post_state_form_exhaustive_d3():
    d = 3
    for mdd, m0, b, m in itertools.product(range(d), repeat=4):
        assert check_post_state_form(d, MesLabel.of(d, "a", mdd, m0), shifted(d, b), m) < 1e-9


def test_post_state_form_random_d5():
    d = 5
    rng = np.random.Generator(np.random.PCG64(31))
    for mdd, m0, b, m in rng.integers(0, d, size=(25, 4)):
        assert check_post_state_form(d, MesLabel.of(d, "a", int(mdd), int(m0)), shifted(d, int(b)), int(m)) < 1e-9


def test_post_state_form_detects_corruption():
    d = 3
    prep = MesLabel.of(d, "a", 1, 2)
    b = shifted(d, 2)
    for m in range(d):
        sim = simulated_post_state(d, prep, b, m)
        bad = closed_form_post_state(d, prep, b, m, shift=1)
        assert 1 - abs(np.vdot(bad, sim)) > 0.5


def test_post_state_form_family_b_rejected():
    with pytest.raises(ValueError):
        check_post_state_form(3, MesLabel.of(3, "b", 0, 0), shifted(3, 1), 0)


@pytest.mark.parametrize("d", [3, 5])
def test_cross_validate(d):
    rep = cross_validate(d)
    assert rep.mismatches == []
    assert rep.inference_disagreements == 0
    assert rep.support_size_violations == 0
    assert rep.support_total == rep.cases * d
    assert rep.max_residual < 1e-9
    assert rep.passed


def test_shifted_protocol_a_support_probabilities():
    d = 5
    for mdd, m0, b, m in itertools.product(range(d), range(d), range(d), range(0, d, 2)):
        sup = enumerate_support(d, MesLabel.of(d, "a", mdd, m0), shifted(d, b), m, MesFamily.A)
        assert len(sup.outcomes) == d
        assert all(abs(p - 1 / d) < 1e-9 for _, p in sup.outcomes)
