import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from repeatable.channels import (
    QubitChannel,
    UnitaryMixture,
    apply_choi,
    bloch_rotation,
    channel_distance,
    channel_from_procedure,
    decompose_unital,
    is_completely_positive,
    is_trace_preserving,
    is_unital,
    mixture_to_channel,
    pauli_probabilities,
    procedure_from_mixture,
    random_mixture,
    random_unital_channel,
    rotation_to_su2,
)
from repeatable.errors import ValidationError
from repeatable.linalg import max_abs_diff, partial_trace
from repeatable.paper_examples import paper_procedure
from repeatable.procedures import Procedure, floor_map, is_repeatable, is_repeatable_to_depth
from repeatable.states import IDENTITY, SIGMA_1, SIGMA_2, SIGMA_3, bloch_to_density, random_bloch

IDENTITY_CHANNEL = QubitChannel.from_affine(np.eye(3))
DEPOLARIZER = QubitChannel.from_affine(np.zeros((3, 3)))


def identity_procedure():
    return Procedure(2, 2, np.eye(4), bloch_to_density((0.1, 0.2, 0.3)))


def test_channel_from_identity_procedure():
    c = channel_from_procedure(identity_procedure())
    assert np.abs(c.bloch_matrix - np.eye(3)).max() < 1e-15
    assert np.abs(c.translation).max() < 1e-15


def test_channel_gamma2_zero_coefficients(rng):
    for _ in range(10):
        g3, x = rng.uniform(-3, 3), random_bloch(rng)
        c = channel_from_procedure(paper_procedure((0, g3), x))
        expected = np.array([[math.cos(g3), -x[2] * math.sin(g3), 0],
                             [x[2] * math.sin(g3), math.cos(g3), 0],
                             [0, 0, 1]])
        assert np.abs(c.bloch_matrix - expected).max() < 1e-12
        assert np.abs(c.translation).max() < 1e-12


def test_channel_translation_general(rng):
    for _ in range(10):
        g2, g3 = rng.uniform(-3, 3, 2)
        x = random_bloch(rng)
        c = channel_from_procedure(paper_procedure((g2, g3), x))
        expected = (x[0] * math.sin(g2) * math.sin(g3), 0, 0)
        assert np.abs(c.translation - expected).max() < 1e-12


def test_choi_and_affine_agree(rng):
    for _ in range(20):
        g2, g3 = rng.uniform(-3, 3, 2)
        p = paper_procedure((g2, g3), random_bloch(rng))
        c = channel_from_procedure(p)
        v = random_bloch(rng)
        rho = bloch_to_density(v)
        assert max_abs_diff(apply_choi(c.choi, rho), bloch_to_density(c.apply_bloch(v))) < 1e-12
        assert max_abs_diff(c.apply(rho), floor_map(p, rho)) < 1e-12
        assert max_abs_diff(2 * partial_trace(c.choi, (2, 2), "R"), IDENTITY) < 1e-12
        assert is_trace_preserving(c) and is_completely_positive(c)


def test_inconsistent_channel_rejected():
    with pytest.raises(ValidationError):
        QubitChannel(np.eye(3), np.zeros(3), DEPOLARIZER.choi)


def test_transpose_map_not_cp():
    t = QubitChannel.from_affine(np.diag([1.0, -1.0, 1.0]))
    # unit-trace Choi of the transpose is SWAP / 2
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert max_abs_diff(t.choi, swap / 2) < 1e-15
    assert abs(t.choi_eigenvalues()[0] + 0.5) < 1e-14
    assert not is_completely_positive(t)
    assert is_completely_positive(IDENTITY_CHANNEL)


def test_is_unital_examples():
    assert is_unital(channel_from_procedure(paper_procedure((1.0, 0.5), (0, 0.6, 0.4))))
    c = channel_from_procedure(paper_procedure((math.pi / 2, math.pi / 2), (1, 0, 0)))
    assert not is_unital(c)
    assert abs(c.translation[0] - 1) < 1e-12
    assert is_unital(IDENTITY_CHANNEL)


def test_channel_distance():
    c = random_unital_channel(3)
    assert channel_distance(c, c) == 0
    # pole state vs maximally mixed: half the Bloch length
    assert abs(channel_distance(IDENTITY_CHANNEL, DEPOLARIZER) - 0.5) < 1e-15
    for seed in range(20):
        a, b, d = (random_unital_channel(seed + k * 100) for k in range(3))
        assert channel_distance(a, b) == channel_distance(b, a)
        assert channel_distance(a, d) <= channel_distance(a, b) + channel_distance(b, d) + 1e-15


def test_mixture_to_channel_examples():
    assert channel_distance(mixture_to_channel(UnitaryMixture([1.0], (IDENTITY,))), IDENTITY_CHANNEL) < 1e-15
    twirl = mixture_to_channel(UnitaryMixture([0.25] * 4, (IDENTITY, SIGMA_1, SIGMA_2, SIGMA_3)))
    assert np.abs(twirl.bloch_matrix).max() < 1e-15
    dephase = mixture_to_channel(UnitaryMixture([0.5, 0.5], (IDENTITY, SIGMA_3)))
    assert np.abs(dephase.bloch_matrix - np.diag([0, 0, 1])).max() < 1e-15


def test_mixture_validation():
    with pytest.raises(ValidationError):
        UnitaryMixture([0.5, 0.4], (IDENTITY, SIGMA_1))
    with pytest.raises(ValidationError, match="unitarity"):
        UnitaryMixture([1.0], (2 * IDENTITY,))
    with pytest.raises(ValidationError):
        UnitaryMixture([1.0, 0.0], (IDENTITY, SIGMA_1))


def test_mixture_channel_matches_direct_sum(rng):
    for seed in range(10):
        m = random_mixture(seed)
        rho = bloch_to_density(random_bloch(rng))
        assert max_abs_diff(mixture_to_channel(m).apply(rho), m.apply(rho)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_su2_lift(seed):
    u = random_mixture(seed, 1).unitaries[0]
    r = bloch_rotation(u)
    assert abs(np.linalg.det(r) - 1) < 1e-12
    v = rotation_to_su2(r)
    assert np.abs(bloch_rotation(v) - r).max() < 1e-12
    assert v[0, 0].real >= 0


@pytest.mark.parametrize("r", [np.diag([1, -1, -1]), np.diag([-1, 1, -1]), np.diag([-1, -1, 1]), np.eye(3)])
def test_su2_lift_half_turns(r):
    assert np.abs(bloch_rotation(rotation_to_su2(r)) - r).max() < 1e-15


def test_pauli_probabilities():
    assert np.allclose(pauli_probabilities([1, 1, 1]), [1, 0, 0, 0])
    assert np.allclose(pauli_probabilities([0, 0, 1]), [0.5, 0, 0, 0.5])
    assert np.allclose(pauli_probabilities([0, 0, 0]), [0.25] * 4)


def test_decompose_examples():
    m = decompose_unital(IDENTITY_CHANNEL)
    assert len(m) == 1 and abs(m.weights[0] - 1) < 1e-15
    assert channel_distance(mixture_to_channel(m), IDENTITY_CHANNEL) < 1e-12
    dephase = QubitChannel.from_affine(np.diag([0.0, 0.0, 1.0]))
    m = decompose_unital(dephase)
    assert np.allclose(sorted(m.weights), [0.5, 0.5])
    assert channel_distance(mixture_to_channel(m), dephase) < 1e-12
    c = channel_from_procedure(paper_procedure((math.pi / 3, math.pi / 4), (0, 0.6, 0.4)))
    m = decompose_unital(c)
    assert len(m) <= 4
    assert channel_distance(mixture_to_channel(m), c) <= 1e-9


def test_decompose_errors():
    with pytest.raises(ValidationError, match="not unital"):
        decompose_unital(QubitChannel.from_affine(0.5 * np.eye(3), (0.2, 0, 0)))
    # unital but not CP (transpose-like): Fujiwara-Algoet violation
    with pytest.raises(ValidationError, match="not completely positive"):
        decompose_unital(QubitChannel.from_affine(np.diag([1.0, 1.0, -1.0])))


def test_decompose_round_trip_random():
    for seed in range(200):
        c = random_unital_channel(seed, n_terms=1 + seed % 5)
        m = decompose_unital(c)
        assert channel_distance(mixture_to_channel(m), c) <= 1e-9


def test_decompose_boundary_channels():
    # unitary channels and rank-deficient Bloch matrices sit on the CP boundary
    for seed in range(30):
        u = random_mixture(seed, 1).unitaries[0]
        c = mixture_to_channel(UnitaryMixture([1.0], (u,)))
        assert channel_distance(mixture_to_channel(decompose_unital(c)), c) <= 1e-9
    for diag in ([1, 0, 0], [0, 1, 0], [1, -1, -1], [0, 0, 0]):
        c = QubitChannel.from_affine(np.diag(np.array(diag, float)))
        assert channel_distance(mixture_to_channel(decompose_unital(c)), c) <= 1e-9


def test_procedure_from_mixture():
    p = procedure_from_mixture(UnitaryMixture([1.0], (SIGMA_2,)))
    assert p.dim_r == 1 and is_repeatable(p).repeatable
    twirl = UnitaryMixture([0.25] * 4, (IDENTITY, SIGMA_1, SIGMA_2, SIGMA_3))
    p = procedure_from_mixture(twirl)
    assert p.dim_r == 4
    assert is_repeatable_to_depth(p, 5).repeatable
    assert channel_distance(channel_from_procedure(p), mixture_to_channel(twirl)) < 1e-10
    dephase = UnitaryMixture([0.5, 0.5], (IDENTITY, SIGMA_3))
    p = procedure_from_mixture(dephase)
    c = channel_from_procedure(p)
    assert np.abs(c.bloch_matrix - np.diag([0, 0, 1])).max() < 1e-12
    rep = is_repeatable(p)
    assert rep.repeatable and rep.max_violation <= 1e-10


def test_paper_family_unital_decomposes(rng):
    for _ in range(20):
        g2, g3 = rng.uniform(-3, 3, 2)
        a = rng.uniform(-1, 1)
        x = (0.0, a, rng.uniform(-1, 1) * math.sqrt(1 - a * a))
        c = channel_from_procedure(paper_procedure((g2, g3), x))
        assert is_unital(c)
        m = decompose_unital(c)
        assert np.all(m.weights >= -1e-10)


def test_non_unital_paper_procedures_fail_repetition(rng):
    for _ in range(10):
        g2, g3 = rng.uniform(0.2, 2.9, 2) * rng.choice([-1, 1], 2)
        x = 0.5 * random_bloch(rng)
        x[0] = rng.uniform(0.1, 0.5)
        p = paper_procedure((g2, g3), x)
        assert not is_unital(channel_from_procedure(p))
        assert not is_repeatable_to_depth(p, 3).repeatable
