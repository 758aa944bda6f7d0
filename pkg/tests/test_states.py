import numpy as np
import pytest

from repeatable.errors import ValidationError
from repeatable.linalg import hermitian_eig, max_abs_diff, partial_trace
from repeatable.states import (
    IDENTITY,
    PAULIS,
    SIGMA_1,
    SIGMA_2,
    SIGMA_3,
    as_bloch,
    bloch_to_density,
    density_to_bloch,
    expectation,
    product_state,
    random_bloch,
    random_density,
    spanning_states,
    validate_density,
)


def test_pauli_algebra():
    for s in PAULIS:
        assert max_abs_diff(s, s.conj().T) == 0
        assert max_abs_diff(s @ s, IDENTITY) == 0
        assert np.trace(s) == 0
    assert max_abs_diff(SIGMA_1 @ SIGMA_2, 1j * SIGMA_3) == 0
    assert max_abs_diff(SIGMA_2 @ SIGMA_3, 1j * SIGMA_1) == 0
    assert max_abs_diff(SIGMA_3 @ SIGMA_1, 1j * SIGMA_2) == 0


def test_bloch_to_density_examples():
    assert max_abs_diff(bloch_to_density((0, 0, 0)), IDENTITY / 2) == 0
    assert max_abs_diff(bloch_to_density((0, 0, 1)), np.diag([1, 0])) == 0
    expected = 0.5 * np.array([[1.5, 0.3 - 0.4j], [0.3 + 0.4j, 0.5]])
    assert max_abs_diff(bloch_to_density((0.3, 0.4, 0.5)), expected) < 1e-16


def test_bloch_norm_limits():
    with pytest.raises(ValidationError, match="Bloch norm exceeds 1"):
        bloch_to_density((0.8, 0.8, 0.0))
    clamped = as_bloch((1 + 5e-13, 0, 0))
    assert np.linalg.norm(clamped) <= 1


def test_density_to_bloch_examples():
    assert np.allclose(density_to_bloch(IDENTITY / 2), 0, atol=0)
    assert np.allclose(density_to_bloch(np.diag([1, 0])), (0, 0, 1), atol=0)
    with pytest.raises(ValidationError):
        density_to_bloch(np.eye(3) / 3)


def test_round_trip_and_spectrum():
    for seed in range(100):
        v = random_bloch(seed)
        rho = bloch_to_density(v)
        assert np.abs(density_to_bloch(rho) - v).max() < 1e-12
        r = np.linalg.norm(v)
        assert np.abs(hermitian_eig(rho)[0] - [(1 - r) / 2, (1 + r) / 2]).max() < 1e-12
        rho2 = bloch_to_density(density_to_bloch(random_density(2, seed)))
        assert max_abs_diff(rho2, random_density(2, seed)) < 1e-12


def test_product_state():
    assert max_abs_diff(product_state(IDENTITY / 2, IDENTITY / 2), np.eye(4) / 4) == 0
    rho, xi = random_density(2, 1), random_density(3, 2)
    joint = product_state(rho, xi)
    assert max_abs_diff(partial_trace(joint, (2, 3), "R"), rho) < 1e-15
    assert max_abs_diff(partial_trace(joint, (2, 3), "S"), xi) < 1e-15
    joint = product_state(bloch_to_density((0, 0, 0.5)), bloch_to_density((0, 0, -1)))
    assert abs(expectation(joint, np.kron(SIGMA_3, SIGMA_3)) + 0.5) < 1e-15
    for j in range(3):
        for k in range(3):
            s = random_bloch(j)
            x = random_bloch(10 + k)
            joint = product_state(bloch_to_density(s), bloch_to_density(x))
            assert abs(expectation(joint, np.kron(PAULIS[j], PAULIS[k])) - s[j] * x[k]) < 1e-15


def test_random_generators_deterministic_and_valid():
    assert np.array_equal(random_density(4, 7), random_density(4, 7))
    assert np.array_equal(random_bloch(7, pure=True), random_bloch(7, pure=True))
    for seed in range(50):
        validate_density(random_density(2 + seed % 5, seed))
        assert abs(np.linalg.norm(random_bloch(seed, pure=True)) - 1) < 1e-12
        assert np.linalg.norm(random_bloch(seed)) <= 1


def test_validate_density_rejects():
    with pytest.raises(ValidationError):
        validate_density(np.diag([0.5, 0.6]))
    with pytest.raises(ValidationError):
        validate_density(np.diag([1.5, -0.5]))
    with pytest.raises(ValidationError):
        validate_density(np.array([[0.5, 0.1], [0.2, 0.5]]))


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_spanning_states_span_operator_space(dim):
    states = spanning_states(dim)
    for s in states:
        validate_density(s)
    mat = np.array([s.reshape(-1) for s in states])
    assert np.linalg.matrix_rank(mat) == dim * dim
