"""Density matrices, qubit Bloch vectors and the conversions between them.

A density matrix is a square complex array; a Bloch vector is a length-3
real array holding the Pauli mean values ``(<s1>, <s2>, <s3>)``.
"""
from __future__ import annotations

from typing import List, Sequence

import numpy as np

from .errors import ValidationError
from .linalg import PSD_TOL, STRUCT_TOL, as_matrix, hermitian_eig, tensor, verify_hermitian

IDENTITY = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_1, SIGMA_2, SIGMA_3)

BLOCH_SLACK = 1e-12


def as_bloch(v: Sequence[float]) -> np.ndarray:
    """Validate a Bloch vector; norms within ``BLOCH_SLACK`` above 1 are clamped."""
    r = np.asarray(v, dtype=float).reshape(-1)
    if r.shape != (3,) or not np.all(np.isfinite(r)):
        raise ValidationError(f"a Bloch vector needs 3 finite components, got {v!r}")
    norm = float(np.linalg.norm(r))
    if norm > 1 + BLOCH_SLACK:
        raise ValidationError(f"Bloch norm exceeds 1 ({norm!r})")
    if norm > 1:
        r = r / norm
    return r


def validate_density(rho, tol: float = STRUCT_TOL, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Return ``rho`` as an array, raising ``ValidationError`` if it is not a state."""
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ValidationError("density matrix must be square")
    if not verify_hermitian(rho, tol):
        raise ValidationError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValidationError(f"density matrix trace is {np.trace(rho).real!r}, not 1")
    evals, _ = hermitian_eig(rho, tol)
    if evals[0] < -psd_tol:
        raise ValidationError(f"density matrix has negative eigenvalue {evals[0]!r}")
    return rho


def bloch_to_density(v: Sequence[float]) -> np.ndarray:
    r = as_bloch(v)
    return 0.5 * (IDENTITY + r[0] * SIGMA_1 + r[1] * SIGMA_2 + r[2] * SIGMA_3)


def density_to_bloch(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValidationError(f"Bloch vectors exist only for qubits, got shape {rho.shape}")
    return as_bloch([np.trace(rho @ s).real for s in PAULIS])


def product_state(rho: np.ndarray, xi: np.ndarray) -> np.ndarray:
    return tensor(rho, xi)


def expectation(rho: np.ndarray, op: np.ndarray) -> float:
    return float(np.trace(rho @ op).real)


def purity(rho: np.ndarray) -> float:
    return float(np.trace(rho @ rho).real)


def random_density(dim: int, seed=None) -> np.ndarray:
    """Full-rank random state ``G G^dagger / Tr(G G^dagger)`` from a complex Gaussian ``G``."""
    if dim < 2:
        raise ValueError("dim must be at least 2")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_bloch(seed=None, pure: bool = False) -> np.ndarray:
    """Random Bloch vector; uniform on the sphere if ``pure``, uniform in the ball otherwise."""
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    if pure:
        return direction
    return direction * rng.uniform() ** (1 / 3)


def spanning_states(dim: int = 2) -> List[np.ndarray]:
    """Pure states whose span is the full operator space of a ``dim``-level system.

    For a qubit these are the six Pauli eigenstates ``(I +- s_k)/2``.  For larger
    ``dim`` the ``dim**2`` states ``|i>``, ``(|i>+|j>)/sqrt2`` and
    ``(|i>+1j|j>)/sqrt2`` (``i < j``) are used.
    """
    if dim == 2:
        out = []
        for s in PAULIS:
            out.append(0.5 * (IDENTITY + s))
            out.append(0.5 * (IDENTITY - s))
        return out
    basis = np.eye(dim, dtype=complex)
    vecs = [basis[i] for i in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            vecs.append((basis[i] + basis[j]) / np.sqrt(2))
            vecs.append((basis[i] + 1j * basis[j]) / np.sqrt(2))
    return [np.outer(v, v.conj()) for v in vecs]


SPANNING_BLOCH = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)
