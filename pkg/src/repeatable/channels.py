"""Qubit channels as mathematical objects.

A :class:`QubitChannel` carries both the affine Bloch form ``v -> M v + t``
and the Choi matrix ``J = (1/2) sum_ij |i><j| (x) L(|i><j|)`` (input factor
first, unit trace).  Unital qubit channels are decomposed into mixtures of
unitary conjugations, and any such mixture can be realized by a procedure
whose environment is never disturbed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .errors import ValidationError
from .linalg import (
    PSD_TOL,
    STRUCT_TOL,
    TRACE_OUT_R,
    as_matrix,
    dagger,
    hermitian_eig,
    partial_trace,
    verify_unitary,
)
from .procedures import Procedure, apply_floor
from .states import IDENTITY, PAULIS, SPANNING_BLOCH

_MATRIX_UNITS = [np.outer(np.eye(2)[i], np.eye(2)[j]).astype(complex) for i in range(2) for j in range(2)]


def _affine_apply(m: np.ndarray, t: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Linear action of the affine channel ``(m, t)`` on an arbitrary 2x2 operator."""
    tr = np.trace(x)
    out = 0.5 * tr * (IDENTITY + sum(t[j] * PAULIS[j] for j in range(3)))
    coeffs = [np.trace(x @ s) for s in PAULIS]
    for j in range(3):
        out = out + 0.5 * sum(m[j, k] * coeffs[k] for k in range(3)) * PAULIS[j]
    return out


def _choi_from_linear(f) -> np.ndarray:
    return 0.5 * sum(np.kron(e, f(e)) for e in _MATRIX_UNITS)


def apply_choi(choi: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply the channel with unit-trace Choi matrix ``choi`` to ``x``."""
    return 2 * partial_trace(np.kron(np.transpose(x), IDENTITY) @ choi, (2, 2), "S")


@dataclass(frozen=True, eq=False)
class QubitChannel:
    bloch_matrix: np.ndarray
    translation: np.ndarray
    choi: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.bloch_matrix, dtype=float)
        t = np.asarray(self.translation, dtype=float).reshape(-1)
        choi = as_matrix(self.choi)
        if m.shape != (3, 3) or t.shape != (3,) or choi.shape != (4, 4):
            raise ValidationError("a qubit channel needs a 3x3 matrix, a 3-vector and a 4x4 Choi matrix")
        for v in SPANNING_BLOCH:
            rho = 0.5 * (IDENTITY + sum(v[j] * PAULIS[j] for j in range(3)))
            if np.max(np.abs(apply_choi(choi, rho) - _affine_apply(m, t, rho))) > STRUCT_TOL:
                raise ValidationError("Choi matrix and affine form disagree")
        object.__setattr__(self, "bloch_matrix", m)
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "choi", choi)

    @classmethod
    def from_affine(cls, bloch_matrix, translation=(0.0, 0.0, 0.0)) -> "QubitChannel":
        m = np.asarray(bloch_matrix, dtype=float)
        t = np.asarray(translation, dtype=float)
        return cls(m, t, _choi_from_linear(lambda x: _affine_apply(m, t, x)))

    def apply_bloch(self, v) -> np.ndarray:
        return self.bloch_matrix @ np.asarray(v, dtype=float) + self.translation

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return _affine_apply(self.bloch_matrix, self.translation, np.asarray(rho, dtype=complex))

    def choi_eigenvalues(self) -> np.ndarray:
        return hermitian_eig(self.choi)[0]


@dataclass(frozen=True, eq=False)
class UnitaryMixture:
    weights: np.ndarray
    unitaries: tuple
    tol: float = STRUCT_TOL

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        us = tuple(as_matrix(u) for u in self.unitaries)
        if len(w) == 0 or len(w) != len(us):
            raise ValidationError("a mixture needs one weight per unitary")
        if np.any(w <= 0):
            raise ValidationError("mixture weights must be positive")
        if abs(w.sum() - 1) > 1e-12:
            raise ValidationError(f"mixture weights sum to {w.sum()!r}, not 1")
        for u in us:
            if u.shape != (2, 2) or not verify_unitary(u, self.tol):
                raise ValidationError("unitarity violated")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "unitaries", us)

    def __len__(self):
        return len(self.weights)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(p * u @ rho @ dagger(u) for p, u in zip(self.weights, self.unitaries))


def bloch_rotation(u: np.ndarray) -> np.ndarray:
    """The rotation ``R`` with ``u s_k u^dagger = sum_j R[j, k] s_j``."""
    u = np.asarray(u, dtype=complex)
    return np.array([[0.5 * np.trace(sj @ u @ sk @ dagger(u)).real for sk in PAULIS] for sj in PAULIS])


def rotation_to_su2(r: np.ndarray) -> np.ndarray:
    """Lift a proper rotation to ``w I - i (x s1 + y s2 + z s3)`` with ``w >= 0``."""
    r = np.asarray(r, dtype=float)
    tr = np.trace(r)
    if tr > 0:
        s = 2 * np.sqrt(tr + 1)
        q = (s / 4, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s)
    elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
        s = 2 * np.sqrt(1 + r[0, 0] - r[1, 1] - r[2, 2])
        q = ((r[2, 1] - r[1, 2]) / s, s / 4, (r[0, 1] + r[1, 0]) / s, (r[0, 2] + r[2, 0]) / s)
    elif r[1, 1] >= r[2, 2]:
        s = 2 * np.sqrt(1 + r[1, 1] - r[0, 0] - r[2, 2])
        q = ((r[0, 2] - r[2, 0]) / s, (r[0, 1] + r[1, 0]) / s, s / 4, (r[1, 2] + r[2, 1]) / s)
    else:
        s = 2 * np.sqrt(1 + r[2, 2] - r[0, 0] - r[1, 1])
        q = ((r[1, 0] - r[0, 1]) / s, (r[0, 2] + r[2, 0]) / s, (r[1, 2] + r[2, 1]) / s, s / 4)
    q = np.array(q) / np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    w, x, y, z = q
    return w * IDENTITY - 1j * (x * PAULIS[0] + y * PAULIS[1] + z * PAULIS[2])


def channel_from_procedure(p: Procedure) -> QubitChannel:
    """The map a procedure induces on its (qubit) system."""
    if p.dim_s != 2:
        raise ValidationError(f"channel analysis requires a qubit system, got dim_s={p.dim_s}")
    image_id = apply_floor(p, IDENTITY)
    m = np.array([[0.5 * np.trace(sj @ apply_floor(p, sk)).real for sk in PAULIS] for sj in PAULIS])
    t = np.array([0.5 * np.trace(sj @ image_id).real for sj in PAULIS])
    choi = _choi_from_linear(lambda x: apply_floor(p, x))
    return QubitChannel(m, t, 0.5 * (choi + dagger(choi)))


def is_completely_positive(c: QubitChannel, tol: float = PSD_TOL) -> bool:
    return bool(c.choi_eigenvalues()[0] >= -tol)


def trace_preservation_error(c: QubitChannel) -> float:
    return float(np.max(np.abs(2 * partial_trace(c.choi, (2, 2), TRACE_OUT_R) - IDENTITY)))


def is_trace_preserving(c: QubitChannel, tol: float = STRUCT_TOL) -> bool:
    return trace_preservation_error(c) <= tol


def is_unital(c: QubitChannel, tol: float = STRUCT_TOL) -> bool:
    return float(np.linalg.norm(c.translation)) <= tol


def channel_distance(a: QubitChannel, b: QubitChannel) -> float:
    """Largest trace distance between the outputs of ``a`` and ``b`` on the six Pauli eigenstates."""
    diff = SPANNING_BLOCH @ (a.bloch_matrix - b.bloch_matrix).T + (a.translation - b.translation)
    return 0.5 * float(np.max(np.linalg.norm(diff, axis=1)))


def mixture_to_channel(m: UnitaryMixture) -> QubitChannel:
    rot = sum(p * bloch_rotation(u) for p, u in zip(m.weights, m.unitaries))
    return QubitChannel.from_affine(rot, np.zeros(3))


# maps Pauli-channel probabilities (p0, p1, p2, p3) to (1, l1, l2, l3); A @ A = 4 I
_PAULI_SIGNS = np.array([[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]], dtype=float)


def pauli_probabilities(diagonal: Sequence[float]) -> np.ndarray:
    """Probabilities of the Pauli channel with Bloch matrix ``diag(diagonal)``."""
    return _PAULI_SIGNS @ np.concatenate([[1.0], np.asarray(diagonal, dtype=float)]) / 4


def decompose_unital(c: QubitChannel, tol: float = 1e-10) -> UnitaryMixture:
    """Write a unital qubit channel as ``sum_k p_k U_k rho U_k^dagger`` with at most four terms.

    ``M = O1 D O2^T`` with both factors proper rotations, so the channel is a
    rotation, then a Pauli channel with Bloch matrix ``D``, then another
    rotation; the Pauli channel's probabilities follow from ``D`` by a 4x4
    linear solve.
    """
    if not is_unital(c, tol):
        raise ValidationError("not unital")
    o1, d, o2t = np.linalg.svd(c.bloch_matrix)
    if np.linalg.det(o1) < 0:
        o1[:, 2] *= -1
        d[2] *= -1
    if np.linalg.det(o2t) < 0:
        o2t[2, :] *= -1
        d[2] *= -1
    probs = pauli_probabilities(d)
    if np.any(probs < -tol):
        raise ValidationError(f"not completely positive (Pauli probabilities {probs.tolist()})")
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    v1, v2 = rotation_to_su2(o1), rotation_to_su2(o2t)
    paulis = (IDENTITY,) + PAULIS
    keep = [k for k in range(4) if probs[k] > 0]
    return UnitaryMixture(probs[keep], tuple(v1 @ paulis[k] @ v2 for k in keep))


def procedure_from_mixture(m: UnitaryMixture) -> Procedure:
    """Controlled-unitary procedure: a classical label register selects ``U_k``.

    ``U = sum_k U_k (x) |k><k|`` and ``xi = sum_k p_k |k><k|``; the label is
    never disturbed, so the procedure repeats indefinitely.
    """
    k = len(m)
    labels = np.eye(k, dtype=complex)
    u = sum(np.kron(uk, np.outer(labels[j], labels[j])) for j, uk in enumerate(m.unitaries))
    return Procedure(2, k, u, np.diag(m.weights).astype(complex), tol=max(STRUCT_TOL, m.tol))


def random_unital_channel(seed=None, n_terms: int = 4) -> QubitChannel:
    """Random mixture of Haar-ish unitaries, for tests and sampling."""
    return mixture_to_channel(random_mixture(seed, n_terms))


def random_mixture(seed=None, n_terms: int = 4) -> UnitaryMixture:
    rng = np.random.default_rng(seed)
    us: List[np.ndarray] = []
    for _ in range(n_terms):
        z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(z)
        us.append(q * (np.diag(r) / np.abs(np.diag(r))))
    w = rng.dirichlet(np.ones(n_terms))
    w = np.clip(w, 1e-12, None)
    return UnitaryMixture(w / w.sum(), tuple(us))
