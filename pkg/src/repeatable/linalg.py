"""Dense complex linear algebra for small quantum systems.

Matrices are plain 2-D ``numpy`` arrays of dtype ``complex128``.  Composite
systems are ordered system-major: the joint index of ``(s, r)`` is
``s * dim_r + r``, which is exactly the layout produced by :func:`numpy.kron`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ValidationError

# structural checks (unitary, projector, Hermitian) and the PSD eigenvalue floor
STRUCT_TOL = 1e-10
PSD_TOL = 1e-9

TRACE_OUT_R = "R"
TRACE_OUT_S = "S"


class MatrixKind(enum.Enum):
    GENERAL = "general"
    HERMITIAN = "hermitian"
    UNITARY = "unitary"
    PROJECTOR = "projector"
    PSD = "psd"


@dataclass(frozen=True)
class MatrixShapeTag:
    kind: MatrixKind
    tolerance: float = STRUCT_TOL

    def __post_init__(self):
        if not self.tolerance >= 0:
            raise ValueError("tolerance must be nonnegative")

    def check(self, m: np.ndarray) -> bool:
        """True if ``m`` passes the verification that corresponds to ``kind``."""
        if self.kind is MatrixKind.GENERAL:
            return bool(np.all(np.isfinite(as_matrix(m))))
        return _CHECKS[self.kind](m, self.tolerance)


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m: np.ndarray, dims: Tuple[int, int], side: str = TRACE_OUT_R) -> np.ndarray:
    """Trace out one factor of a bipartite ``(dim_s, dim_r)`` operator.

    ``side`` is ``"R"`` to keep the system factor, ``"S"`` to keep the
    environment factor.
    """
    m = np.asarray(m, dtype=complex)
    ds, dr = dims
    if ds < 1 or dr < 1 or m.shape != (ds * dr, ds * dr):
        raise ValidationError(f"bad bipartition: shape {m.shape} vs dims {dims}")
    t = m.reshape(ds, dr, ds, dr)
    if side == TRACE_OUT_R:
        return np.einsum("ikjk->ij", t)
    if side == TRACE_OUT_S:
        return np.einsum("kikj->ij", t)
    raise ValueError(f"unknown side {side!r}")


def verify_hermitian(m: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.max(np.abs(m - dagger(m)), initial=0.0)) <= tol


def hermitian_eig(m: np.ndarray, tol: float = STRUCT_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian matrix."""
    m = as_matrix(m)
    if not verify_hermitian(m, tol):
        raise ValidationError("matrix is not Hermitian")
    # symmetrize so the solver sees the exact Hermitian part
    evals, evecs = np.linalg.eigh(0.5 * (m + dagger(m)))
    return evals, evecs


def expm_hermitian_generator(h: np.ndarray, scale: float) -> np.ndarray:
    """Return ``exp(-1j * scale * h)`` for Hermitian ``h``."""
    evals, v = hermitian_eig(h)
    return (v * np.exp(-1j * scale * evals)) @ dagger(v)


def verify_unitary(m: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.max(np.abs(dagger(m) @ m - np.eye(m.shape[0])))) <= tol


def verify_psd(m: np.ndarray, tol: float = PSD_TOL) -> bool:
    try:
        evals, _ = hermitian_eig(m)
    except ValidationError:
        return False
    return bool(evals[0] >= -tol)


def verify_projector(m: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if not verify_hermitian(m, tol):
        return False
    return float(np.max(np.abs(m @ m - m))) <= tol


_CHECKS = {
    MatrixKind.HERMITIAN: verify_hermitian,
    MatrixKind.UNITARY: verify_unitary,
    MatrixKind.PROJECTOR: verify_projector,
    MatrixKind.PSD: verify_psd,
}


def max_abs_diff(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValidationError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.max(np.abs(a - b), initial=0.0))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half the trace norm of ``a - b`` (both Hermitian)."""
    evals, _ = hermitian_eig(np.asarray(a) - np.asarray(b))
    return 0.5 * float(np.sum(np.abs(evals)))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
