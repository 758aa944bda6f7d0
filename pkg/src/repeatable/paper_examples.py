"""Two interacting qubits and a repeatable dilation of their system map.

The interaction is ``U = exp(-i (g2 s2(x)s2 + g3 s3(x)s3) / 2)``.  Its system
map has closed-form Bloch updates; it is repeatable when ``g2 = 0`` and
unital when the environment has ``<x1> = 0``.  For ``<x1> = 0`` and
``|<x2>| + |<x3>| = 1`` the same map is produced by a procedure on a 16-level
environment (a 4-level label register and two qubits) whose state is never
disturbed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .channels import (
    channel_distance,
    channel_from_procedure,
    decompose_unital,
    is_completely_positive,
    is_unital,
)
from .errors import ValidationError
from .linalg import STRUCT_TOL, expm_hermitian_generator, max_abs_diff, verify_projector, verify_unitary
from .procedures import REPEAT_TOL, Procedure, ceil_map, is_repeatable, is_repeatable_to_depth
from .states import IDENTITY, SIGMA_2, SIGMA_3, as_bloch, bloch_to_density, spanning_states

LABEL_DIM = 4
DILATION_ENV_DIM = LABEL_DIM * 4


def canonical_angle(g: float) -> float:
    """Reduce an angle to ``(-pi, pi]``."""
    g = float(g)
    if not math.isfinite(g):
        raise ValidationError(f"angle must be finite, got {g!r}")
    r = math.remainder(g, 2 * math.pi)
    return math.pi if r <= -math.pi else r


@dataclass(frozen=True)
class PaperInteractionParams:
    gamma2: float
    gamma3: float

    def __post_init__(self):
        object.__setattr__(self, "gamma2", canonical_angle(self.gamma2))
        object.__setattr__(self, "gamma3", canonical_angle(self.gamma3))


def _params(params) -> PaperInteractionParams:
    if isinstance(params, PaperInteractionParams):
        return params
    return PaperInteractionParams(*params)


def interaction_generator(params) -> np.ndarray:
    """``(g2 s2(x)s2 + g3 s3(x)s3) / 2``."""
    p = _params(params)
    return 0.5 * (p.gamma2 * np.kron(SIGMA_2, SIGMA_2) + p.gamma3 * np.kron(SIGMA_3, SIGMA_3))


def paper_unitary(params) -> np.ndarray:
    return expm_hermitian_generator(interaction_generator(params), 1.0)


def _update(g2, g3, s, x):
    c2, c3, n2, n3 = math.cos(g2), math.cos(g3), math.sin(g2), math.sin(g3)
    return np.array([
        s[0] * c2 * c3 + x[0] * n2 * n3 - s[1] * x[2] * c2 * n3 + s[2] * x[1] * n2 * c3,
        s[1] * c3 + s[0] * x[2] * n3,
        s[2] * c2 - s[0] * x[1] * n2,
    ])


def analytic_update(params, s, x) -> np.ndarray:
    """Closed-form system Bloch vector after the interaction, from product-state input."""
    p = _params(params)
    return _update(p.gamma2, p.gamma3, as_bloch(s), as_bloch(x))


def analytic_environment_update(params, s, x) -> np.ndarray:
    """Environment Bloch vector after the interaction; the system formula with the qubits swapped."""
    p = _params(params)
    return _update(p.gamma2, p.gamma3, as_bloch(x), as_bloch(s))


def paper_procedure(params, xi) -> Procedure:
    return Procedure(2, 2, paper_unitary(params), bloch_to_density(xi))


def _sign(v: float) -> int:
    return -1 if v < 0 else 1


@dataclass(frozen=True)
class DilationSpec:
    params: PaperInteractionParams
    xi_bloch: Tuple[float, float, float]
    label_dim: int = LABEL_DIM

    def __post_init__(self):
        object.__setattr__(self, "params", _params(self.params))
        try:
            r = as_bloch(self.xi_bloch)
        except ValidationError as exc:
            raise ValidationError(f"dilation preconditions not met: {exc}") from None
        if r[0] != 0 or abs(abs(r[1]) + abs(r[2]) - 1) > 1e-12:
            raise ValidationError(
                "dilation preconditions not met: requires <x1>=0 and |<x2>|+|<x3>|=1, "
                f"got {r.tolist()}")
        if self.label_dim != LABEL_DIM:
            raise ValidationError("the dilation uses a 4-level label register")
        object.__setattr__(self, "xi_bloch", tuple(float(c) for c in r))

    @property
    def sign2(self) -> int:
        return _sign(self.xi_bloch[1])

    @property
    def sign3(self) -> int:
        return _sign(self.xi_bloch[2])

    @property
    def weights(self) -> np.ndarray:
        a2, a3 = abs(self.xi_bloch[1]), abs(self.xi_bloch[2])
        return np.array([a3 / 2, a3 / 2, a2 / 2, a2 / 2])


@dataclass(frozen=True, eq=False)
class DilationProcedure:
    procedure: Procedure
    projectors: Tuple[np.ndarray, ...]
    weights: np.ndarray
    spec: Optional[DilationSpec] = None


def _eigvec(op: np.ndarray, sign: int) -> np.ndarray:
    evals, evecs = np.linalg.eigh(op)
    return evecs[:, int(np.argmin(np.abs(evals - sign)))]


def build_repeatable_dilation(spec: DilationSpec) -> DilationProcedure:
    """Controlled version of the two-qubit interaction on a 16-level environment.

    Environment layout is ``label(4) (x) qubit Y (x) qubit P``.  Sector ``j``
    is ``E_j = |j><j| (x) P[Y_2 = sign2] (x) P[P_3 = sign3]`` and carries one
    of the four ordered products

        U_1 = e^{-i g2 s2 Y2/2} e^{-i g3 s3 P3/2}    U_2 = e^{+i g2 s2 Y2/2} e^{-i g3 s3 P3/2}
        U_3 = e^{-i g3 s3 P3/2} e^{-i g2 s2 Y2/2}    U_4 = e^{+i g3 s3 P3/2} e^{-i g2 s2 Y2/2}

    with sector weights ``|<x3>|/2, |<x3>|/2, |<x2>|/2, |<x2>|/2``.  Outside
    the four sectors ``U`` acts as the identity.
    """
    g2, g3 = spec.params.gamma2, spec.params.gamma3
    i_label, i2 = np.eye(LABEL_DIM, dtype=complex), IDENTITY
    upsilon2 = np.kron(np.kron(i_label, SIGMA_2), i2)
    pi3 = np.kron(np.kron(i_label, i2), SIGMA_3)
    a = expm_hermitian_generator(np.kron(SIGMA_2, upsilon2), 0.5 * g2)
    a_inv = expm_hermitian_generator(np.kron(SIGMA_2, upsilon2), -0.5 * g2)
    b = expm_hermitian_generator(np.kron(SIGMA_3, pi3), 0.5 * g3)
    b_inv = expm_hermitian_generator(np.kron(SIGMA_3, pi3), -0.5 * g3)
    sector_unitaries = [a @ b, a_inv @ b, b @ a, b_inv @ a]

    y = _eigvec(SIGMA_2, spec.sign2)
    z = _eigvec(SIGMA_3, spec.sign3)
    yz = np.kron(y, z)
    p_yz = np.outer(yz, yz.conj())
    projectors = tuple(np.kron(np.outer(i_label[j], i_label[j]), p_yz) for j in range(LABEL_DIM))
    rest = np.eye(DILATION_ENV_DIM) - sum(projectors)

    u = sum(uj @ np.kron(IDENTITY, ej) for uj, ej in zip(sector_unitaries, projectors))
    u = u + np.kron(IDENTITY, rest)

    w = spec.weights
    xi = np.kron(np.diag(w).astype(complex), p_yz)
    return DilationProcedure(Procedure(2, DILATION_ENV_DIM, u, xi), projectors, w, spec)


@dataclass(frozen=True)
class DilationCheck:
    channel_distance: float
    repeatable: bool
    repeat_violation: float
    depth: int
    environment_drift: float
    projectors_ok: bool
    unitary_ok: bool

    @property
    def ok(self) -> bool:
        return (self.channel_distance <= STRUCT_TOL and self.repeatable
                and self.environment_drift <= STRUCT_TOL and self.projectors_ok and self.unitary_ok)


def check_dilation(d: DilationProcedure, depth: int = 5, tol: float = REPEAT_TOL, seed: int = 0) -> DilationCheck:
    """Compare a dilation against the two-qubit procedure it replaces."""
    spec = d.spec
    original = channel_from_procedure(paper_procedure(spec.params, spec.xi_bloch))
    dist = channel_distance(channel_from_procedure(d.procedure), original)
    rep = is_repeatable_to_depth(d.procedure, depth, tol, seed)
    drift = max(max_abs_diff(ceil_map(d.procedure, rho), d.procedure.xi) for rho in spanning_states(2))
    es = d.projectors
    proj_ok = all(verify_projector(e) for e in es) and all(
        max_abs_diff(es[j] @ es[k], np.zeros_like(es[j])) <= 1e-12
        for j in range(len(es)) for k in range(len(es)) if j != k)
    return DilationCheck(dist, rep.repeatable, rep.max_violation, rep.depth, drift, proj_ok,
                         verify_unitary(d.procedure.u))


def dilation_applicable(xi) -> bool:
    r = as_bloch(xi)
    return r[0] == 0 and abs(abs(r[1]) + abs(r[2]) - 1) <= 1e-12


@dataclass(frozen=True, eq=False)
class SuiteRow:
    gamma2: float
    gamma3: float
    xi: Tuple[float, float, float]
    repeatable: bool
    repeat_violation: float
    unital: bool
    cp: bool
    bloch_matrix: np.ndarray
    translation: np.ndarray
    decomposable: Optional[bool]
    dilation: Optional[DilationCheck]
    expectations: dict

    @property
    def claims_hold(self) -> bool:
        return all(self.expectations.values())


def _expectations(row_args, tol) -> dict:
    """The verdicts the two-qubit analysis predicts for one grid point."""
    g2, g3, xi, rep, unital, decomposable, dil = row_args
    out = {}
    coupling = math.sin(g2) * math.sin(g3)
    if g2 == 0:
        out["repeatable_when_gamma2_zero"] = rep
    if abs(coupling) > tol:
        # the environment's <x1> picks up s1*sin(g2)*sin(g3), shifting the translation
        out["not_repeatable_when_both_couplings_on"] = not rep
    out["unital_iff_x1_coupling_vanishes"] = unital == (abs(xi[0] * coupling) <= STRUCT_TOL)
    if unital:
        out["unital_map_decomposes_into_unitaries"] = bool(decomposable)
    if dil is not None:
        out["dilation_same_map_and_repeatable"] = dil.ok
    return out


def run_paper_row(params, xi, tol: float = REPEAT_TOL, depth: int = 5, seed: int = 0) -> SuiteRow:
    p = _params(params)
    xi = tuple(float(c) for c in as_bloch(xi))
    proc = paper_procedure(p, xi)
    ch = channel_from_procedure(proc)
    rep = is_repeatable(proc, tol)
    unital = is_unital(ch)
    decomposable = None
    if unital:
        try:
            decompose_unital(ch)
            decomposable = True
        except ValidationError:
            decomposable = False
    dil = None
    if dilation_applicable(xi):
        dil = check_dilation(build_repeatable_dilation(DilationSpec(p, xi)), depth, tol, seed)
    exp = _expectations((p.gamma2, p.gamma3, xi, rep.repeatable, unital, decomposable, dil), tol)
    return SuiteRow(p.gamma2, p.gamma3, xi, rep.repeatable, rep.max_violation, unital,
                    is_completely_positive(ch), ch.bloch_matrix, ch.translation, decomposable, dil, exp)


def run_paper_suite(grid: Sequence, tol: float = REPEAT_TOL, depth: int = 5, seed: int = 0) -> List[SuiteRow]:
    """Evaluate each ``(params, xi)`` grid point; rows come back in input order."""
    return [run_paper_row(params, xi, tol, depth, seed) for params, xi in grid]


def default_grid() -> List[Tuple[Tuple[float, float], Tuple[float, float, float]]]:
    pi = math.pi
    grid = []
    # no s2 coupling: repeatable for every environment
    for g3 in (0.0, 1.0, pi / 4, pi / 2):
        for xi in ((0.0, 0.0, 1.0), (0.3, 0.4, 0.5), (-0.6, 0.0, 0.8)):
            grid.append(((0.0, g3), xi))
    # both couplings on, <x1> != 0: neither unital nor repeatable
    for g2, g3 in ((pi / 3, pi / 4), (pi / 2, pi / 2), (1.0, -0.7)):
        for xi in ((0.3, 0.4, 0.5), (1.0, 0.0, 0.0)):
            grid.append(((g2, g3), xi))
    # both couplings on, <x1> = 0: unital map from a non-repeatable procedure
    for g2, g3 in ((pi / 3, pi / 4), (pi / 2, pi / 2), (1.0, -0.7)):
        for xi in ((0.0, 0.6, 0.4), (0.0, -0.25, 0.75), (0.0, 1.0, 0.0), (0.0, 0.3, -0.3)):
            grid.append(((g2, g3), xi))
    return grid
