"""Physical procedures: a joint unitary acting on a system and its environment.

A :class:`Procedure` holds an environment state ``xi`` and a unitary ``u`` on
system (+) environment.  Acting with it on a system state ``rho`` yields two
marginals, the new system state (:func:`floor_map`) and the new environment
state (:func:`ceil_map`).  A procedure is *repeatable* when feeding in one
system, keeping the disturbed environment, and then acting on a second system
gives the same result as with the pristine environment.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .linalg import (
    STRUCT_TOL,
    TRACE_OUT_R,
    TRACE_OUT_S,
    as_matrix,
    dagger,
    partial_trace,
    verify_unitary,
)
from .states import density_to_bloch, random_bloch, random_density, bloch_to_density, spanning_states, validate_density

REPEAT_TOL = 1e-9
RANDOM_SEQUENCES = 200


@dataclass(frozen=True, eq=False)
class Procedure:
    dim_s: int
    dim_r: int
    u: np.ndarray
    xi: np.ndarray
    tol: float = field(default=STRUCT_TOL, repr=False)

    def __post_init__(self):
        n = self.dim_s * self.dim_r
        u = as_matrix(self.u)
        if self.dim_s < 1 or self.dim_r < 1 or u.shape != (n, n):
            raise ValidationError(
                f"unitary shape {u.shape} does not match dim_s={self.dim_s}, dim_r={self.dim_r}")
        if not verify_unitary(u, self.tol):
            raise ValidationError("unitarity violated")
        xi = validate_density(self.xi, self.tol)
        if xi.shape != (self.dim_r, self.dim_r):
            raise ValidationError(f"environment state has shape {xi.shape}, expected dim_r={self.dim_r}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "xi", xi)

    @property
    def dims(self) -> Tuple[int, int]:
        return self.dim_s, self.dim_r

    def _with_environment(self, xi: np.ndarray) -> "Procedure":
        """Copy with a new environment state, skipping re-validation of ``u``."""
        q = object.__new__(Procedure)
        for name, value in (("dim_s", self.dim_s), ("dim_r", self.dim_r), ("u", self.u),
                            ("xi", xi), ("tol", self.tol)):
            object.__setattr__(q, name, value)
        return q

    def joint_state(self, x: np.ndarray) -> np.ndarray:
        """``U (x (x) xi) U^dagger``; ``x`` may be any system operator, not only a state."""
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim_s, self.dim_s):
            raise ValidationError(f"system operator has shape {x.shape}, expected dim_s={self.dim_s}")
        return self.u @ np.kron(x, self.xi) @ dagger(self.u)


@dataclass(frozen=True, eq=False)
class RepeatabilityReport:
    repeatable: bool
    max_violation: float
    witness_pair: Optional[Tuple[np.ndarray, np.ndarray]]
    depth: int
    # full sequence of system states fed in before the witnessing probe, depth checks only
    witness_sequence: Optional[Tuple[np.ndarray, ...]] = None


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + dagger(m))


def apply_floor(p: Procedure, x: np.ndarray) -> np.ndarray:
    """Linear extension of :func:`floor_map` to arbitrary system operators."""
    return partial_trace(p.joint_state(x), p.dims, TRACE_OUT_R)


def apply_ceil(p: Procedure, x: np.ndarray) -> np.ndarray:
    """Linear extension of :func:`ceil_map` to arbitrary system operators."""
    return partial_trace(p.joint_state(x), p.dims, TRACE_OUT_S)


def floor_map(p: Procedure, rho: np.ndarray) -> np.ndarray:
    """New system state ``Tr_R[U (rho (x) xi) U^dagger]``."""
    return _hermitize(apply_floor(p, rho))


def ceil_map(p: Procedure, rho: np.ndarray) -> np.ndarray:
    """New environment state ``Tr_S[U (rho (x) xi) U^dagger]``."""
    return _hermitize(apply_ceil(p, rho))


def advance_environment(p: Procedure, rho: np.ndarray) -> Procedure:
    """The same procedure with its environment left as ``rho`` disturbed it.

    System-environment correlations are dropped; the system that caused them
    is never acted on again.
    """
    return p._with_environment(ceil_map(p, rho))


def iterate_environment(p: Procedure, rho_sequence: Iterable[np.ndarray]) -> Iterator[Procedure]:
    """Yield the procedure after each successive application, never resetting ``xi``."""
    current = p
    for rho in rho_sequence:
        current = advance_environment(current, rho)
        yield current


def _probe_states(dim: int, mode: str, rng: np.random.Generator, n_samples: int) -> List[np.ndarray]:
    if mode == "exact":
        return spanning_states(dim)
    if mode == "sample":
        if dim == 2:
            return [bloch_to_density(random_bloch(rng, pure=True)) for _ in range(n_samples)]
        return [random_density(dim, rng) for _ in range(n_samples)]
    raise ValueError(f"unknown mode {mode!r}")


def _as_witness(rho: np.ndarray) -> np.ndarray:
    return density_to_bloch(rho) if rho.shape == (2, 2) else rho


def floor_batch(p: Procedure, xs: np.ndarray) -> np.ndarray:
    """:func:`apply_floor` on a stack of system operators, shape ``(n, dim_s, dim_s)``."""
    ds, dr = p.dims
    ut = p.u.reshape(ds, dr, ds, dr)
    # out[n,i,o] = sum_{r,j,l,m} (U xi)[i,r,j,l] x[n,j,m] conj(U)[o,r,m,l]
    left = (ut @ p.xi).transpose(0, 1, 3, 2).reshape(ds * dr * dr, ds)
    right = ut.conj().transpose(0, 1, 3, 2).reshape(ds, dr * dr * ds)
    y = (left @ np.asarray(xs)).reshape(-1, ds, dr * dr * ds)
    return y @ right.T


def _map_violation(q: Procedure, probes: np.ndarray, reference: np.ndarray):
    """Largest trace distance between ``floor_map(q, probe)`` and the reference outputs."""
    diff = floor_batch(q, probes) - reference
    diff = 0.5 * (diff + np.conj(np.swapaxes(diff, 1, 2)))
    dists = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff)), axis=1)
    arg = int(np.argmax(dists))
    return float(dists[arg]), arg


def map_distance(p: Procedure, q: Procedure) -> float:
    """Distance between the system maps of two procedures on the spanning states."""
    if p.dim_s != q.dim_s:
        raise ValidationError("procedures act on systems of different dimension")
    probes = np.array(spanning_states(p.dim_s))
    return _map_violation(q, probes, floor_batch(p, probes))[0]


def is_repeatable(p: Procedure, tol: float = REPEAT_TOL, mode: str = "exact",
                  n_samples: int = 24, seed: int = 0) -> RepeatabilityReport:
    """Decide whether one repetition without resetting the environment changes the map.

    Both sides of the repeatability condition are linear in the first and in
    the second system state, so in ``"exact"`` mode checking every pair of
    spanning states settles it for all states.  ``"sample"`` mode draws
    ``n_samples`` random states per slot instead.
    """
    rng = np.random.default_rng(seed)
    firsts = _probe_states(p.dim_s, mode, rng, n_samples)
    probes = np.array(_probe_states(p.dim_s, mode, rng, n_samples))
    reference = floor_batch(p, probes)
    worst, witness = 0.0, None
    for rho in firsts:
        v, k = _map_violation(advance_environment(p, rho), probes, reference)
        if witness is None or v > worst:
            worst, witness = v, (rho, probes[k])
    ok = worst <= tol
    return RepeatabilityReport(
        repeatable=ok,
        max_violation=worst,
        witness_pair=None if ok else (_as_witness(witness[0]), _as_witness(witness[1])),
        depth=1,
    )


def is_repeatable_to_depth(p: Procedure, n: int, tol: float = REPEAT_TOL, seed: int = 0,
                           n_random: int = RANDOM_SEQUENCES) -> RepeatabilityReport:
    """Check the map is unchanged after every sequence of up to ``n`` applications.

    The environment after ``m`` applications is multilinear in the ``m`` system
    states, so depths 1 and 2 run over all spanning-state sequences (6 and 36
    for a qubit).  Deeper levels use ``n_random`` seeded random sequences of
    length ``n``, checked after every step from 3 on.  Stops at the first
    failing depth.
    """
    if n < 1:
        raise ValueError("depth must be at least 1")
    rng = np.random.default_rng(seed)
    probes = np.array(spanning_states(p.dim_s))
    reference = floor_batch(p, probes)
    worst = 0.0

    def report(depth, violation, seq, probe_k):
        ok = violation <= tol
        return RepeatabilityReport(
            repeatable=ok,
            max_violation=violation,
            witness_pair=None if ok else (_as_witness(seq[-1]), _as_witness(probes[probe_k])),
            depth=depth,
            witness_sequence=None if ok else tuple(_as_witness(r) for r in seq),
        )

    frontier = [(p, ())]
    for depth in range(1, min(n, 2) + 1):
        nxt = []
        for q, seq in frontier:
            for rho in probes:
                q2 = advance_environment(q, rho)
                seq2 = seq + (rho,)
                v, k = _map_violation(q2, probes, reference)
                worst = max(worst, v)
                if v > tol:
                    return report(depth, worst, seq2, k)
                nxt.append((q2, seq2))
        frontier = nxt

    if n >= 3:
        failure = None
        for _ in range(n_random):
            if p.dim_s == 2:
                seq = [bloch_to_density(random_bloch(rng, pure=True)) for _ in range(n)]
            else:
                seq = [random_density(p.dim_s, rng) for _ in range(n)]
            for depth, q in enumerate(iterate_environment(p, seq), start=1):
                if depth < 3:
                    continue
                v, k = _map_violation(q, probes, reference)
                worst = max(worst, v)
                if v > tol and (failure is None or depth < failure[0]):
                    failure = (depth, tuple(seq[:depth]), k)
                    break
        if failure is not None:
            return report(failure[0], worst, failure[1], failure[2])

    return report(n, worst, (), 0)


def repetition_drift(p: Procedure, rho_sequence: Sequence[np.ndarray]) -> List[float]:
    """Distance of the induced map from the original one after each application."""
    return [map_distance(p, q) for q in iterate_environment(p, rho_sequence)]
