"""Optimization kernels shared by the beamformer solvers: null-space
(zero-forcing) projection, constant-amplitude projection, the cyclic ZF
maximization, and the nested alternating-projection loop that combines all
three.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateStartError

# Singular values below this fraction of the largest are treated as zero
# when forming the null-space projector (near-collinear constraint columns
# must not blow up the pseudo-inverse).
_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class ZfConstraint:
    """Directions to be zeroed: the solution z must satisfy null_basis^H z = 0.

    A matrix with zero columns (or an all-zero matrix) is an empty
    constraint; projection is then the identity.
    """

    null_basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.null_basis)
        if a.ndim != 2:
            raise ValueError("null_basis must be a 2-D matrix")
        if a.size and not np.all(np.isfinite(a.view(float))):
            raise ValueError("null_basis entries must be finite")

    @property
    def is_empty(self) -> bool:
        return self.null_basis.size == 0 or not np.any(self.null_basis)


@dataclass(frozen=True)
class CaSubspaceSpec:
    """Constant-amplitude set: every entry must have the given modulus."""

    entry_magnitude: float

    def __post_init__(self):
        if self.entry_magnitude <= 0:
            raise ValueError("entry magnitude must be positive")


@dataclass(frozen=True)
class ApResult:
    """Outcome of one alternating-projection run."""

    vector: np.ndarray = field(repr=False)
    residual: float
    objective: float
    qualified: bool  # residual reached the qualification threshold
    # best-so-far objective after each outer cycle; non-decreasing by construction
    objective_trace: tuple[float, ...] = ()


def _range_basis(a: np.ndarray) -> np.ndarray | None:
    """Orthonormal basis of the numerically significant column span of a."""
    if a.size == 0 or not np.any(a):
        return None
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    keep = s > _RANK_RTOL * s[0]
    if not keep.any():
        return None
    return np.ascontiguousarray(u[:, keep])


def zf_project(beta: np.ndarray, constraint: ZfConstraint) -> np.ndarray:
    """Orthogonal projection of beta onto the null space of constraint^H.

    Implements (I - A (A^H A)^+ A^H) beta through a rank-revealing SVD; for
    a single constraint column this reduces to (I - a a^H / ||a||^2) beta.
    An empty (or all-zero) constraint returns beta unchanged.
    """
    basis = _range_basis(constraint.null_basis)
    if basis is None:
        return np.array(beta, copy=True)
    return beta - basis @ (basis.conj().T @ beta)


def ca_project(z: np.ndarray, spec: CaSubspaceSpec) -> np.ndarray:
    """Force every entry onto the constant-amplitude set, preserving phase.

    Zero entries map to entry_magnitude * (1 + 0j) (phase 0, fixed for
    determinism).  Entries whose modulus already equals the target pass
    through unchanged.
    """
    m = spec.entry_magnitude
    z = np.asarray(z, dtype=complex)
    a = np.abs(z)
    safe = np.where(a > 0, a, 1.0)
    out = np.where(a > 0, m * (z / safe), m + 0.0j)
    return np.where(a == m, z, out)


def _residual(z: np.ndarray, basis: np.ndarray | None, a_norm: float) -> float:
    """Relative ZF residual ||A^H z|| / (||A||_F ||z||) via the range basis."""
    if basis is None or a_norm == 0.0:
        return 0.0
    nz = np.linalg.norm(z)
    if nz == 0.0:
        return 0.0
    return float(np.linalg.norm(basis.conj().T @ z) / nz)


def zf_cyclic_max(beta0: np.ndarray, constraint: ZfConstraint, tol: float = 1e-10,
                  max_iter: int = 8) -> np.ndarray:
    """Cyclic ZF maximization of |z^H beta|^2 subject to constraint^H z = 0.

    Iterates z <- P_zf z from z = beta0 until the relative change drops
    below tol (one pass suffices: the projector is idempotent, kept
    iterative per the update's stated form).  The result is normalized to
    unit norm.  Raises DegenerateStartError when beta0 lies entirely inside
    the constraint span, in which case the caller should reseed.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    basis = _range_basis(constraint.null_basis)
    z = np.array(beta0, dtype=complex, copy=True)
    b_norm = np.linalg.norm(z)
    if b_norm == 0.0:
        raise DegenerateStartError("start vector is zero")
    for _ in range(max_iter):
        z_next = z if basis is None else z - basis @ (basis.conj().T @ z)
        step = np.linalg.norm(z_next - z)
        z = z_next
        if step <= tol * max(np.linalg.norm(z), 1e-300):
            break
    n = np.linalg.norm(z)
    if n <= 1e-12 * b_norm:
        raise DegenerateStartError("start vector lies in the constraint span")
    return z / n


def alternating_zf_ca(beta0: np.ndarray, constraint: ZfConstraint,
                      ca: CaSubspaceSpec, gain: np.ndarray,
                      inner_iter: int = 6, outer_iter: int = 150,
                      tol: float = 1e-6, gain_cycles: int = 15,
                      qualify_residual: float = 1e-5) -> ApResult:
    """Nested alternating projections for the constant-amplitude sub-problems.

    Maximizes the power objective ||gain @ z||^2 over the intersection of
    the ZF null space and the constant-amplitude set.  Each outer cycle
    projects onto the ZF null space; the first gain_cycles cycles run
    inner_iter power-iteration updates (each immediately re-projected onto
    the CA set, a monotone ascent step for the projected quadratic form),
    after which the loop degenerates to plain ZF/CA alternating projection
    that drives the residual toward the intersection.

    Every outer cycle ends on a CA-feasible iterate; the best one by
    objective among those with relative ZF residual <= qualify_residual is
    retained (best-so-far, monotone by construction).  If none qualifies
    within the budget, the minimum-residual iterate is returned instead;
    non-convergence is reported through the residual, never an exception.
    """
    if inner_iter < 1 or outer_iter < 1:
        raise ValueError("iteration counts must be >= 1")
    basis = _range_basis(constraint.null_basis)
    a_norm = float(np.linalg.norm(constraint.null_basis)) if constraint.null_basis.size else 0.0

    def proj(v):
        return v if basis is None else v - basis @ (basis.conj().T @ v)

    gain_h = gain.conj().T

    def objective(v):
        return float(np.linalg.norm(gain @ v) ** 2)

    z = np.array(beta0, dtype=complex, copy=True)
    n0 = np.linalg.norm(z)
    z = ca_project(z if n0 == 0 else z / n0, ca)

    best: np.ndarray | None = None
    best_obj = -np.inf
    min_res = np.inf
    min_res_z = z
    prev_obj = None
    trace: list[float] = []
    for k in range(outer_iter):
        z = proj(z)
        if np.linalg.norm(z) < 1e-14:
            # projection annihilated the iterate; restart from the CA'd seed
            z = ca_project(np.array(beta0, dtype=complex), ca)
        if k < gain_cycles:
            for _ in range(inner_iter):
                y = proj(gain_h @ (gain @ z))
                if np.linalg.norm(y) < 1e-14:
                    break
                z = ca_project(y, ca)
        else:
            z = ca_project(z, ca)
        res = _residual(z, basis, a_norm)
        obj = objective(z)
        if res < min_res:
            min_res, min_res_z = res, z.copy()
        if res <= qualify_residual and obj > best_obj:
            best, best_obj = z.copy(), obj
        if best is not None:
            trace.append(best_obj)  # best-so-far: non-decreasing by construction
        in_polish = k >= gain_cycles
        converged = prev_obj is not None and abs(obj - prev_obj) <= tol * max(1.0, abs(prev_obj))
        if in_polish and converged and res <= qualify_residual:
            break
        prev_obj = obj
    if best is None:
        # the qualification threshold was never reached: report the deepest
        # iterate and its residual honestly rather than failing
        return ApResult(vector=min_res_z, residual=min_res,
                        objective=objective(min_res_z), qualified=False)
    return ApResult(vector=best, residual=_residual(best, basis, a_norm),
                    objective=best_obj, qualified=True, objective_trace=tuple(trace))
