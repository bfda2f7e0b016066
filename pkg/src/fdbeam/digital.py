"""Fully-digital ZF-max-power design: alternating per-column cyclic
maximization for the precoders and combiners of both nodes, with the
self-interference forced into the combiner/precoder null spaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSet
from .exceptions import DegenerateStartError, InfeasibleError
from .metrics import LinkPowers, sum_rate_digital
from .projector import ZfConstraint, zf_cyclic_max

_DEGENERATE_RETRIES = 8


@dataclass(frozen=True)
class DigitalBeamformers:
    """Fully-digital precoders (N_t x N_s) and combiners (N_r x N_s).

    At solver exit ||F_u||_F^2 = ||W_u||_F^2 = N_s and W_u^H H_uu F_u = 0
    up to numerical precision.
    """

    f1: np.ndarray = field(repr=False)
    f2: np.ndarray = field(repr=False)
    w1: np.ndarray = field(repr=False)
    w2: np.ndarray = field(repr=False)


def _design_columns(target: np.ndarray, si_block: np.ndarray, ns: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Design ns columns one by one: matched-filter start, ZF projection
    against the SI block plus all previously designed columns (deflation,
    which keeps the columns orthonormal and the matrix rank ns)."""
    n = target.shape[0]
    cols = np.zeros((n, ns), dtype=complex)
    for i in range(ns):
        constraint = ZfConstraint(np.concatenate([si_block, cols[:, :i]], axis=1))
        beta = target[:, i]
        for _ in range(_DEGENERATE_RETRIES):
            try:
                cols[:, i] = zf_cyclic_max(beta, constraint)
                break
            except DegenerateStartError:
                beta = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        else:
            raise InfeasibleError(
                f"no direction left for column {i}: the post-ZF subspace is exhausted")
    return cols


def solve_p1(channels: ChannelSet, ns: int, tol: float = 1e-6,
             max_outer: int = 50, rng: np.random.Generator | None = None) -> DigitalBeamformers:
    """Solve the fully-digital ZF-max-power problem for both nodes.

    Alternates the four per-matrix sub-problems (W1, W2, then F1, F2 in the
    order they are posed), each solved column-wise by cyclic maximization
    with the matched effective-channel column as start.  The outer loop
    stops when the sum-rate objective (evaluated at canonical powers, the
    SI term being nulled by construction) changes by less than tol, or
    decreases, in which case the best iterate is restored.

    Raises InfeasibleError when ns cannot fit in the post-ZF subspace.
    """
    if rng is None:
        rng = np.random.default_rng()
    if max_outer < 1:
        raise ValueError("max_outer must be >= 1")
    nr1, nt2 = channels.h21.shape
    nr2, nt1 = channels.h12.shape
    if ns > min(nr1, nr2, nt1, nt2):
        raise InfeasibleError(f"ns={ns} exceeds the smallest antenna count")

    def gaussian_cols(n):
        g = rng.standard_normal((n, ns)) + 1j * rng.standard_normal((n, ns))
        return g / np.linalg.norm(g, axis=0)

    f1, f2 = gaussian_cols(nt1), gaussian_cols(nt2)
    w1 = np.zeros((nr1, ns), dtype=complex)
    w2 = np.zeros((nr2, ns), dtype=complex)
    # canonical powers for the stopping objective: rho/ns = sigma^2 = 1,
    # tau arbitrary since the ZF constraint holds after every half-cycle
    canon = LinkPowers(rho1=ns, rho2=ns, tau1=0.0, tau2=0.0,
                       sigma1_sq=1.0, sigma2_sq=1.0)

    best: tuple[np.ndarray, ...] | None = None
    best_val = -np.inf
    prev_val = None
    for _ in range(max_outer):
        w1 = _design_columns(channels.h21 @ f2, channels.h11 @ f1, ns, rng)
        w2 = _design_columns(channels.h12 @ f1, channels.h22 @ f2, ns, rng)
        f1 = _design_columns(channels.h12.conj().T @ w2, channels.h11.conj().T @ w1, ns, rng)
        f2 = _design_columns(channels.h21.conj().T @ w1, channels.h22.conj().T @ w2, ns, rng)
        val = sum_rate_digital(DigitalBeamformers(f1=f1, f2=f2, w1=w1, w2=w2),
                               channels, canon).sum
        if val > best_val:
            best_val = val
            best = (f1.copy(), f2.copy(), w1.copy(), w2.copy())
        if prev_val is not None and (val < prev_val
                                     or abs(val - prev_val) <= tol * max(1.0, abs(prev_val))):
            break
        prev_val = val
    f1, f2, w1, w2 = best
    root_ns = np.sqrt(ns)
    return DigitalBeamformers(
        f1=f1 * (root_ns / np.linalg.norm(f1)),
        f2=f2 * (root_ns / np.linalg.norm(f2)),
        w1=w1 * (root_ns / np.linalg.norm(w1)),
        w2=w2 * (root_ns / np.linalg.norm(w2)),
    )


def si_residual(w: np.ndarray, h_si: np.ndarray, f: np.ndarray) -> float:
    """Relative SI leakage ||W^H H_si F||_F / (||W||_F ||H_si||_F ||F||_F)."""
    denom = np.linalg.norm(w) * np.linalg.norm(h_si) * np.linalg.norm(f)
    if denom == 0:
        return 0.0
    return float(np.linalg.norm(w.conj().T @ h_si @ f) / denom)
