"""Hybrid beamforming design: constant-amplitude analog stages via nested
alternating projections, then closed-form baseband stages over the RF
chains.  SI cancellation happens entirely in the analog domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .channel import ChannelSet
from .digital import si_residual
from .exceptions import DegenerateStartError, InfeasibleError
from .metrics import LinkPowers, sum_rate_hybrid
from .projector import CaSubspaceSpec, ZfConstraint, alternating_zf_ca, ca_project

if TYPE_CHECKING:
    from .config import SimConfig


@dataclass(frozen=True)
class AnalogSolverParams:
    """Iteration budgets for the analog alternating-projection design.

    outer_iter bounds the per-column projection cycles; the final precoder
    pass gets final_outer_iter because those columns carry the exit SI
    residual.  Residuals at or below qualify_residual count as cancelled
    when picking the best iterate.
    """

    passes: int = 2
    inner_iter: int = 6
    gain_cycles: int = 15
    outer_iter: int = 160
    final_outer_iter: int = 800
    tol: float = 1e-6
    qualify_residual: float = 1e-5


@dataclass(frozen=True)
class AnalogStage:
    """Constant-amplitude analog precoders/combiners (entries of modulus
    1/sqrt(N_t) resp. 1/sqrt(N_r), so ||.||_F^2 = N_RF)."""

    f_rf1: np.ndarray = field(repr=False)
    f_rf2: np.ndarray = field(repr=False)
    w_rf1: np.ndarray = field(repr=False)
    w_rf2: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class AnalogReport:
    """Residual diagnostics of one analog design run."""

    residual_node1: float
    residual_node2: float
    column_residuals: tuple[float, ...]
    all_qualified: bool


@dataclass(frozen=True)
class BasebandStage:
    """Baseband precoders/combiners over the RF chains (||.||_F^2 = N_s)."""

    f_bb1: np.ndarray = field(repr=False)
    f_bb2: np.ndarray = field(repr=False)
    w_bb1: np.ndarray = field(repr=False)
    w_bb2: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class HybridBeamformers:
    """Analog + baseband cascade for both nodes."""

    f_rf1: np.ndarray = field(repr=False)
    f_rf2: np.ndarray = field(repr=False)
    w_rf1: np.ndarray = field(repr=False)
    w_rf2: np.ndarray = field(repr=False)
    f_bb1: np.ndarray = field(repr=False)
    f_bb2: np.ndarray = field(repr=False)
    w_bb1: np.ndarray = field(repr=False)
    w_bb2: np.ndarray = field(repr=False)

    @property
    def analog(self) -> AnalogStage:
        return AnalogStage(f_rf1=self.f_rf1, f_rf2=self.f_rf2,
                           w_rf1=self.w_rf1, w_rf2=self.w_rf2)


def identity_baseband(n_rf: int, ns: int) -> BasebandStage:
    """Pass-through baseband (first ns RF chains); its Frobenius norm
    already satisfies the ns constraint, so the hybrid rate evaluated with
    it is the analog-only rate."""
    eye = np.eye(n_rf, dtype=complex)[:, :ns]
    return BasebandStage(f_bb1=eye.copy(), f_bb2=eye.copy(),
                         w_bb1=eye.copy(), w_bb2=eye.copy())


def _ca_top_directions(h: np.ndarray, n_cols: int, ca: CaSubspaceSpec) -> np.ndarray:
    """CA projection of the top right singular vectors: the starting analog
    precoder aims each RF chain at one dominant transmit direction."""
    _, _, vh = np.linalg.svd(h)
    return np.asarray(ca_project(vh[:n_cols].conj().T, ca))


def _design_ca_columns(target: np.ndarray, si_block: np.ndarray, current: np.ndarray,
                       warm: bool, ca: CaSubspaceSpec, params: AnalogSolverParams,
                       outer_iter: int, residuals: list[float],
                       qualified: list[bool]) -> np.ndarray:
    """One analog matrix, column by column.  The ZF constraint stacks the
    SI block with the already-designed columns (deflation); the power
    objective is the Frobenius gain onto the matched link product."""
    n, n_cols = current.shape
    gain = target.conj().T
    cols = np.zeros((n, n_cols), dtype=complex)
    for i in range(n_cols):
        basis = np.concatenate([si_block, cols[:, :i]], axis=1)
        beta0 = current[:, i] if warm else target[:, i]
        if not np.any(beta0):
            beta0 = target[:, i] if np.any(target[:, i]) else np.ones(n, dtype=complex)
        result = alternating_zf_ca(
            beta0, ZfConstraint(basis), ca, gain,
            inner_iter=params.inner_iter, outer_iter=outer_iter,
            tol=params.tol, gain_cycles=params.gain_cycles,
            qualify_residual=params.qualify_residual)
        cols[:, i] = result.vector
        residuals.append(result.residual)
        qualified.append(result.qualified)
    return cols


def solve_p2_analog(channels: ChannelSet, n_rf: int,
                    params: AnalogSolverParams | None = None,
                    rng: np.random.Generator | None = None
                    ) -> tuple[AnalogStage, AnalogReport]:
    """Design the four analog matrices under the CA and effective-SI-ZF
    constraints.

    Every column comes from the nested alternating-projection loop with the
    matched effective-channel column as start.  Matrices alternate in the
    order W1, W2, F1, F2 for a configured number of passes; from the second
    pass on each column warm-starts from its previous value, and the final
    precoder pass runs the deepest projection budget since those columns
    set the exit residual.  Per-column residuals are reported, never
    asserted to be zero.
    """
    del rng  # deterministic: SVD-seeded starts need no randomness
    params = params or AnalogSolverParams()
    nr1, nt2 = channels.h21.shape
    nr2, nt1 = channels.h12.shape
    if n_rf > min(nr1, nr2, nt1, nt2):
        raise InfeasibleError(f"n_rf={n_rf} exceeds the smallest antenna count")
    ca_t1, ca_t2 = CaSubspaceSpec(1 / np.sqrt(nt1)), CaSubspaceSpec(1 / np.sqrt(nt2))
    ca_r1, ca_r2 = CaSubspaceSpec(1 / np.sqrt(nr1)), CaSubspaceSpec(1 / np.sqrt(nr2))

    f1 = _ca_top_directions(channels.h12, n_rf, ca_t1)
    f2 = _ca_top_directions(channels.h21, n_rf, ca_t2)
    w1 = np.zeros((nr1, n_rf), dtype=complex)
    w2 = np.zeros((nr2, n_rf), dtype=complex)

    residuals: list[float] = []
    qualified: list[bool] = []
    for p in range(params.passes):
        warm = p > 0
        final = p == params.passes - 1
        f_budget = params.final_outer_iter if final else params.outer_iter
        w1 = _design_ca_columns(channels.h21 @ f2, channels.h11 @ f1, w1, warm,
                                ca_r1, params, params.outer_iter, residuals, qualified)
        w2 = _design_ca_columns(channels.h12 @ f1, channels.h22 @ f2, w2, warm,
                                ca_r2, params, params.outer_iter, residuals, qualified)
        f1 = _design_ca_columns(channels.h12.conj().T @ w2, channels.h11.conj().T @ w1,
                                f1, warm, ca_t1, params, f_budget, residuals, qualified)
        f2 = _design_ca_columns(channels.h21.conj().T @ w1, channels.h22.conj().T @ w2,
                                f2, warm, ca_t2, params, f_budget, residuals, qualified)

    stage = AnalogStage(f_rf1=f1, f_rf2=f2, w_rf1=w1, w_rf2=w2)
    report = AnalogReport(
        residual_node1=si_residual(w1, channels.h11, f1),
        residual_node2=si_residual(w2, channels.h22, f2),
        column_residuals=tuple(residuals),
        all_qualified=all(qualified),
    )
    return stage, report


def solve_p3_digital(channels: ChannelSet, analog: AnalogStage, ns: int,
                     tol: float = 1e-6, max_iter: int = 30,
                     powers: LinkPowers | None = None) -> BasebandStage:
    """Baseband design over the RF chains by the four closed-form
    matched-product updates, iterated until the hybrid sum rate stops
    improving.

    Candidates are snapshotted right after the combiner half-cycle, so in
    every retained state the stored combiners are exactly the closed-form
    matched products of the stored precoders.  Two precoder starts are
    explored: the pass-through identity and the top singular vectors of the
    effective channels (which spread power evenly over the strongest
    streams); the best candidate by hybrid rate wins, with the plain
    identity baseband as a final fallback so the result never rates below
    the analog-only point.  Raises DegenerateStartError when the analog
    stage yields a zero effective channel (the closed forms would normalize
    a zero matrix).
    """
    n_rf = analog.f_rf1.shape[1]
    if ns > n_rf:
        raise InfeasibleError(f"ns={ns} exceeds n_rf={n_rf}")
    powers = powers or LinkPowers.from_db(snr_db=10.0, inr_db=30.0)
    eff21 = analog.w_rf1.conj().T @ channels.h21 @ analog.f_rf2
    eff12 = analog.w_rf2.conj().T @ channels.h12 @ analog.f_rf1
    if not (np.any(eff21) and np.any(eff12)):
        raise DegenerateStartError("analog stage produced a zero effective channel")
    root_ns = np.sqrt(ns)

    def rate_of(stage: BasebandStage) -> float:
        hyb = HybridBeamformers(
            f_rf1=analog.f_rf1, f_rf2=analog.f_rf2,
            w_rf1=analog.w_rf1, w_rf2=analog.w_rf2,
            f_bb1=stage.f_bb1, f_bb2=stage.f_bb2,
            w_bb1=stage.w_bb1, w_bb2=stage.w_bb2)
        return sum_rate_hybrid(hyb, channels, powers, ns).sum

    def scaled(m: np.ndarray) -> np.ndarray:
        n = np.linalg.norm(m)
        if n == 0:
            raise DegenerateStartError("baseband update normalized a zero matrix")
        return m * (root_ns / n)

    best: BasebandStage | None = None
    best_val = -np.inf

    def run_chain(f_bb1, f_bb2, iters):
        nonlocal best, best_val
        prev = None
        for _ in range(iters):
            w_bb1 = scaled(eff21 @ f_bb2)
            w_bb2 = scaled(eff12 @ f_bb1)
            cand = BasebandStage(f_bb1=f_bb1.copy(), f_bb2=f_bb2.copy(),
                                 w_bb1=w_bb1, w_bb2=w_bb2)
            val = rate_of(cand)
            if val > best_val:
                best, best_val = cand, val
            if prev is not None and abs(val - prev) <= tol * max(1.0, abs(prev)):
                break
            prev = val
            f_bb1 = scaled(eff12.conj().T @ w_bb2)
            f_bb2 = scaled(eff21.conj().T @ w_bb1)

    eye = np.eye(n_rf, dtype=complex)[:, :ns]
    run_chain(eye, eye, iters=1)
    run_chain(np.linalg.svd(eff12)[2][:ns].conj().T,
              np.linalg.svd(eff21)[2][:ns].conj().T, iters=max_iter)

    identity = identity_baseband(n_rf, ns)
    if best is None or rate_of(identity) > best_val:
        return identity
    return best


def solve_hybrid(channels: ChannelSet, config: "SimConfig",
                 rng: np.random.Generator | None = None) -> HybridBeamformers:
    """Full hybrid design: analog stage, then baseband stage, with all
    budgets and powers taken from the configuration."""
    if config.n_s > config.n_rf:
        raise InfeasibleError(f"n_s={config.n_s} exceeds n_rf={config.n_rf}")
    analog, _ = solve_p2_analog(channels, config.n_rf,
                                params=config.analog_solver_params, rng=rng)
    powers = LinkPowers.from_db(config.p3_reference_snr_db, config.si_power_db)
    bb = solve_p3_digital(channels, analog, config.n_s, tol=config.p3_tol,
                          max_iter=config.p3_max_iter, powers=powers)
    return HybridBeamformers(
        f_rf1=analog.f_rf1, f_rf2=analog.f_rf2,
        w_rf1=analog.w_rf1, w_rf2=analog.w_rf2,
        f_bb1=bb.f_bb1, f_bb2=bb.f_bb2, w_bb1=bb.w_bb1, w_bb2=bb.w_bb2)
