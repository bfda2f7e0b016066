"""Rate and SINR evaluation: the fully-digital, analog-domain, and hybrid
sum rates, the interference-free upper bound, the interference-plus-noise
covariance, and the aggregate SINR used for the CDF experiments.

Rates are reported in bits/s/Hz (log base 2).  Power semantics: SNR = rho /
sigma^2 and INR = tau / sigma^2; with the channel normalizations of this
library (E||H||_F^2 = N_t N_r) these are per-link averages relative to the
noise floor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import NumericDegeneracyError

if TYPE_CHECKING:
    from .channel import ChannelSet
    from .digital import DigitalBeamformers
    from .hybrid import AnalogStage, HybridBeamformers


@dataclass(frozen=True)
class LinkPowers:
    """Linear received signal/SI powers and noise variances per node."""

    rho1: float
    rho2: float
    tau1: float
    tau2: float
    sigma1_sq: float
    sigma2_sq: float

    def __post_init__(self):
        for name in ("rho1", "rho2", "tau1", "tau2", "sigma1_sq", "sigma2_sq"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @classmethod
    def from_db(cls, snr_db: float, inr_db: float, sigma_sq: float = 1.0) -> "LinkPowers":
        """Symmetric powers from an SNR/INR operating point in dB."""
        rho = sigma_sq * 10.0 ** (snr_db / 10.0)
        tau = sigma_sq * 10.0 ** (inr_db / 10.0)
        return cls(rho1=rho, rho2=rho, tau1=tau, tau2=tau,
                   sigma1_sq=sigma_sq, sigma2_sq=sigma_sq)


@dataclass(frozen=True)
class RateReport:
    """Per-node and total rates plus the per-stream linear SINRs."""

    rate_node1: float
    rate_node2: float
    per_stream_sinr: tuple[float, ...]
    sum: float = field(init=False)

    def __post_init__(self):
        if self.rate_node1 < -1e-12 or self.rate_node2 < -1e-12:
            raise ValueError("rates must be non-negative")
        object.__setattr__(self, "sum", self.rate_node1 + self.rate_node2)


def noise_variance_dbm(bandwidth_hz: float) -> float:
    """Thermal noise power in dBm: -173.8 + 10 log10(bandwidth)."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    return -173.8 + 10.0 * np.log10(bandwidth_hz)


def covariance_t(w: np.ndarray, f_si: np.ndarray, h_si: np.ndarray,
                 tau: float, sigma_sq: float) -> np.ndarray:
    """Interference-plus-noise autocovariance after combining:

    T = sigma^2 W^H W + tau (W^H H_si F_si)(W^H H_si F_si)^H
    """
    leak = w.conj().T @ h_si @ f_si
    t = sigma_sq * (w.conj().T @ w) + tau * (leak @ leak.conj().T)
    return 0.5 * (t + t.conj().T)  # enforce exact Hermitian symmetry


def _direction_rate(g: np.ndarray, t: np.ndarray, prefactor: float) -> tuple[float, list[float]]:
    """log2 det(I + prefactor T^-1 G G^H) and the per-stream linear SINRs.

    Computed as logdet(T + prefactor G G^H) - logdet(T) through Cholesky
    factorizations; a singular T raises, it is never regularized.
    """
    try:
        l0 = np.linalg.cholesky(t)
    except np.linalg.LinAlgError as exc:
        raise NumericDegeneracyError("interference-plus-noise covariance is singular") from exc
    gg = g @ g.conj().T
    t1 = t + prefactor * gg
    t1 = 0.5 * (t1 + t1.conj().T)
    try:
        l1 = np.linalg.cholesky(t1)
    except np.linalg.LinAlgError as exc:
        raise NumericDegeneracyError("signal-plus-interference covariance is singular") from exc
    logdet0 = 2.0 * np.sum(np.log(np.abs(np.diag(l0))))
    logdet1 = 2.0 * np.sum(np.log(np.abs(np.diag(l1))))
    rate = max((logdet1 - logdet0) / np.log(2.0), 0.0)
    sinrs = np.linalg.eigvals(np.linalg.solve(t, prefactor * gg)).real
    sinrs = np.sort(np.clip(sinrs, 0.0, None))[::-1]
    return float(rate), [float(s) for s in sinrs]


def sum_rate_digital(beams: "DigitalBeamformers", channels: "ChannelSet",
                     powers: LinkPowers) -> RateReport:
    """Fully-digital sum rate, treating residual SI as noise."""
    ns = beams.f1.shape[1]
    t1 = covariance_t(beams.w1, beams.f1, channels.h11, powers.tau1, powers.sigma1_sq)
    g1 = beams.w1.conj().T @ channels.h21 @ beams.f2
    r1, s1 = _direction_rate(g1, t1, powers.rho1 / ns)
    t2 = covariance_t(beams.w2, beams.f2, channels.h22, powers.tau2, powers.sigma2_sq)
    g2 = beams.w2.conj().T @ channels.h12 @ beams.f1
    r2, s2 = _direction_rate(g2, t2, powers.rho2 / ns)
    return RateReport(rate_node1=r1, rate_node2=r2, per_stream_sinr=tuple(s1 + s2))


def sum_rate_analog(analog: "AnalogStage", channels: "ChannelSet",
                    powers: LinkPowers, n_rf: int) -> RateReport:
    """Analog-domain sum rate over the effective channels W_RF^H H F_RF,
    with the power split across the N_RF chains."""
    if n_rf != analog.f_rf1.shape[1]:
        raise ValueError("n_rf does not match the analog beamformer width")
    t1 = covariance_t(analog.w_rf1, analog.f_rf1, channels.h11, powers.tau1, powers.sigma1_sq)
    g1 = analog.w_rf1.conj().T @ channels.h21 @ analog.f_rf2
    r1, s1 = _direction_rate(g1, t1, powers.rho1 / n_rf)
    t2 = covariance_t(analog.w_rf2, analog.f_rf2, channels.h22, powers.tau2, powers.sigma2_sq)
    g2 = analog.w_rf2.conj().T @ channels.h12 @ analog.f_rf1
    r2, s2 = _direction_rate(g2, t2, powers.rho2 / n_rf)
    return RateReport(rate_node1=r1, rate_node2=r2, per_stream_sinr=tuple(s1 + s2))


def sum_rate_hybrid(hybrid: "HybridBeamformers", channels: "ChannelSet",
                    powers: LinkPowers, ns: int) -> RateReport:
    """Hybrid sum rate over the doubly-effective channels W_BB^H (W_RF^H H
    F_RF) F_BB, with the noise colored by the cascaded combiner."""
    if ns != hybrid.f_bb1.shape[1]:
        raise ValueError("ns does not match the baseband beamformer width")
    q1 = hybrid.w_rf1 @ hybrid.w_bb1
    q2 = hybrid.w_rf2 @ hybrid.w_bb2
    p1 = hybrid.f_rf1 @ hybrid.f_bb1
    p2 = hybrid.f_rf2 @ hybrid.f_bb2
    t1 = covariance_t(q1, p1, channels.h11, powers.tau1, powers.sigma1_sq)
    g1 = q1.conj().T @ channels.h21 @ p2
    r1, s1 = _direction_rate(g1, t1, powers.rho1 / ns)
    t2 = covariance_t(q2, p2, channels.h22, powers.tau2, powers.sigma2_sq)
    g2 = q2.conj().T @ channels.h12 @ p1
    r2, s2 = _direction_rate(g2, t2, powers.rho2 / ns)
    return RateReport(rate_node1=r1, rate_node2=r2, per_stream_sinr=tuple(s1 + s2))


def upper_bound(channels: "ChannelSet", powers: LinkPowers, ns: int) -> float:
    """Interference-free capacity bound from the top singular values:

    sum_n log2(1 + rho/(N_s sigma^2) lambda_n^2) over both directions.
    """
    s21 = np.linalg.svd(channels.h21, compute_uv=False)
    s12 = np.linalg.svd(channels.h12, compute_uv=False)
    if ns > min(s21.size, s12.size):
        raise ValueError("ns exceeds the channel dimension")
    b1 = np.sum(np.log2(1.0 + powers.rho1 / (ns * powers.sigma1_sq) * s21[:ns] ** 2))
    b2 = np.sum(np.log2(1.0 + powers.rho2 / (ns * powers.sigma2_sq) * s12[:ns] ** 2))
    return float(b1 + b2)


def sinr_aggregate(w: np.ndarray, f_link: np.ndarray, f_si: np.ndarray,
                   h_link: np.ndarray, h_si: np.ndarray, powers: LinkPowers,
                   node: int = 1) -> float:
    """Aggregate linear SINR at the receive node whose combiner is w:

    rho ||W^H H_link F_link||_F^2 / (sigma^2 ||W||_F^2 + tau ||W^H H_si F_si||_F^2)
    """
    if node == 1:
        rho, tau, sig = powers.rho1, powers.tau1, powers.sigma1_sq
    elif node == 2:
        rho, tau, sig = powers.rho2, powers.tau2, powers.sigma2_sq
    else:
        raise ValueError("node must be 1 or 2")
    sig_pow = np.linalg.norm(w.conj().T @ h_link @ f_link) ** 2
    si_pow = np.linalg.norm(w.conj().T @ h_si @ f_si) ** 2
    w_pow = np.linalg.norm(w) ** 2
    return float(rho * sig_pow / (sig * w_pow + tau * si_pow))
