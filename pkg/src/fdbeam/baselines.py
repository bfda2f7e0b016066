"""Comparison schemes: SVD precoding with MMSE combining (interference
oblivious), OMP and rank-one greedy factorizations of a fully-digital
solution into analog/baseband stages, and phase-shifter quantization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .digital import DigitalBeamformers
from .exceptions import InfeasibleError
from .projector import CaSubspaceSpec, ca_project

_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class QuantizerSpec:
    """Phase-shifter resolution in bits."""

    bits: int

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("quantizer resolution must be >= 1 bit")


def svd_mmse_design(channels: ChannelSet, ns: int, tau: float,
                    sigma_sq: float) -> DigitalBeamformers:
    """SVD precoders and linear MMSE combiners that ignore the ZF constraint.

    Each precoder takes the top-ns right singular vectors of its outgoing
    link channel; each combiner is T^-1 H F with T the pre-combining
    interference-plus-noise covariance sigma^2 I + tau (H_si F)(H_si F)^H.
    The SI is deliberately not nulled.  Raises InfeasibleError when a link
    channel has rank below ns.
    """
    def top_right(h):
        _, s, vh = np.linalg.svd(h)
        if np.sum(s > _RANK_RTOL * s[0]) < ns:
            raise InfeasibleError(f"link channel rank below ns={ns}")
        return vh[:ns].conj().T

    f1 = top_right(channels.h12)  # node 1 transmits over h12
    f2 = top_right(channels.h21)

    def mmse(h_link, f_link, h_si, f_si):
        n_r = h_link.shape[0]
        leak = h_si @ f_si
        t = sigma_sq * np.eye(n_r) + tau * (leak @ leak.conj().T)
        return np.linalg.solve(t, h_link @ f_link)

    w1 = mmse(channels.h21, f2, channels.h11, f1)
    w2 = mmse(channels.h12, f1, channels.h22, f2)
    root_ns = np.sqrt(ns)

    def scaled(m):
        return m * (root_ns / np.linalg.norm(m))

    return DigitalBeamformers(f1=scaled(f1), f2=scaled(f2),
                              w1=scaled(w1), w2=scaled(w2))


def _ls_fit(analog: np.ndarray, full: np.ndarray) -> np.ndarray:
    """Least-squares baseband for the chosen analog columns."""
    return np.linalg.lstsq(analog, full, rcond=None)[0]


def omp_split(full: np.ndarray, dictionary: np.ndarray,
              n_rf: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal matching pursuit over a steering dictionary.

    Per round: pick the dictionary column best correlated with the
    residual, least-squares refit the baseband, update the residual.  The
    selected columns are then CA-projected (modulus 1/sqrt(N)) and the
    baseband rescaled to ||.||_F^2 = N_s.
    """
    n, ns = full.shape
    if n_rf > dictionary.shape[1]:
        raise ValueError("n_rf exceeds the dictionary size")
    picked: list[int] = []
    residual = full.copy()
    for _ in range(n_rf):
        corr = np.linalg.norm(dictionary.conj().T @ residual, axis=1)
        corr[picked] = -1.0  # never reselect a column
        picked.append(int(np.argmax(corr)))
        sel = dictionary[:, picked]
        residual = full - sel @ _ls_fit(sel, full)
    analog = np.asarray(ca_project(dictionary[:, picked], CaSubspaceSpec(1 / np.sqrt(n))))
    baseband = _ls_fit(analog, full)
    baseband *= np.sqrt(ns) / np.linalg.norm(baseband)
    return analog, baseband


def greedy_split(full: np.ndarray, n_rf: int) -> tuple[np.ndarray, np.ndarray]:
    """Rank-one greedy factorization: CA-project the dominant left singular
    vector of the residual to form each analog column, least-squares refit,
    repeat."""
    if n_rf < 1:
        raise ValueError("n_rf must be >= 1")
    n, ns = full.shape
    ca = CaSubspaceSpec(1 / np.sqrt(n))
    analog = np.zeros((n, 0), dtype=complex)
    residual = full.copy()
    for _ in range(n_rf):
        u, _, _ = np.linalg.svd(residual)
        col = np.asarray(ca_project(u[:, 0], ca)).reshape(-1, 1)
        analog = np.concatenate([analog, col], axis=1)
        residual = full - analog @ _ls_fit(analog, full)
    baseband = _ls_fit(analog, full)
    baseband *= np.sqrt(ns) / np.linalg.norm(baseband)
    return analog, baseband


def quantize_phases(analog: np.ndarray, spec: QuantizerSpec) -> np.ndarray:
    """Round each entry's phase to the nearest multiple of 2*pi/2^bits,
    breaking ties toward the smaller multiple; moduli are preserved."""
    step = 2.0 * np.pi / (2 ** spec.bits)
    idx = np.ceil(np.angle(analog) / step - 0.5)  # ties go to the lower index
    return np.abs(analog) * np.exp(1j * step * idx)
