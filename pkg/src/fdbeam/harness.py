"""Monte Carlo harness: seeded rate sweeps over SNR, SINR CDF experiments,
and CSV/JSON emission.

Reproducibility contract: every realization gets its own counter-based
random stream (Philox) keyed by seed XOR realization index, with a domain
tag in the high key word separating channel draws from solver reseeds.
Identical (config, seed) pairs therefore produce byte-identical outputs,
and realizations may be evaluated concurrently without sharing state.

All requested schemes at a given (realization, SNR) consume exactly the
same ChannelSet; a hash of the realization's channels is recorded per
sample so the pairing is checkable after the fact.
"""

from __future__ import annotations

import hashlib
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import QuantizerSpec, greedy_split, omp_split, quantize_phases, svd_mmse_design
from .channel import ChannelSet, draw_channel_set, write_channel_dump
from .config import SimConfig
from .digital import DigitalBeamformers, solve_p1
from .exceptions import DegenerateStartError, InfeasibleError
from .geometry import ura_response_many
from .hybrid import (AnalogStage, BasebandStage, HybridBeamformers,
                     identity_baseband, solve_hybrid, solve_p2_analog,
                     solve_p3_digital)
from .metrics import LinkPowers, sinr_aggregate, sum_rate_digital, sum_rate_hybrid, upper_bound

_MASK64 = (1 << 64) - 1

# domain tags for per-realization stream derivation
DOMAIN_CHANNEL = 0
DOMAIN_SOLVER = 1
DOMAIN_SINR_BASE = 16

CSV_HEADER = "scheme,snr_db,mean_rate_bpshz,stderr,n_samples"

_QUANT_RE = re.compile(r"^hybrid_q(\d+)$")

KNOWN_SCHEMES = ("upper_bound", "digital_p1", "hybrid", "svd_mmse",
                 "omp_split", "greedy_split")


def realization_stream(seed: int, index: int, domain: int) -> np.random.Generator:
    """Counter-based stream for one realization: Philox keyed by
    (domain << 64) | (seed XOR index)."""
    key = (domain << 64) | ((seed ^ index) & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def channel_hash(chans: ChannelSet) -> str:
    """Short stable digest of one channel realization (pairing check)."""
    h = hashlib.sha256()
    for name in ("h21", "h12", "h11", "h22"):
        h.update(np.ascontiguousarray(getattr(chans, name)).tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class SweepResult:
    """Per-scheme sweep outcome: one mean/stderr per SNR point plus the
    per-realization samples behind them."""

    scheme: str
    snr_db: tuple[float, ...]
    mean_rate: tuple[float, ...]
    stderr: tuple[float, ...]
    n_samples: int
    skipped: int
    samples: np.ndarray = field(repr=False)  # (n_snr, n_samples)
    realization_hashes: tuple[str, ...] = ()


@dataclass(frozen=True)
class SinrCdfResult:
    """Empirical SINR samples (dB) for one (antenna count, SNR) pair."""

    n_antennas: int
    snr_db: float
    sinr_db: tuple[float, ...]
    skipped: int
    realization_hashes: tuple[str, ...] = ()


def parse_scheme(name: str) -> tuple[str, int | None]:
    """Split a scheme identifier into (kind, quantizer_bits)."""
    m = _QUANT_RE.match(name)
    if m:
        return "hybrid_quantized", int(m.group(1))
    if name in KNOWN_SCHEMES:
        return name, None
    raise ValueError(f"unknown scheme {name!r}")


def steering_dictionary(config: SimConfig, side: str, size: int = 64) -> np.ndarray:
    """Gridded steering-vector dictionary for the OMP split (azimuth
    uniform over [-pi, pi), elevation over the cluster support)."""
    spec = config.tx_ura if side == "tx" else config.rx_ura
    per_axis = max(int(round(np.sqrt(size))), 1)
    az = np.linspace(-np.pi, np.pi, per_axis, endpoint=False)
    el = np.linspace(np.pi / 4, 3 * np.pi / 4, per_axis)
    azg, elg = np.meshgrid(az, el, indexing="ij")
    return ura_response_many(spec, azg.ravel(), elg.ravel(), config.wavelength)


@dataclass
class _RealizationDesigns:
    """Lazily computed per-realization designs shared across schemes."""

    config: SimConfig
    chans: ChannelSet
    rng: np.random.Generator
    digital: DigitalBeamformers | None = None
    analog: AnalogStage | None = None
    baseband: BasebandStage | None = None

    def get_digital(self) -> DigitalBeamformers:
        if self.digital is None:
            self.digital = solve_p1(self.chans, self.config.n_s,
                                    tol=self.config.p1_tol,
                                    max_outer=self.config.p1_max_outer, rng=self.rng)
        return self.digital

    def get_hybrid(self) -> HybridBeamformers:
        if self.analog is None:
            self.analog, _ = solve_p2_analog(self.chans, self.config.n_rf,
                                             params=self.config.analog_solver_params,
                                             rng=self.rng)
        if self.baseband is None:
            powers = self.config.powers_at(self.config.p3_reference_snr_db)
            self.baseband = solve_p3_digital(self.chans, self.analog, self.config.n_s,
                                             tol=self.config.p3_tol,
                                             max_iter=self.config.p3_max_iter,
                                             powers=powers)
        bb = self.baseband
        a = self.analog
        return HybridBeamformers(f_rf1=a.f_rf1, f_rf2=a.f_rf2, w_rf1=a.w_rf1,
                                 w_rf2=a.w_rf2, f_bb1=bb.f_bb1, f_bb2=bb.f_bb2,
                                 w_bb1=bb.w_bb1, w_bb2=bb.w_bb2)


def _quantized_hybrid(designs: _RealizationDesigns, bits: int) -> HybridBeamformers:
    """Quantize the analog phases, then re-solve the baseband stage for the
    quantized analog matrices."""
    config = designs.config
    hyb = designs.get_hybrid()
    spec = QuantizerSpec(bits=bits)
    analog_q = AnalogStage(
        f_rf1=quantize_phases(hyb.f_rf1, spec), f_rf2=quantize_phases(hyb.f_rf2, spec),
        w_rf1=quantize_phases(hyb.w_rf1, spec), w_rf2=quantize_phases(hyb.w_rf2, spec))
    powers = config.powers_at(config.p3_reference_snr_db)
    bb = solve_p3_digital(designs.chans, analog_q, config.n_s, tol=config.p3_tol,
                          max_iter=config.p3_max_iter, powers=powers)
    return HybridBeamformers(f_rf1=analog_q.f_rf1, f_rf2=analog_q.f_rf2,
                             w_rf1=analog_q.w_rf1, w_rf2=analog_q.w_rf2,
                             f_bb1=bb.f_bb1, f_bb2=bb.f_bb2,
                             w_bb1=bb.w_bb1, w_bb2=bb.w_bb2)


def _split_hybrid(designs: _RealizationDesigns, kind: str) -> HybridBeamformers:
    """Factor the fully-digital solution into analog/baseband stages with
    the requested split and package it as a hybrid beamformer set."""
    config = designs.config
    dig = designs.get_digital()
    n_rf = config.n_rf
    if kind == "omp_split":
        dict_tx = steering_dictionary(config, "tx")
        dict_rx = steering_dictionary(config, "rx")
        f_rf1, f_bb1 = omp_split(dig.f1, dict_tx, n_rf)
        f_rf2, f_bb2 = omp_split(dig.f2, dict_tx, n_rf)
        w_rf1, w_bb1 = omp_split(dig.w1, dict_rx, n_rf)
        w_rf2, w_bb2 = omp_split(dig.w2, dict_rx, n_rf)
    else:
        f_rf1, f_bb1 = greedy_split(dig.f1, n_rf)
        f_rf2, f_bb2 = greedy_split(dig.f2, n_rf)
        w_rf1, w_bb1 = greedy_split(dig.w1, n_rf)
        w_rf2, w_bb2 = greedy_split(dig.w2, n_rf)
    return HybridBeamformers(f_rf1=f_rf1, f_rf2=f_rf2, w_rf1=w_rf1, w_rf2=w_rf2,
                             f_bb1=f_bb1, f_bb2=f_bb2, w_bb1=w_bb1, w_bb2=w_bb2)


def _scheme_rates(name: str, designs: _RealizationDesigns,
                  snr_points: tuple[float, ...]) -> list[float]:
    """Sum rates of one scheme across the SNR axis for one realization."""
    config = designs.config
    kind, bits = parse_scheme(name)
    chans = designs.chans
    if kind == "upper_bound":
        return [upper_bound(chans, config.powers_at(s), config.n_s) for s in snr_points]
    if kind == "digital_p1":
        beams = designs.get_digital()
        return [sum_rate_digital(beams, chans, config.powers_at(s)).sum for s in snr_points]
    if kind == "svd_mmse":
        powers0 = config.powers_at(0.0)
        beams = svd_mmse_design(chans, config.n_s, tau=powers0.tau1,
                                sigma_sq=powers0.sigma1_sq)
        return [sum_rate_digital(beams, chans, config.powers_at(s)).sum for s in snr_points]
    if kind == "hybrid":
        hyb = designs.get_hybrid()
    elif kind == "hybrid_quantized":
        hyb = _quantized_hybrid(designs, bits)
    else:  # omp_split / greedy_split
        hyb = _split_hybrid(designs, kind)
    return [sum_rate_hybrid(hyb, chans, config.powers_at(s), config.n_s).sum
            for s in snr_points]


def run_rate_sweep(config: SimConfig, schemes: list[str]) -> list[SweepResult]:
    """Paired Monte Carlo rate sweep: one ChannelSet per realization,
    every requested scheme evaluated on it at every SNR point.

    A realization where any scheme's solver fails (infeasible or
    degenerate) is skipped for all schemes to keep the pairing intact; the
    skip count is reported.
    """
    for name in schemes:
        parse_scheme(name)  # validate upfront
    snr_points = tuple(float(s) for s in config.snr_sweep_db)
    samples: dict[str, list[list[float]]] = {n: [] for n in schemes}
    hashes: list[str] = []
    skipped = 0
    for idx in range(config.mc_iterations):
        chans = draw_channel_set(config, realization_stream(config.seed, idx, DOMAIN_CHANNEL))
        designs = _RealizationDesigns(
            config=config, chans=chans,
            rng=realization_stream(config.seed, idx, DOMAIN_SOLVER))
        try:
            per_scheme = {n: _scheme_rates(n, designs, snr_points) for n in schemes}
        except (InfeasibleError, DegenerateStartError):
            skipped += 1
            continue
        hashes.append(channel_hash(chans))
        for n in schemes:
            samples[n].append(per_scheme[n])
    results = []
    for n in schemes:
        arr = np.array(samples[n], dtype=float).reshape(len(hashes), len(snr_points)).T
        mean = arr.mean(axis=1) if arr.size else np.full(len(snr_points), np.nan)
        if arr.shape[1] > 1:
            err = arr.std(axis=1, ddof=1) / np.sqrt(arr.shape[1])
        else:
            err = np.zeros(len(snr_points))
        results.append(SweepResult(
            scheme=n, snr_db=snr_points,
            mean_rate=tuple(float(x) for x in mean),
            stderr=tuple(float(x) for x in err),
            n_samples=arr.shape[1], skipped=skipped, samples=arr,
            realization_hashes=tuple(hashes)))
    return results


def run_sinr_cdf(config: SimConfig, antenna_counts: list[int],
                 snr_points_db: list[float]) -> list[SinrCdfResult]:
    """Analog-only SINR CDF experiment.

    For each antenna count, the analog stage is designed per realization
    and the node-1 aggregate SINR is evaluated at each SNR point.  The
    received signal power is calibrated per realization so the
    interference-free receive SNR after beamforming equals the set SNR;
    the SINR then sits at that value minus the residual-SI penalty, which
    is what the saturation behavior measures.
    """
    results = []
    for a_idx, n_a in enumerate(antenna_counts):
        cfg = config.with_overrides(tx_antennas=int(n_a), rx_antennas=int(n_a))
        domain = DOMAIN_SINR_BASE + 2 * a_idx  # separate channel/solver tags per count
        sinr_samples: dict[float, list[float]] = {float(s): [] for s in snr_points_db}
        hashes: list[str] = []
        skipped = 0
        for idx in range(cfg.mc_iterations):
            chans = draw_channel_set(cfg, realization_stream(cfg.seed, idx, domain))
            try:
                analog, _ = solve_p2_analog(chans, cfg.n_rf,
                                            params=cfg.analog_solver_params,
                                            rng=realization_stream(cfg.seed, idx, domain + 1))
            except (InfeasibleError, DegenerateStartError):
                skipped += 1
                continue
            hashes.append(channel_hash(chans))
            gain = np.linalg.norm(analog.w_rf1.conj().T @ chans.h21 @ analog.f_rf2) ** 2
            w_pow = np.linalg.norm(analog.w_rf1) ** 2
            tau = 10.0 ** (cfg.si_power_db / 10.0)
            for snr in snr_points_db:
                # per-realization calibration: receive SNR after beamforming
                # equals the set SNR when the SI term vanishes
                rho_eff = 10.0 ** (snr / 10.0) * w_pow / gain
                powers = LinkPowers(rho1=rho_eff, rho2=rho_eff, tau1=tau, tau2=tau,
                                    sigma1_sq=1.0, sigma2_sq=1.0)
                sinr = sinr_aggregate(analog.w_rf1, analog.f_rf2, analog.f_rf1,
                                      chans.h21, chans.h11, powers, node=1)
                sinr_samples[float(snr)].append(10.0 * np.log10(sinr))
        for snr in snr_points_db:
            results.append(SinrCdfResult(
                n_antennas=int(n_a), snr_db=float(snr),
                sinr_db=tuple(sinr_samples[float(snr)]), skipped=skipped,
                realization_hashes=tuple(hashes)))
    return results


def analog_only_rate(chans: ChannelSet, analog: AnalogStage, config: SimConfig,
                     snr_db: float) -> float:
    """Hybrid-domain rate of the bare analog stage (identity baseband),
    the floor the baseband stage improves on."""
    n_rf = analog.f_rf1.shape[1]
    bb = identity_baseband(n_rf, config.n_s)
    hyb = HybridBeamformers(f_rf1=analog.f_rf1, f_rf2=analog.f_rf2,
                            w_rf1=analog.w_rf1, w_rf2=analog.w_rf2,
                            f_bb1=bb.f_bb1, f_bb2=bb.f_bb2,
                            w_bb1=bb.w_bb1, w_bb2=bb.w_bb2)
    return sum_rate_hybrid(hyb, chans, config.powers_at(snr_db), config.n_s).sum


# ----- output formats -----

def rates_to_csv(results: list[SweepResult]) -> str:
    lines = [CSV_HEADER]
    for r in results:
        for snr, mean, err in zip(r.snr_db, r.mean_rate, r.stderr):
            lines.append(f"{r.scheme},{float(snr)!r},{float(mean)!r},"
                         f"{float(err)!r},{r.n_samples}")
    return "\n".join(lines) + "\n"


def rates_to_json(results: list[SweepResult]) -> str:
    rows = []
    for r in results:
        for snr, mean, err in zip(r.snr_db, r.mean_rate, r.stderr):
            rows.append({"scheme": r.scheme, "snr_db": float(snr),
                         "mean_rate_bpshz": float(mean), "stderr": float(err),
                         "n_samples": r.n_samples})
    return json.dumps(rows, indent=2) + "\n"


def sinr_to_csv(results: list[SinrCdfResult]) -> str:
    lines = ["n_antennas,snr_db,realization,sinr_db"]
    for r in results:
        for i, v in enumerate(r.sinr_db):
            lines.append(f"{r.n_antennas},{float(r.snr_db)!r},{i},{float(v)!r}")
    return "\n".join(lines) + "\n"


def sinr_to_json(results: list[SinrCdfResult]) -> str:
    rows = [{"n_antennas": r.n_antennas, "snr_db": float(r.snr_db),
             "sinr_db": [float(v) for v in r.sinr_db], "skipped": r.skipped}
            for r in results]
    return json.dumps(rows, indent=2) + "\n"


def dump_channel_files(config: SimConfig, out_dir) -> list[str]:
    """Write one channel-dump file per realization; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for idx in range(config.mc_iterations):
        chans = draw_channel_set(config, realization_stream(config.seed, idx, DOMAIN_CHANNEL))
        buf = io.StringIO()
        write_channel_dump(chans, buf)
        path = out / f"channels_{idx:05d}.txt"
        path.write_text(buf.getvalue())
        paths.append(str(path))
    return paths
