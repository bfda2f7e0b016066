"""Simulation configuration: Table-style defaults, a flat key=value text
format, and the derived quantities (wavelength, array specs, node geometry,
power levels) the solvers and harness consume.

Powers are normalized to a unit noise floor: sigma^2 = 1, rho = 10^(SNR/10),
tau = 10^(INR/10).  The absolute thermal level for a given bandwidth is
available through metrics.noise_variance_dbm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .channel import ClusterSpec
from .exceptions import ConfigError
from .geometry import NodeGeometry, UraSpec, build_node_geometry, square_ura_factor
from .hybrid import AnalogSolverParams
from .metrics import LinkPowers

SPEED_OF_LIGHT = 299792458.0

_DEFAULT_SWEEP = tuple(-10.0 + 2.5 * i for i in range(13))  # -10..20 dB


@dataclass(frozen=True)
class SimConfig:
    """All simulation parameters; the defaults reproduce the reference
    28 GHz / 16-antenna operating point."""

    carrier_hz: float = 28e9
    bandwidth_hz: float = 850e6
    tx_antennas: int = 16
    rx_antennas: int = 16
    n_cl: int = 6
    n_ray: int = 8
    angular_spread_rad: float = math.radians(20.0)
    gap_d_wavelengths: float = 2.0
    incline_omega_rad: float = math.pi / 6
    rician_kappa_db: float = 5.0
    si_power_db: float = 30.0  # INR
    antenna_spacing_wavelengths: float = 0.5
    n_s: int = 2
    n_rf: int = 4
    snr_sweep_db: tuple[float, ...] = _DEFAULT_SWEEP
    mc_iterations: int = 1000
    seed: int = 1
    quantizer_bits: int | None = None
    # solver tolerances and iteration caps
    p1_tol: float = 1e-6
    p1_max_outer: int = 50
    ap_inner_iter: int = 6
    ap_gain_cycles: int = 15
    ap_outer_iter: int = 160
    ap_final_outer_iter: int = 800
    ap_tol: float = 1e-6
    ap_qualify_residual: float = 1e-5
    p2_passes: int = 2
    p3_tol: float = 1e-6
    p3_max_iter: int = 30
    p3_reference_snr_db: float = 10.0

    def __post_init__(self):
        positive_ints = ("tx_antennas", "rx_antennas", "n_cl", "n_ray", "n_s",
                         "n_rf", "mc_iterations", "p1_max_outer", "ap_inner_iter",
                         "ap_gain_cycles", "ap_outer_iter", "ap_final_outer_iter",
                         "p2_passes", "p3_max_iter")
        for name in positive_ints:
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.carrier_hz <= 0 or self.bandwidth_hz <= 0:
            raise ConfigError("carrier_hz and bandwidth_hz must be positive")
        if self.antenna_spacing_wavelengths <= 0:
            raise ConfigError("antenna_spacing_wavelengths must be positive")
        if self.gap_d_wavelengths <= 0:
            raise ConfigError("gap_d_wavelengths must be positive")
        if self.angular_spread_rad < 0:
            raise ConfigError("angular_spread_rad must be non-negative")
        if self.n_s > self.n_rf:
            raise ConfigError("n_s must not exceed n_rf")
        if not self.snr_sweep_db:
            raise ConfigError("snr_sweep_db must be non-empty")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.quantizer_bits is not None and self.quantizer_bits < 1:
            raise ConfigError("quantizer_bits must be >= 1")

    # ----- derived quantities -----

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def tx_ura(self) -> UraSpec:
        m, n = square_ura_factor(self.tx_antennas)
        d = self.antenna_spacing_wavelengths * self.wavelength
        return UraSpec(m_horizontal=m, n_vertical=n, d_h=d, d_v=d)

    @property
    def rx_ura(self) -> UraSpec:
        m, n = square_ura_factor(self.rx_antennas)
        d = self.antenna_spacing_wavelengths * self.wavelength
        return UraSpec(m_horizontal=m, n_vertical=n, d_h=d, d_v=d)

    @property
    def node_geometry(self) -> NodeGeometry:
        return build_node_geometry(self.tx_ura, self.rx_ura,
                                   gap_d=self.gap_d_wavelengths * self.wavelength,
                                   incline_omega=self.incline_omega_rad)

    @property
    def cluster_spec(self) -> ClusterSpec:
        return ClusterSpec(n_cl=self.n_cl, n_ray=self.n_ray,
                           angular_spread=self.angular_spread_rad)

    @property
    def rician_kappa_linear(self) -> float:
        return 10.0 ** (self.rician_kappa_db / 10.0)

    @property
    def analog_solver_params(self) -> AnalogSolverParams:
        return AnalogSolverParams(
            passes=self.p2_passes, inner_iter=self.ap_inner_iter,
            gain_cycles=self.ap_gain_cycles, outer_iter=self.ap_outer_iter,
            final_outer_iter=self.ap_final_outer_iter, tol=self.ap_tol,
            qualify_residual=self.ap_qualify_residual)

    def powers_at(self, snr_db: float) -> LinkPowers:
        return LinkPowers.from_db(snr_db=snr_db, inr_db=self.si_power_db)

    def with_overrides(self, **kwargs) -> "SimConfig":
        return replace(self, **kwargs)


# ----- flat key = value text format -----

def _parse_bits(raw: str):
    if raw.lower() in ("none", ""):
        return None
    return int(raw)


def _parse_sweep(raw: str) -> tuple[float, ...]:
    vals = tuple(float(tok) for tok in raw.replace(",", " ").split())
    if not vals:
        raise ValueError("empty sweep")
    return vals


_FIELD_PARSERS = {
    "carrier_hz": float, "bandwidth_hz": float,
    "tx_antennas": int, "rx_antennas": int,
    "n_cl": int, "n_ray": int,
    "angular_spread_rad": float,
    "gap_d_wavelengths": float, "incline_omega_rad": float,
    "rician_kappa_db": float, "si_power_db": float,
    "antenna_spacing_wavelengths": float,
    "n_s": int, "n_rf": int,
    "snr_sweep_db": _parse_sweep,
    "mc_iterations": int, "seed": int,
    "quantizer_bits": _parse_bits,
    "p1_tol": float, "p1_max_outer": int,
    "ap_inner_iter": int, "ap_gain_cycles": int, "ap_outer_iter": int,
    "ap_final_outer_iter": int, "ap_tol": float, "ap_qualify_residual": float,
    "p2_passes": int, "p3_tol": float, "p3_max_iter": int,
    "p3_reference_snr_db": float,
}

assert set(_FIELD_PARSERS) == {f.name for f in fields(SimConfig)}


def parse_config_text(text: str) -> SimConfig:
    """Parse the flat 'key = value' format ('#' starts a comment)."""
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        parser = _FIELD_PARSERS.get(key)
        if parser is None:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            overrides[key] = parser(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"line {lineno}: bad value for key {key!r}: {raw!r}") from exc
    return SimConfig(**overrides)


def load_config(source: str) -> SimConfig:
    """Load a config: the literal name 'default' yields the built-in
    defaults, anything else is a path to a key=value file."""
    if source == "default":
        return SimConfig()
    path = Path(source)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text())


def config_to_text(config: SimConfig) -> str:
    """Serialize a config in the same flat format (round-trips through
    parse_config_text)."""
    lines = []
    for f in fields(SimConfig):
        v = getattr(config, f.name)
        if f.name == "snr_sweep_db":
            v = ", ".join(repr(float(x)) for x in v)
        elif v is None:
            v = "none"
        elif isinstance(v, float):
            v = repr(v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
