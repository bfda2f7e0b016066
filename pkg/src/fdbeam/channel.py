"""Channel generation: clustered geometric link channels and near-field
LOS + Rician NLOS self-interference channels.

All random draws consume an explicit numpy Generator so that realizations
are reproducible and independent realizations can be generated from split
seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, TextIO

import numpy as np

from .exceptions import SingularGeometryError
from .geometry import NodeGeometry, UraSpec, pairwise_distances, ura_response_many

if TYPE_CHECKING:
    from .config import SimConfig

# Cluster-center elevation support; theta in {0, pi} makes azimuth
# unidentifiable, so the endpoints are kept away from the poles.
_ELEVATION_LO = np.pi / 4
_ELEVATION_HI = 3 * np.pi / 4


@dataclass(frozen=True)
class ClusterSpec:
    """Cluster/ray counts and within-cluster angular spread (radians)."""

    n_cl: int
    n_ray: int
    angular_spread: float

    def __post_init__(self):
        if self.n_cl < 1 or self.n_ray < 1:
            raise ValueError("cluster and ray counts must be >= 1")
        if self.angular_spread < 0:
            raise ValueError("angular spread must be non-negative")


@dataclass(frozen=True)
class RicianSpec:
    """Linear Rician factor (LOS-to-NLOS power ratio)."""

    kappa: float

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("Rician factor must be non-negative")


@dataclass(frozen=True)
class ChannelSet:
    """One realization of the four channels of a two-node FD link.

    h21/h12 are the link channels (rows = receive side), h11/h22 the
    self-interference channels at nodes 1 and 2.
    """

    h21: np.ndarray = field(repr=False)
    h12: np.ndarray = field(repr=False)
    h11: np.ndarray = field(repr=False)
    h22: np.ndarray = field(repr=False)


def _wrap_angle(phi: np.ndarray) -> np.ndarray:
    return np.mod(phi + np.pi, 2 * np.pi) - np.pi


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. CN(0, 1) entries."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def draw_cluster_channel(spec: ClusterSpec, tx_spec: UraSpec, rx_spec: UraSpec,
                         wavelength: float, rng: np.random.Generator) -> np.ndarray:
    """Draw one clustered geometric channel of shape (N_r, N_t).

    H = sqrt(N_t N_r / (N_cl N_ray)) * sum_{k,l} alpha_kl a_rx a_tx^H with
    unit-variance circular Gaussian ray gains, cluster centers uniform in
    azimuth and in elevation on [pi/4, 3pi/4], and Gaussian ray offsets of
    std angular_spread at both link ends.  Departure and arrival angles are
    drawn independently.
    """
    n_paths = spec.n_cl * spec.n_ray

    def draw_angles():
        az = np.repeat(rng.uniform(-np.pi, np.pi, spec.n_cl), spec.n_ray)
        el = np.repeat(rng.uniform(_ELEVATION_LO, _ELEVATION_HI, spec.n_cl), spec.n_ray)
        az = _wrap_angle(az + rng.normal(0.0, spec.angular_spread, n_paths))
        el = np.clip(el + rng.normal(0.0, spec.angular_spread, n_paths), 0.0, np.pi)
        return az, el

    az_rx, el_rx = draw_angles()
    az_tx, el_tx = draw_angles()
    alpha = _complex_normal(rng, n_paths)
    a_rx = ura_response_many(rx_spec, az_rx, el_rx, wavelength)  # (N_r, L)
    a_tx = ura_response_many(tx_spec, az_tx, el_tx, wavelength)  # (N_t, L)
    scale = np.sqrt(tx_spec.size * rx_spec.size / n_paths)
    return scale * (a_rx * alpha) @ a_tx.conj().T


def si_los_channel(geom: NodeGeometry, wavelength: float) -> np.ndarray:
    """Near-field spherical-wave LOS SI channel of shape (N_r, N_t).

    Entry (q, p) = (1/d_pq) * exp(-j 2 pi d_pq / lambda) with d_pq the
    distance between TX element p and RX element q.  Rows are RX so the
    matrix applies directly to a transmit-side vector.
    """
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    d = pairwise_distances(geom)  # (N_t, N_r)
    if np.any(d <= 0):
        raise SingularGeometryError("TX and RX elements coincide (zero distance)")
    drt = d.T
    return (1.0 / drt) * np.exp(-2j * np.pi * drt / wavelength)


def draw_si_channel(geom: NodeGeometry, rician: RicianSpec, wavelength: float,
                    rng: np.random.Generator) -> np.ndarray:
    """Aggregate SI channel: Rician mix of the LOS term and an i.i.d. CN(0,1)
    NLOS term.

    The LOS matrix is rescaled to ||H_los||_F^2 = N_t*N_r before mixing so
    that kappa alone controls the LOS/NLOS power split (raw 1/d magnitudes
    in meters would otherwise bury the LOS term).
    """
    h_los = si_los_channel(geom, wavelength)
    n_rx, n_tx = h_los.shape
    h_los = h_los * (np.sqrt(n_tx * n_rx) / np.linalg.norm(h_los))
    h_nlos = _complex_normal(rng, (n_rx, n_tx))
    k = rician.kappa
    return np.sqrt(k / (k + 1.0)) * h_los + np.sqrt(1.0 / (k + 1.0)) * h_nlos


def draw_channel_set(config: "SimConfig", rng: np.random.Generator) -> ChannelSet:
    """One Monte Carlo realization of all four channels.

    h21 and h12 are drawn independently (no reciprocity assumed); the two
    nodes share the Fig.-2 geometry but get independent NLOS SI draws.
    """
    lam = config.wavelength
    cluster = config.cluster_spec
    tx_spec, rx_spec = config.tx_ura, config.rx_ura
    h21 = draw_cluster_channel(cluster, tx_spec, rx_spec, lam, rng)
    h12 = draw_cluster_channel(cluster, tx_spec, rx_spec, lam, rng)
    geom = config.node_geometry
    ric = RicianSpec(kappa=config.rician_kappa_linear)
    h11 = draw_si_channel(geom, ric, lam, rng)
    h22 = draw_si_channel(geom, ric, lam, rng)
    return ChannelSet(h21=h21, h12=h12, h11=h11, h22=h22)


# ---------------------------------------------------------------------------
# Channel-dump text format: one realization per file.  Each matrix block is
#   matrix <name> <rows> <cols>
# followed by rows*cols lines of "(re, im)" pairs in row-major order.
# ---------------------------------------------------------------------------

_DUMP_ORDER = ("h21", "h12", "h11", "h22")


def write_channel_dump(chans: ChannelSet, stream: TextIO) -> None:
    """Serialize one ChannelSet to the structured text dump format."""
    stream.write("channelset 1\n")
    for name in _DUMP_ORDER:
        m = getattr(chans, name)
        stream.write(f"matrix {name} {m.shape[0]} {m.shape[1]}\n")
        for v in m.ravel(order="C"):
            stream.write(f"({v.real!r}, {v.imag!r})\n")


def read_channel_dump(stream: TextIO) -> ChannelSet:
    """Parse a channel dump produced by write_channel_dump (exact round-trip)."""
    header = stream.readline().split()
    if not header or header[0] != "channelset":
        raise ValueError("not a channel dump: missing 'channelset' header")
    mats = {}
    line = stream.readline()
    while line:
        parts = line.split()
        if len(parts) != 4 or parts[0] != "matrix":
            raise ValueError(f"malformed matrix header: {line.rstrip()}")
        name, rows, cols = parts[1], int(parts[2]), int(parts[3])
        flat = np.empty(rows * cols, dtype=complex)
        for i in range(rows * cols):
            entry = stream.readline().strip()
            if not (entry.startswith("(") and entry.endswith(")")):
                raise ValueError(f"malformed entry in matrix {name}: {entry}")
            re_s, im_s = entry[1:-1].split(",")
            flat[i] = complex(float(re_s), float(im_s))
        mats[name] = flat.reshape(rows, cols)
        line = stream.readline()
    missing = [n for n in _DUMP_ORDER if n not in mats]
    if missing:
        raise ValueError(f"channel dump missing matrices: {missing}")
    return ChannelSet(**mats)
