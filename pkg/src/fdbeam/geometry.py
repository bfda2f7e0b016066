"""Antenna array geometry: URA response vectors and TX/RX element layouts.

The element ordering of a flattened M x N uniform rectangular array is
p-major everywhere in this library: flat index = p * N + q with p the
horizontal index (0..M-1) and q the vertical index (0..N-1).  Channel and
beamformer code all assume this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class UraSpec:
    """Uniform rectangular array: M x N elements with fixed spacings (meters)."""

    m_horizontal: int
    n_vertical: int
    d_h: float
    d_v: float

    def __post_init__(self):
        if self.m_horizontal < 1 or self.n_vertical < 1:
            raise ValueError("URA dimensions must be >= 1")
        if self.d_h <= 0 or self.d_v <= 0:
            raise ValueError("URA element spacings must be positive")

    @property
    def size(self) -> int:
        return self.m_horizontal * self.n_vertical


@dataclass(frozen=True)
class AnglePair:
    """Azimuth/elevation pair in radians; phi in [-pi, pi], theta in [0, pi]."""

    phi: float
    theta: float

    def __post_init__(self):
        if not -np.pi <= self.phi <= np.pi:
            raise ValueError(f"azimuth {self.phi} outside [-pi, pi]")
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError(f"elevation {self.theta} outside [0, pi]")


@dataclass(frozen=True)
class NodeGeometry:
    """3D element positions (meters) of the TX and RX arrays at one FD node."""

    tx_positions: np.ndarray = field(repr=False)  # (N_t, 3)
    rx_positions: np.ndarray = field(repr=False)  # (N_r, 3)
    gap_d: float = 0.0
    incline_omega: float = 0.0

    @property
    def n_tx(self) -> int:
        return self.tx_positions.shape[0]

    @property
    def n_rx(self) -> int:
        return self.rx_positions.shape[0]


def ura_response_many(spec: UraSpec, phis: np.ndarray, thetas: np.ndarray,
                      wavelength: float) -> np.ndarray:
    """Response vectors for a batch of angles, stacked as columns (M*N, L).

    Entry (p, q) of column l is exp(j*2*pi/lambda * [p*d_h*sin(phi_l)*sin(theta_l)
    + q*d_v*cos(theta_l)]) / sqrt(M*N), flattened p-major.
    """
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    p = np.arange(spec.m_horizontal)
    q = np.arange(spec.n_vertical)
    k = 2.0 * np.pi / wavelength
    # (M, 1, L) + (1, N, L) phase grids, flattened p-major to (M*N, L)
    ph_h = p[:, None, None] * spec.d_h * (np.sin(phis) * np.sin(thetas))[None, None, :]
    ph_v = q[None, :, None] * spec.d_v * np.cos(thetas)[None, None, :]
    a = np.exp(1j * k * (ph_h + ph_v)).reshape(spec.size, phis.size)
    return a / np.sqrt(spec.size)


def ura_response(spec: UraSpec, angles: AnglePair, wavelength: float) -> np.ndarray:
    """Single URA steering/response vector of length M*N (unit Euclidean norm)."""
    return ura_response_many(spec, np.array([angles.phi]),
                             np.array([angles.theta]), wavelength)[:, 0]


def _ura_grid(spec: UraSpec) -> np.ndarray:
    """Element coordinates in the array's own plane, centered at the origin.

    Local axes: horizontal index p along y, vertical index q along z; the
    array plane is x = 0 so broadside points along +x.
    """
    yy = (np.arange(spec.m_horizontal) - (spec.m_horizontal - 1) / 2.0) * spec.d_h
    zz = (np.arange(spec.n_vertical) - (spec.n_vertical - 1) / 2.0) * spec.d_v
    y, z = np.meshgrid(yy, zz, indexing="ij")  # p-major flattening
    pts = np.stack([np.zeros(spec.size), y.ravel(), z.ravel()], axis=1)
    return pts


def build_node_geometry(spec_tx: UraSpec, spec_rx: UraSpec, gap_d: float,
                        incline_omega: float) -> NodeGeometry:
    """Lay out the collocated TX/RX arrays of one full-duplex node.

    The RX URA sits in the y-z plane centered at the origin.  The TX URA is
    centered at (gap_d, 0, 0) with its plane rotated by incline_omega about
    the z axis relative to the RX plane.  All coordinates in meters.
    """
    if gap_d <= 0:
        raise ValueError("gap_d must be positive")
    rx = _ura_grid(spec_rx)
    local = _ura_grid(spec_tx)
    c, s = np.cos(incline_omega), np.sin(incline_omega)
    rot_z = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    tx = local @ rot_z.T + np.array([gap_d, 0.0, 0.0])
    return NodeGeometry(tx_positions=tx, rx_positions=rx,
                        gap_d=gap_d, incline_omega=incline_omega)


def pairwise_distances(geom: NodeGeometry) -> np.ndarray:
    """Euclidean distance matrix of shape (N_t, N_r): entry (p, q) is the
    distance between TX element p and RX element q."""
    diff = geom.tx_positions[:, None, :] - geom.rx_positions[None, :, :]
    return np.linalg.norm(diff, axis=2)


def square_ura_factor(n_elements: int) -> tuple[int, int]:
    """Factor an element count into the most nearly square (M, N) grid.

    A perfect square becomes sqrt x sqrt (the canonical reading of an
    unshaped antenna count); otherwise the divisor pair closest to square.
    """
    if n_elements < 1:
        raise ValueError("element count must be >= 1")
    m = int(np.sqrt(n_elements))
    while m > 1 and n_elements % m != 0:
        m -= 1
    return m, n_elements // m
