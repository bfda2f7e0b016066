"""Zero-forcing max-power beamforming designs and seeded link simulations
for a two-node full-duplex mmWave MIMO system."""

from .baselines import QuantizerSpec, greedy_split, omp_split, quantize_phases, svd_mmse_design
from .channel import (ChannelSet, ClusterSpec, RicianSpec, draw_channel_set,
                      draw_cluster_channel, draw_si_channel, read_channel_dump,
                      si_los_channel, write_channel_dump)
from .config import SimConfig, load_config, parse_config_text
from .digital import DigitalBeamformers, si_residual, solve_p1
from .exceptions import (ConfigError, DegenerateStartError, FdbeamError,
                         InfeasibleError, NumericDegeneracyError, SingularGeometryError)
from .geometry import (AnglePair, NodeGeometry, UraSpec, build_node_geometry,
                       pairwise_distances, square_ura_factor, ura_response,
                       ura_response_many)
from .harness import (SinrCdfResult, SweepResult, run_rate_sweep, run_sinr_cdf,
                      realization_stream)
from .hybrid import (AnalogReport, AnalogSolverParams, AnalogStage, BasebandStage,
                     HybridBeamformers, identity_baseband, solve_hybrid,
                     solve_p2_analog, solve_p3_digital)
from .metrics import (LinkPowers, RateReport, covariance_t, noise_variance_dbm,
                      sinr_aggregate, sum_rate_analog, sum_rate_digital,
                      sum_rate_hybrid, upper_bound)
from .projector import (ApResult, CaSubspaceSpec, ZfConstraint, alternating_zf_ca,
                        ca_project, zf_cyclic_max, zf_project)

__version__ = "0.1.0"

__all__ = [
    "AnalogReport", "AnalogSolverParams", "AnalogStage", "AnglePair", "ApResult",
    "BasebandStage", "CaSubspaceSpec", "ChannelSet", "ClusterSpec", "ConfigError",
    "DegenerateStartError", "DigitalBeamformers", "FdbeamError", "HybridBeamformers",
    "InfeasibleError", "LinkPowers", "NodeGeometry", "NumericDegeneracyError",
    "QuantizerSpec", "RateReport", "RicianSpec", "SimConfig", "SingularGeometryError",
    "SinrCdfResult", "SweepResult", "UraSpec", "ZfConstraint", "alternating_zf_ca",
    "build_node_geometry", "ca_project", "covariance_t", "draw_channel_set",
    "draw_cluster_channel", "draw_si_channel", "greedy_split", "identity_baseband",
    "load_config", "noise_variance_dbm", "omp_split", "pairwise_distances",
    "parse_config_text", "quantize_phases", "read_channel_dump", "realization_stream",
    "run_rate_sweep", "run_sinr_cdf", "si_los_channel", "si_residual",
    "sinr_aggregate", "solve_hybrid", "solve_p1", "solve_p2_analog",
    "solve_p3_digital", "square_ura_factor", "sum_rate_analog", "sum_rate_digital",
    "sum_rate_hybrid", "svd_mmse_design", "upper_bound", "ura_response",
    "ura_response_many", "write_channel_dump", "zf_cyclic_max", "zf_project",
]
