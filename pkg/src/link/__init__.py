"""
Optical inter-satellite link models: beam geometry, pointing errors, channel
statistics, special functions, average rate and relay planning.
"""

from .beam_optics import BeamParams, beam_waist, divergence_angle, intensity, waist_relative_error
from .pointing import PointingModel, rayleigh_pdf, sample_radial, sigma_s
from .channel_stats import (
    ChannelGeometry,
    ChannelStats,
    DetectorSpec,
    capture_probability,
    cdf_h_pe,
    channel_stats,
    conditional_mean_h_pe,
    h_pe_approx,
    h_pe_exact,
    h_threshold,
    mc_channel_moments,
    mean_h_pe,
    outage_probability,
    pdf_h_pe,
    r_max,
)
from .special_fn import Hyp2F1Request, hyp2f1_1b, hyp2f1_1b_quadrature, omega_quadrature, upsilon
from .rate import (
    LinkBudget,
    RateResult,
    avg_rate_analytic,
    avg_rate_montecarlo,
    avg_rate_quadrature,
    hop_context,
    jensen_bound,
    snr,
)
from .constellation import (
    ConstellationConfig,
    ConstellationPlan,
    hop_distance,
    joint_plan,
    latency_sweep,
    min_satellites,
    optimize_frequency,
    total_latency,
)

__all__ = [
    "BeamParams",
    "beam_waist",
    "divergence_angle",
    "intensity",
    "waist_relative_error",
    "PointingModel",
    "rayleigh_pdf",
    "sample_radial",
    "sigma_s",
    "ChannelGeometry",
    "ChannelStats",
    "DetectorSpec",
    "capture_probability",
    "cdf_h_pe",
    "channel_stats",
    "conditional_mean_h_pe",
    "h_pe_approx",
    "h_pe_exact",
    "h_threshold",
    "mc_channel_moments",
    "mean_h_pe",
    "outage_probability",
    "pdf_h_pe",
    "r_max",
    "Hyp2F1Request",
    "hyp2f1_1b",
    "hyp2f1_1b_quadrature",
    "omega_quadrature",
    "upsilon",
    "LinkBudget",
    "RateResult",
    "avg_rate_analytic",
    "avg_rate_montecarlo",
    "avg_rate_quadrature",
    "hop_context",
    "jensen_bound",
    "snr",
    "ConstellationConfig",
    "ConstellationPlan",
    "hop_distance",
    "joint_plan",
    "latency_sweep",
    "min_satellites",
    "optimize_frequency",
    "total_latency",
]
