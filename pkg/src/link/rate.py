"""
Average achievable data rate of a single optical inter-satellite hop.

The instantaneous rate is B log2(1 + SNR h) when the channel state h meets the
threshold h_th and zero otherwise. Three evaluations of its expectation are
provided: the hypergeometric closed form, direct quadrature of the defining
integral and a Monte Carlo estimate over sampled pointing errors.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.link.beam_optics import BeamParams
from src.link.channel_stats import ChannelGeometry, check_collected_fraction, mean_h_pe
from src.link.pointing import PointingModel, radial_chunk, sigma_s
from src.link.special_fn import omega_normalized_quadrature, upsilon_ratio
from src.utils.errors import FarFieldWarning, InvalidParameterError
from src.utils.rng import map_substreams

MIN_RATE_SAMPLES = 100_000


@dataclass(frozen=True)
class LinkBudget:
    """
    Electrical link budget.

    Attributes:
        bandwidth: B in Hz
        p_t: Transmit power in W
        eta: Detector responsivity
        h_pl: Deterministic path loss
        sigma_n2: Variance of the additive noise
    """

    bandwidth: float
    p_t: float
    eta: float
    h_pl: float
    sigma_n2: float

    def __post_init__(self):
        for name in ("bandwidth", "p_t", "eta", "h_pl", "sigma_n2"):
            value = getattr(self, name)
            if not value > 0:
                raise InvalidParameterError(f"LinkBudget.{name} must be positive, got {value}")

    @property
    def snr(self) -> float:
        return self.h_pl * self.eta * self.p_t / self.sigma_n2


def snr(budget: LinkBudget) -> float:
    """h_PL * eta * P_T / sigma_n^2."""
    return budget.snr


@dataclass(frozen=True)
class RateContext:
    """
    Per-hop quantities with sigma_s frozen at sigma_s(delta).

    xi = tan^2(theta) / (4 sigma_s^2), gamma = xi delta^2 = w_z^2 / (4 sigma_s^2)
    and a0 = w_d^2 / (2 sigma_s^2 gamma) = 2 w_d^2 / w_z^2.
    """

    delta: float
    w_z: float
    w_d: float
    sigma: float
    xi: float

    def __post_init__(self):
        check_collected_fraction(self.w_z, self.w_d)

    @property
    def gamma(self) -> float:
        return self.xi * self.delta**2

    @property
    def a0(self) -> float:
        return self.w_d**2 / (2.0 * self.sigma**2 * self.gamma)

    @property
    def geometry(self) -> ChannelGeometry:
        return ChannelGeometry(z=self.delta, w_z=self.w_z, w_d=self.w_d, sigma=self.sigma)

    def in_outage(self, h_th: float) -> bool:
        return h_th >= self.a0


@dataclass(frozen=True)
class RateResult:
    """Average rate in bit/s; stderr is only set by the Monte Carlo estimator."""

    rate: float
    outage: bool
    stderr: Optional[float] = None


def hop_context(delta: float, beam: BeamParams, pointing: PointingModel, w_d: float) -> RateContext:
    if not delta > 0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")
    if not w_d > 0:
        raise InvalidParameterError(f"w_d must be positive, got {w_d}")
    sigma = sigma_s(pointing, delta)
    tan_theta = math.tan(beam.theta)
    return RateContext(
        delta=delta,
        w_z=delta * tan_theta,
        w_d=w_d,
        sigma=sigma,
        xi=tan_theta**2 / (4.0 * sigma**2),
    )


def _check_threshold(h_th: float) -> None:
    if h_th < 0:
        raise InvalidParameterError(f"h_th must be non-negative, got {h_th}")


def avg_rate_analytic(
    delta: float,
    beam: BeamParams,
    pointing: PointingModel,
    w_d: float,
    h_th: float,
    budget: LinkBudget,
) -> RateResult:
    """
    Closed-form average rate B (Y(A) - Y(h_th)) / (A^gamma ln 2).

    Both Y terms are divided by A^gamma before exponentiation, so the result
    stays finite for large gamma.
    """
    _check_threshold(h_th)
    ctx = hop_context(delta, beam, pointing, w_d)
    if ctx.in_outage(h_th):
        return RateResult(rate=0.0, outage=True)
    s, a0, gamma = budget.snr, ctx.a0, ctx.gamma
    difference = upsilon_ratio(a0, a0, gamma, s) - upsilon_ratio(h_th, a0, gamma, s)
    return RateResult(rate=max(budget.bandwidth * difference / math.log(2.0), 0.0), outage=False)


def avg_rate_quadrature(
    delta: float,
    beam: BeamParams,
    pointing: PointingModel,
    w_d: float,
    h_th: float,
    budget: LinkBudget,
) -> RateResult:
    """B * E[log2(1 + SNR h); h >= h_th] = B gamma A^(-gamma) Omega / ln 2 by quadrature."""
    _check_threshold(h_th)
    ctx = hop_context(delta, beam, pointing, w_d)
    if ctx.in_outage(h_th):
        return RateResult(rate=0.0, outage=True)
    normalized = omega_normalized_quadrature(h_th, ctx.a0, ctx.gamma, budget.snr)
    return RateResult(rate=budget.bandwidth * normalized / math.log(2.0), outage=False)


def avg_rate_montecarlo(
    seed: int,
    n: int,
    delta: float,
    beam: BeamParams,
    pointing: PointingModel,
    w_d: float,
    h_th: float,
    budget: LinkBudget,
    workers: int = 1,
) -> RateResult:
    """Empirical mean of B log2(1 + SNR h) over sampled pointing errors, h < h_th zeroed."""
    _check_threshold(h_th)
    if n < MIN_RATE_SAMPLES:
        raise InvalidParameterError(f"avg_rate_montecarlo needs n >= {MIN_RATE_SAMPLES}, got {n}")
    ctx = hop_context(delta, beam, pointing, w_d)
    s, a0, w_z, sigma = budget.snr, ctx.a0, ctx.w_z, ctx.sigma

    def _chunk(gen: np.random.Generator, size: int):
        r = radial_chunk(gen, size, sigma)
        h = a0 * np.exp(-2.0 * r**2 / w_z**2)
        bits = np.where(h >= h_th, np.log2(1.0 + s * h), 0.0)
        return float(np.sum(bits)), float(np.sum(bits**2))

    partials = map_substreams(_chunk, seed, n, workers=workers)
    mean = math.fsum(p for p, _ in partials) / n
    second = math.fsum(q for _, q in partials) / n
    stderr = math.sqrt(max(second - mean**2, 0.0) / n)
    return RateResult(
        rate=budget.bandwidth * mean,
        outage=ctx.in_outage(h_th),
        stderr=budget.bandwidth * stderr,
    )


def jensen_bound(
    delta: float,
    beam: BeamParams,
    pointing: PointingModel,
    w_d: float,
    h_th: float,
    budget: LinkBudget,
) -> float:
    """Upper bound B log2(1 + SNR * mean channel state) from concavity of the log."""
    ctx = hop_context(delta, beam, pointing, w_d)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FarFieldWarning)
        mean = mean_h_pe(ctx.geometry, h_th)
    return budget.bandwidth * math.log2(1.0 + budget.snr * mean)
