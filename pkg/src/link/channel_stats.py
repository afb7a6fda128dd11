"""
Pointing-error channel state h_PE of a single optical link.

h_PE is the fraction of transmitted power collected by a disc detector of
radius w_d whose centre sits at radial offset r from the beam axis. In the far
field (w_z >> w_d) it follows h_PE(r) = A0 * exp(-2 r^2 / w_z^2) with
A0 = 2 w_d^2 / w_z^2. With Rayleigh distributed r the channel state follows a
power law on (0, A0] with exponent gamma = w_z^2 / (4 sigma^2).
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from src.link.beam_optics import BeamParams, beam_waist
from src.link.pointing import radial_chunk
from src.utils.errors import DomainError, FarFieldWarning, InvalidParameterError, SingularGeometryError
from src.utils.quadrature import adaptive_quad
from src.utils.rng import map_substreams

FAR_FIELD_RATIO = 100.0
MIN_CHANNEL_SAMPLES = 10_000

ArrayLike = Union[float, np.ndarray]


def check_collected_fraction(w_z: float, w_d: float) -> None:
    """A0 = 2 w_d^2 / w_z^2 must not exceed 1: the beam has to be wider than the detector."""
    a0 = 2.0 * w_d**2 / w_z**2
    if a0 > 1.0:
        raise SingularGeometryError(
            f"A0 = 2 w_d^2 / w_z^2 = {a0:.6g} exceeds 1 (w_z={w_z:.6g} m, w_d={w_d:.6g} m); "
            "the far-field channel model does not apply"
        )


@dataclass(frozen=True)
class ChannelGeometry:
    """
    Geometry of one link at range z.

    Attributes:
        z: Hop distance in meters
        w_z: Beam waist at range in meters
        w_d: Detector radius in meters
        sigma: Per-axis pointing deviation at this range in meters
    """

    z: float
    w_z: float
    w_d: float
    sigma: float

    def __post_init__(self):
        for name in ("z", "w_z", "w_d", "sigma"):
            value = getattr(self, name)
            if not value > 0:
                raise InvalidParameterError(f"ChannelGeometry.{name} must be positive, got {value}")
        check_collected_fraction(self.w_z, self.w_d)

    @classmethod
    def from_beam(cls, z: float, beam: BeamParams, w_d: float, sigma: float) -> "ChannelGeometry":
        return cls(z=z, w_z=beam_waist(z, beam, mode="farfield"), w_d=w_d, sigma=sigma)

    @property
    def a0(self) -> float:
        return 2.0 * self.w_d**2 / self.w_z**2

    @property
    def gamma(self) -> float:
        return self.w_z**2 / (4.0 * self.sigma**2)

    @property
    def ratio(self) -> float:
        return self.w_z / self.w_d

    @property
    def is_far_field(self) -> bool:
        return self.ratio >= FAR_FIELD_RATIO


@dataclass(frozen=True)
class DetectorSpec:
    """Receiver sensitivity and the transmit-side power budget."""

    p_th: float
    eta: float
    h_pl: float
    p_t: float

    def __post_init__(self):
        if self.p_th < 0:
            raise InvalidParameterError(f"p_th must be non-negative, got {self.p_th}")
        if not 0 < self.eta <= 1:
            raise InvalidParameterError(f"eta must lie in (0, 1], got {self.eta}")
        if not 0 < self.h_pl <= 1:
            raise InvalidParameterError(f"h_pl must lie in (0, 1], got {self.h_pl}")
        if self.p_t <= 0:
            raise InvalidParameterError(f"p_t must be positive, got {self.p_t}")


@dataclass(frozen=True)
class ChannelStats:
    """Derived per-link quantities. r_max is None when the link is in outage."""

    a0: float
    gamma: float
    h_th: float
    r_max: Optional[float]

    @property
    def outage(self) -> bool:
        return self.r_max is None


@dataclass(frozen=True)
class ChannelMoments:
    mean: float
    capture_probability: float
    n: int


def _warn_if_near_field(geom: ChannelGeometry) -> None:
    if not geom.is_far_field:
        warnings.warn(
            f"w_z/w_d = {geom.ratio:.3g} is below {FAR_FIELD_RATIO:g}; "
            "far-field channel statistics are approximate",
            FarFieldWarning,
            stacklevel=3,
        )


def _check_threshold(h_th: float) -> None:
    if h_th < 0:
        raise InvalidParameterError(f"h_th must be non-negative, got {h_th}")


def h_pe_exact(r: float, geom: ChannelGeometry) -> float:
    """
    Collected power fraction by nested adaptive quadrature over the detector disc.

    The detector is centred at the origin and the beam axis at (r, 0). The
    Gaussian intensity separates in x and y, so the inner integral runs over
    the chord |y| <= sqrt(w_d^2 - x^2) and the outer one over x in [-w_d, w_d].
    """
    if r < 0:
        raise InvalidParameterError(f"r must be non-negative, got {r}")
    w_z, w_d = geom.w_z, geom.w_d
    scale = 2.0 / w_z**2

    def _inner(x: float) -> float:
        half_chord = math.sqrt(max(w_d**2 - x**2, 0.0))
        if half_chord == 0.0:
            return 0.0
        value, _ = adaptive_quad(
            lambda y: math.exp(-scale * y**2),
            0.0,
            half_chord,
            epsabs=0.0,
            epsrel=1e-12,
            name="detector chord",
        )
        return 2.0 * value * math.exp(-scale * (x - r) ** 2)

    value, _ = adaptive_quad(
        _inner, -w_d, w_d, epsabs=0.0, epsrel=1e-10, points=[r], name="detector disc"
    )
    return min(max(scale / math.pi * value, 0.0), 1.0)


def h_pe_approx(r: ArrayLike, geom: ChannelGeometry) -> ArrayLike:
    """Far-field channel state A0 * exp(-2 r^2 / w_z^2)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise InvalidParameterError("r must be non-negative")
    _warn_if_near_field(geom)
    value = geom.a0 * np.exp(-2.0 * r_arr**2 / geom.w_z**2)
    return float(value) if value.ndim == 0 else value


def h_threshold(det: DetectorSpec) -> float:
    """Dimensionless sensitivity threshold p_th / (h_PL * eta * P_T)."""
    denominator = det.h_pl * det.eta * det.p_t
    if denominator <= 0:
        raise InvalidParameterError("h_PL * eta * P_T must be positive")
    return det.p_th / denominator


def r_max(geom: ChannelGeometry, h_th: float) -> Optional[float]:
    """
    Largest radial offset whose channel state still meets h_th.

    Returns:
        math.inf for h_th = 0, None when h_th > A0 (outage), otherwise
        sqrt((w_z^2 / 2) * ln(A0 / h_th))
    """
    _check_threshold(h_th)
    if h_th == 0:
        return math.inf
    if h_th > geom.a0:
        return None
    return math.sqrt(0.5 * geom.w_z**2 * math.log(geom.a0 / h_th))


def channel_stats(geom: ChannelGeometry, h_th: float) -> ChannelStats:
    return ChannelStats(a0=geom.a0, gamma=geom.gamma, h_th=h_th, r_max=r_max(geom, h_th))


def pdf_h_pe(y: float, geom: ChannelGeometry) -> float:
    """Power-law density gamma / A0 * (y / A0)^(gamma - 1) on (0, A0]."""
    a0, gamma = geom.a0, geom.gamma
    if not 0 < y <= a0:
        raise DomainError(f"pdf of h_PE is supported on (0, {a0:.6g}], got y={y}")
    return gamma / a0 * math.exp((gamma - 1.0) * math.log(y / a0))


def cdf_h_pe(y: float, geom: ChannelGeometry) -> float:
    """Distribution function (y / A0)^gamma, clamped to [0, 1]."""
    a0 = geom.a0
    if y <= 0:
        return 0.0
    if y >= a0:
        return 1.0
    return math.exp(geom.gamma * math.log(y / a0))


def general_pdf_h_pe(
    y: float, geom: ChannelGeometry, radial_pdf: Callable[[float], float]
) -> float:
    """
    Density of h_PE for an arbitrary radial deviation law.

    Inverting h = A0 exp(-2 r^2 / w_z^2) gives r = g(y) and
    |dr/dy| = w_z^2 / (4 y g(y)), so f_h(y) = f_R(g(y)) * w_z^2 / (4 y g(y)).
    At y = A0 (g = 0) the ratio f_R(r) / r is taken as its one-sided limit,
    evaluated at a radius far below any scale of the problem.
    """
    a0, w_z = geom.a0, geom.w_z
    if not 0 < y <= a0:
        raise DomainError(f"pdf of h_PE is supported on (0, {a0:.6g}], got y={y}")
    r = w_z * math.sqrt(0.5 * math.log(a0 / y))
    if r == 0.0:
        r_limit = 1e-9 * min(w_z, geom.sigma)
        return radial_pdf(r_limit) / r_limit * w_z**2 / (4.0 * y)
    return radial_pdf(r) * w_z**2 / (4.0 * y * r)


def outage_probability(geom: ChannelGeometry, h_th: float) -> float:
    """P{h_PE < h_th} = exp(-r_max^2 / (2 sigma^2))."""
    _check_threshold(h_th)
    return cdf_h_pe(h_th, geom)


def capture_probability(geom: ChannelGeometry, h_th: float) -> float:
    """P{r <= r_max} = 1 - exp(-r_max^2 / (2 sigma^2))."""
    _check_threshold(h_th)
    if h_th == 0:
        return 1.0
    if h_th >= geom.a0:
        return 0.0
    return -math.expm1(geom.gamma * math.log(h_th / geom.a0))


def mean_h_pe(geom: ChannelGeometry, h_th: float) -> float:
    """
    Average channel state with states below h_th counted as zero.

    Returns:
        (w_z^2 / (w_z^2 + 4 sigma^2)) * A0 * (1 - (h_th / A0)^(gamma + 1)),
        or 0 when h_th >= A0 (total outage)
    """
    _check_threshold(h_th)
    _warn_if_near_field(geom)
    a0, gamma = geom.a0, geom.gamma
    if h_th >= a0:
        return 0.0
    prefactor = geom.w_z**2 / (geom.w_z**2 + 4.0 * geom.sigma**2)
    if h_th == 0:
        return prefactor * a0
    return prefactor * a0 * -math.expm1((gamma + 1.0) * math.log(h_th / a0))


def conditional_mean_h_pe(geom: ChannelGeometry, h_th: float) -> float:
    """Mean channel state given r <= r_max; 0 in total outage."""
    captured = capture_probability(geom, h_th)
    if captured == 0.0:
        return 0.0
    return mean_h_pe(geom, h_th) / captured


def mc_channel_moments(
    seed: int, geom: ChannelGeometry, h_th: float, n: int, workers: int = 1
) -> ChannelMoments:
    """
    Monte Carlo estimate of the thresholded mean and the capture probability.

    Radial samples follow ``sample_radial(seed, geom.sigma, n)`` exactly; chunk
    sums are merged with math.fsum in sub-stream order.
    """
    _check_threshold(h_th)
    if n < MIN_CHANNEL_SAMPLES:
        raise InvalidParameterError(f"mc_channel_moments needs n >= {MIN_CHANNEL_SAMPLES}, got {n}")
    a0, w_z = geom.a0, geom.w_z

    def _chunk(gen: np.random.Generator, size: int):
        r = radial_chunk(gen, size, geom.sigma)
        h = a0 * np.exp(-2.0 * r**2 / w_z**2)
        captured = h >= h_th
        return float(np.sum(np.where(captured, h, 0.0))), int(np.count_nonzero(captured))

    partials = map_substreams(_chunk, seed, n, workers=workers)
    total = math.fsum(s for s, _ in partials)
    hits = sum(c for _, c in partials)
    return ChannelMoments(mean=total / n, capture_probability=hits / n, n=n)


def far_field_error(geom: ChannelGeometry, points: int = 41) -> float:
    """max over r in [0, 4 w_z] of |h_pe_exact - h_pe_approx| / A0."""
    radii = np.linspace(0.0, 4.0 * geom.w_z, points)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FarFieldWarning)
        errors = [abs(h_pe_exact(float(r), geom) - h_pe_approx(float(r), geom)) for r in radii]
    return max(errors) / geom.a0
