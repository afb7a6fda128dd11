"""
Radial pointing-error statistics.

The horizontal and vertical deviations at the receiver are independent
zero-mean normals with per-axis standard deviation sigma_s, so the radial
deviation r is Rayleigh distributed with scale sigma_s. The scale either stays
constant or grows exponentially with the hop distance.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.utils.errors import InvalidParameterError
from src.utils.rng import map_substreams, normal_pairs

SigmaMode = Literal["constant", "exponential"]


@dataclass(frozen=True)
class PointingModel:
    """
    Jitter statistics of the pointing system.

    Attributes:
        sigma_s0: Reference per-axis deviation in meters
        k0: Dimensionless growth rate of the exponential model
        d0: Reference distance in meters
        mode: "constant" keeps sigma_s0 at every range, "exponential" uses
            sigma_s0 * exp(k0 * delta / d0)
    """

    sigma_s0: float
    k0: float = 0.0
    d0: float = 100e3
    mode: SigmaMode = "constant"

    def __post_init__(self):
        if self.sigma_s0 <= 0:
            raise InvalidParameterError(f"sigma_s0 must be positive, got {self.sigma_s0}")
        if self.d0 <= 0:
            raise InvalidParameterError(f"d0 must be positive, got {self.d0}")
        if self.k0 < 0:
            raise InvalidParameterError(f"k0 must be non-negative, got {self.k0}")
        if self.mode not in ("constant", "exponential"):
            raise InvalidParameterError(f"Unknown sigma mode: {self.mode}")


def sigma_s(model: PointingModel, delta: float) -> float:
    """Per-axis pointing deviation at hop distance delta (meters)."""
    if delta < 0:
        raise InvalidParameterError(f"delta must be non-negative, got {delta}")
    if model.mode == "constant":
        return model.sigma_s0
    return model.sigma_s0 * math.exp(model.k0 * delta / model.d0)


def _check_sigma(sigma: float) -> None:
    if sigma <= 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")


def rayleigh_pdf(r: float, sigma: float) -> float:
    """Rayleigh density (r / sigma^2) * exp(-r^2 / (2 sigma^2))."""
    _check_sigma(sigma)
    if r < 0:
        raise InvalidParameterError(f"r must be non-negative, got {r}")
    return r / sigma**2 * math.exp(-(r**2) / (2.0 * sigma**2))


def rayleigh_cdf(r: float, sigma: float) -> float:
    _check_sigma(sigma)
    if r <= 0:
        return 0.0
    if math.isinf(r):
        return 1.0
    return -math.expm1(-(r**2) / (2.0 * sigma**2))


def radial_chunk(gen: np.random.Generator, size: int, sigma: float) -> np.ndarray:
    """Radial deviations of one sub-stream chunk."""
    x, y = normal_pairs(gen, size)
    return sigma * np.hypot(x, y)


def sample_radial(seed: int, sigma: float, n: int, workers: int = 1) -> np.ndarray:
    """
    Draw n radial deviations r = sqrt(x^2 + y^2), x and y ~ N(0, sigma^2).

    Deterministic per (seed, sigma, n); chunks follow the sub-stream rule of
    ``src.utils.rng`` and are concatenated in index order.
    """
    _check_sigma(sigma)
    chunks = map_substreams(lambda gen, size: radial_chunk(gen, size, sigma), seed, n, workers=workers)
    return np.concatenate(chunks)
