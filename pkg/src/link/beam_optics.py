"""
Gaussian beam geometry for optical inter-satellite links.

The beam is modelled as a cone: the waist grows linearly with range at the
divergence angle theta = lambda / (pi * w0). All downstream statistics use the
far-field form w_z = z * tan(theta); the exact form w_z = z * tan(theta) + w0
only exists to quantify the error of that approximation at short range.
"""

import math
from dataclasses import dataclass
from typing import Literal

from src.utils.errors import InvalidParameterError, SingularGeometryError

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact SI value
THZ = 1e12

WaistMode = Literal["exact", "farfield"]


def divergence_angle(wavelength: float, w0: float) -> float:
    """Half-angle divergence lambda / (pi * w0) of a Gaussian beam."""
    if wavelength <= 0 or w0 <= 0:
        raise InvalidParameterError(
            f"wavelength and w0 must be positive, got wavelength={wavelength}, w0={w0}"
        )
    return wavelength / (math.pi * w0)


@dataclass(frozen=True)
class BeamParams:
    """Transmitter optics: waist at the transmitter and laser frequency."""

    w0: float
    f: float

    def __post_init__(self):
        if self.w0 <= 0:
            raise InvalidParameterError(f"w0 must be positive, got {self.w0}")
        if self.f <= 0:
            raise InvalidParameterError(f"f must be positive, got {self.f}")

    @classmethod
    def from_frequency(cls, w0: float, f: float) -> "BeamParams":
        return cls(w0=float(w0), f=float(f))

    @classmethod
    def from_thz(cls, w0: float, f_thz: float) -> "BeamParams":
        return cls(w0=float(w0), f=float(f_thz) * THZ)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f

    @property
    def theta(self) -> float:
        return divergence_angle(self.wavelength, self.w0)

    @property
    def f_thz(self) -> float:
        return self.f / THZ


def beam_waist(z: float, beam: BeamParams, mode: WaistMode = "farfield") -> float:
    """
    Beam waist at range z.

    Args:
        z: Propagation distance in meters
        beam: Transmitter optics
        mode: "exact" returns z*tan(theta) + w0, "farfield" returns z*tan(theta)

    Returns:
        Waist radius in meters
    """
    if z < 0:
        raise InvalidParameterError(f"z must be non-negative, got {z}")
    spread = z * math.tan(beam.theta)
    if mode == "farfield":
        return spread
    if mode == "exact":
        return spread + beam.w0
    raise InvalidParameterError(f"Unknown waist mode: {mode}")


def waist_relative_error(z: float, beam: BeamParams) -> float:
    """Relative error (exact - farfield) / exact of the far-field waist at range z."""
    exact = beam_waist(z, beam, mode="exact")
    return (exact - beam_waist(z, beam, mode="farfield")) / exact


def intensity(r: float, z: float, beam: BeamParams) -> float:
    """
    Transverse power intensity of the far-field beam, normalised to unit power.

    Returns (2 / (pi w_z^2)) * exp(-2 r^2 / w_z^2), which integrates to one over
    the transverse plane.
    """
    if r < 0:
        raise InvalidParameterError(f"r must be non-negative, got {r}")
    if z <= 0:
        raise SingularGeometryError(f"Far-field intensity is singular at z={z}")
    w_z = beam_waist(z, beam, mode="farfield")
    return gaussian_intensity(r, w_z)


def gaussian_intensity(r: float, w_z: float) -> float:
    """Unit-power Gaussian intensity for a beam of waist w_z at radial offset r."""
    return 2.0 / (math.pi * w_z**2) * math.exp(-2.0 * r**2 / w_z**2)
