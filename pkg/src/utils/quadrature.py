"""
Thin wrapper around scipy's adaptive Gauss-Kronrod quadrature that turns
QUADPACK diagnostics into NumericalFailureError instead of warnings.
"""

from typing import Callable, Optional, Sequence, Tuple

from loguru import logger
from scipy import integrate

from src.utils.errors import NumericalFailureError

# QUADPACK sometimes flags roundoff while its own error estimate already meets
# the request; accept the result when the estimate is within this factor.
_ACCEPT_FACTOR = 10.0


def adaptive_quad(
    fn: Callable[[float], float],
    a: float,
    b: float,
    epsabs: float = 1e-12,
    epsrel: float = 1e-12,
    points: Optional[Sequence[float]] = None,
    limit: int = 200,
    name: str = "integral",
) -> Tuple[float, float]:
    """
    Integrate fn over [a, b] with scipy.integrate.quad.

    Args:
        fn: Integrand
        a, b: Integration bounds (may be infinite when no points are given)
        epsabs, epsrel: Absolute and relative targets
        points: Interior break points where the integrand changes character
        limit: Maximum number of subintervals
        name: Label used in diagnostics

    Returns:
        Tuple of (value, absolute error estimate)
    """
    if a == b:
        return 0.0, 0.0
    if points is not None:
        lo, hi = min(a, b), max(a, b)
        points = [p for p in points if lo < p < hi]
        if not points:
            points = None
    result = integrate.quad(
        fn, a, b, epsabs=epsabs, epsrel=epsrel, points=points, limit=limit, full_output=1
    )
    value, abserr = result[0], result[1]
    if len(result) == 4:
        tolerance = max(epsabs, epsrel * abs(value))
        if abserr > _ACCEPT_FACTOR * tolerance:
            raise NumericalFailureError(
                f"Quadrature of {name} did not converge: {result[3]}",
                {"value": value, "abserr": abserr, "requested": tolerance},
            )
        logger.debug(f"Quadrature of {name} flagged but within tolerance: abserr={abserr:.3e}")
    return value, abserr
