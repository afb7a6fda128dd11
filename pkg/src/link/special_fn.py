"""
Special functions behind the closed-form average rate.

Only the Gauss hypergeometric family 2F1(1, b; b+1; -x) is needed. It equals
b * int_0^1 t^(b-1) / (1 + x t) dt, and is evaluated with a strategy ladder:

    x <= 0.5        power series sum_n b / (b + n) (-x)^n
    0.5 < x <= 20   Pfaff transformation to w = x / (1 + x):
                    (1 + x)^(-1) * 2F1(1, 1; b+1; w)
    x > 20          the integral representation, by adaptive quadrature in
                    s = ln t with a break at t = 1/x

The auxiliary function

    Y(x) = x^c ln(1 + snr x) - x^(c+1) / (c+1) * snr * 2F1(1, c+1; c+2; -snr x)
         = c * int_0^x ln(1 + snr y) y^(c-1) dy

is assembled in log space as exp(c ln x + ln K(snr x)) where K is the
bracketed factor, which is positive for every x > 0.
"""

import math
from dataclasses import dataclass

from src.utils.errors import DomainError, InvalidParameterError, NumericalFailureError
from src.utils.quadrature import adaptive_quad

SERIES_LIMIT = 0.5
PFAFF_LIMIT = 20.0
MAX_TERMS = 20_000
# e^(-40) of the mass lies below the truncated lower limit of the s-integral
_TAIL_EXPONENT = 40.0


@dataclass(frozen=True)
class Hyp2F1Request:
    """Arguments of 2F1(1, b; b+1; -x) and the requested relative accuracy."""

    b: float
    x: float
    target_rel_err: float = 1e-12

    def __post_init__(self):
        if not self.b > 0:
            raise InvalidParameterError(f"b must be positive, got {self.b}")
        if not self.x >= 0:
            raise InvalidParameterError(f"x must be non-negative, got {self.x}")
        if not 1e-14 <= self.target_rel_err <= 1e-6:
            raise InvalidParameterError(
                f"target_rel_err must lie in [1e-14, 1e-6], got {self.target_rel_err}"
            )


def _series(b: float, x: float, tol: float) -> float:
    total, power = 0.0, 1.0
    for n in range(MAX_TERMS):
        term = b / (b + n) * power
        total += term
        if abs(term) <= tol * abs(total):
            return total
        power *= -x
    raise NumericalFailureError("2F1 power series did not converge", {"b": b, "x": x})


def _pfaff(b: float, x: float, tol: float) -> float:
    w = x / (1.0 + x)
    total, term = 1.0, 1.0
    for n in range(MAX_TERMS):
        ratio = w * (n + 1.0) / (b + 1.0 + n)
        term *= ratio
        total += term
        # remaining terms shrink at least geometrically with ratio w
        if term * w / (1.0 - w) <= tol * total:
            return total / (1.0 + x)
    raise NumericalFailureError("2F1 Pfaff series did not converge", {"b": b, "x": x})


def _integral(b: float, x: float, tol: float) -> float:
    def _integrand(s: float) -> float:
        return math.exp(b * s) / (1.0 + x * math.exp(s))

    s_break = -math.log(x)
    s_low = s_break - _TAIL_EXPONENT / b
    epsrel = max(tol / 10.0, 1e-14)
    lower, _ = adaptive_quad(_integrand, s_low, s_break, epsabs=0.0, epsrel=epsrel, name="2F1 lower")
    upper, _ = adaptive_quad(_integrand, s_break, 0.0, epsabs=0.0, epsrel=epsrel, name="2F1 upper")
    return b * (lower + upper)


def hyp2f1_1b(req: Hyp2F1Request) -> float:
    """Gauss hypergeometric 2F1(1, b; b+1; -x), a value in (0, 1]."""
    b, x, tol = req.b, req.x, req.target_rel_err
    if x == 0:
        return 1.0
    if x <= SERIES_LIMIT:
        value = _series(b, x, tol)
    elif x <= PFAFF_LIMIT:
        value = _pfaff(b, x, tol)
    else:
        value = _integral(b, x, tol)
    if not 0 < value <= 1.0 + 1e-15:
        raise NumericalFailureError("2F1 evaluation left (0, 1]", {"b": b, "x": x, "value": value})
    return min(value, 1.0)


def hyp2f1_1b_quadrature(b: float, x: float, epsrel: float = 1e-12) -> float:
    """
    Reference value of 2F1(1, b; b+1; -x) from int_0^1 du / (1 + x u^(1/b)).

    The substitution u = t^b removes the t^(b-1) weight. The integrand is flat
    up to u = x^(-b) and decays algebraically after it, so the interval is cut
    into decades starting there and the pieces are summed.
    """
    if not b > 0 or not x >= 0:
        raise InvalidParameterError(f"Need b > 0 and x >= 0, got b={b}, x={x}")
    if x == 0:
        return 1.0
    inv_b = 1.0 / b

    def _integrand(u: float) -> float:
        return 1.0 / (1.0 + x * u**inv_b)

    knee = min(math.exp(-b * math.log(x)), 1.0)
    edges = [0.0, knee]
    while edges[-1] < 1.0:
        edges.append(min(edges[-1] * 10.0, 1.0))
    pieces = [
        adaptive_quad(_integrand, lo, hi, epsabs=0.0, epsrel=epsrel, name="2F1 oracle")[0]
        for lo, hi in zip(edges[:-1], edges[1:])
    ]
    return math.fsum(pieces)


def _upsilon_bracket(c: float, sx: float) -> float:
    """K(sx) = ln(1 + sx) - sx / (c+1) * 2F1(1, c+1; c+2; -sx), so Y(x) = x^c K(sx)."""
    if sx <= SERIES_LIMIT:
        # c * sum_n (-1)^(n+1) sx^n / (n (n + c)), free of the cancellation above
        total, power = 0.0, 1.0
        for n in range(1, MAX_TERMS):
            power *= sx
            term = power / (n * (n + c))
            total += term if n % 2 else -term
            if term <= 1e-17 * abs(total):
                return c * total
        raise NumericalFailureError("Upsilon series did not converge", {"c": c, "sx": sx})
    f = hyp2f1_1b(Hyp2F1Request(b=c + 1.0, x=sx))
    return math.log1p(sx) - sx / (c + 1.0) * f


def _check_upsilon_args(x: float, c: float, snr: float) -> None:
    if not x > 0:
        raise InvalidParameterError(f"x must be positive, got {x}")
    if not c > 0:
        raise InvalidParameterError(f"b_minus_1 must be positive, got {c}")
    if not snr > 0:
        raise InvalidParameterError(f"snr must be positive, got {snr}")


def _log_upsilon(x: float, c: float, snr: float) -> float:
    bracket = _upsilon_bracket(c, snr * x)
    if not bracket > 0:
        raise NumericalFailureError(
            "Upsilon bracket lost positivity", {"x": x, "c": c, "snr": snr, "bracket": bracket}
        )
    return math.log(bracket)


def upsilon(x: float, b_minus_1: float, snr: float) -> float:
    """Y(x) for exponent c = b_minus_1 at the given SNR."""
    _check_upsilon_args(x, b_minus_1, snr)
    log_value = b_minus_1 * math.log(x) + _log_upsilon(x, b_minus_1, snr)
    if log_value > 709.0:
        raise NumericalFailureError("Upsilon overflows", {"x": x, "c": b_minus_1, "snr": snr})
    return math.exp(log_value)


def upsilon_ratio(x: float, ref: float, b_minus_1: float, snr: float) -> float:
    """Y(x) / ref^c, evaluated without forming either power; 0 for x = 0."""
    if x == 0:
        return 0.0
    _check_upsilon_args(x, b_minus_1, snr)
    if not ref > 0:
        raise InvalidParameterError(f"ref must be positive, got {ref}")
    log_value = b_minus_1 * (math.log(x) - math.log(ref)) + _log_upsilon(x, b_minus_1, snr)
    if log_value > 709.0:
        raise NumericalFailureError("Upsilon ratio overflows", {"x": x, "ref": ref, "c": b_minus_1})
    return math.exp(log_value)


def _check_omega_args(h_th: float, a0_delta: float, gamma_exp: float, snr: float) -> None:
    if not a0_delta > 0 or not gamma_exp > 0 or not snr > 0:
        raise InvalidParameterError(
            f"a0_delta, gamma_exp and snr must be positive, got {a0_delta}, {gamma_exp}, {snr}"
        )
    if not 0 <= h_th <= a0_delta:
        raise DomainError(f"h_th must lie in [0, a0_delta={a0_delta:.6g}], got {h_th}")


def omega_normalized_quadrature(h_th: float, a0_delta: float, gamma_exp: float, snr: float) -> float:
    """
    gamma * A^(-gamma) * Omega by quadrature, i.e. E[ln(1 + snr h); h >= h_th].

    With u = y^gamma and v = u / A^gamma the integral becomes
    int_{(h_th/A)^gamma}^1 ln(1 + snr A v^(1/gamma)) dv, which is bounded on the
    whole interval and kinks at v = (snr A)^(-gamma).
    """
    _check_omega_args(h_th, a0_delta, gamma_exp, snr)
    if h_th == a0_delta:
        return 0.0
    peak = snr * a0_delta
    inv_gamma = 1.0 / gamma_exp

    def _integrand(v: float) -> float:
        if v <= 0.0:
            return 0.0
        return math.log1p(peak * math.exp(inv_gamma * math.log(v)))

    v_low = 0.0 if h_th == 0 else math.exp(gamma_exp * math.log(h_th / a0_delta))
    v_break = math.exp(-gamma_exp * math.log(peak))
    value, _ = adaptive_quad(
        _integrand, v_low, 1.0, epsabs=0.0, epsrel=1e-12, points=[v_break], name="Omega"
    )
    return value


def omega_quadrature(h_th: float, a0_delta: float, gamma_exp: float, snr: float) -> float:
    """Omega = int_{h_th}^{A} ln(1 + snr y) y^(gamma - 1) dy by adaptive quadrature."""
    normalized = omega_normalized_quadrature(h_th, a0_delta, gamma_exp, snr)
    return math.exp(gamma_exp * math.log(a0_delta)) / gamma_exp * normalized


def omega_closed_form(h_th: float, a0_delta: float, gamma_exp: float, snr: float) -> float:
    """Omega = (Y(A) - Y(h_th)) / gamma through the hypergeometric closed form."""
    _check_omega_args(h_th, a0_delta, gamma_exp, snr)
    upper = upsilon(a0_delta, gamma_exp, snr)
    lower = upsilon(h_th, gamma_exp, snr) if h_th > 0 else 0.0
    return (upper - lower) / gamma_exp
