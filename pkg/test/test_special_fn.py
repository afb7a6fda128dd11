"""
Tests for 2F1(1, b; b+1; -x), the Upsilon helper and the Omega integral.
"""

import math

import numpy as np
import pytest
from scipy import integrate, special

from src.link.special_fn import (
    PFAFF_LIMIT,
    SERIES_LIMIT,
    Hyp2F1Request,
    hyp2f1_1b,
    hyp2f1_1b_quadrature,
    omega_closed_form,
    omega_quadrature,
    upsilon,
    upsilon_ratio,
)
from src.utils.errors import DomainError, InvalidParameterError

GRID_B = [1.05, 1.5, 2.0, 4.0]
GRID_X = [1e-3, 1.0, 1e3, 1e8, 1e11]
UPSILON_X = [1e-6, 10**-4.5, 1e-3]
UPSILON_C = [0.05, 0.5, 3.0]
UPSILON_SNR = [1e6, 1e9, 1e12]


def F(b, x):
    return hyp2f1_1b(Hyp2F1Request(b=b, x=x))


class TestHyp2F1:
    """Strategy ladder against independent references."""

    @pytest.mark.parametrize("b", GRID_B)
    @pytest.mark.parametrize("x", GRID_X)
    def test_matches_integral_oracle(self, b, x):
        assert F(b, x) == pytest.approx(hyp2f1_1b_quadrature(b, x), rel=1e-10)

    @pytest.mark.parametrize("x", GRID_X)
    def test_unit_b_closed_form(self, x):
        assert F(1.0, x) == pytest.approx(math.log1p(x) / x, rel=1e-12)

    @pytest.mark.parametrize("x", [1e-3, 0.3, SERIES_LIMIT, 0.51, 5.0, PFAFF_LIMIT, 20.5, 300.0])
    def test_matches_scipy_across_branch_limits(self, x):
        assert F(2.5, x) == pytest.approx(special.hyp2f1(1.0, 2.5, 3.5, -x), rel=1e-10)

    def test_continuity_at_branch_limits(self):
        for limit in (SERIES_LIMIT, PFAFF_LIMIT):
            below, above = F(1.7, limit * (1 - 1e-12)), F(1.7, limit * (1 + 1e-12))
            assert below == pytest.approx(above, rel=1e-10)

    def test_zero_argument(self):
        assert F(3.0, 0.0) == 1.0

    def test_b_two_closed_form(self):
        # 2 int_0^1 t / (1 + x t) dt = 2 (1/x - ln(1+x)/x^2)
        x = 1e8
        assert F(2.0, x) == pytest.approx(2.0 * (1.0 / x - math.log1p(x) / x**2), rel=1e-10)

    def test_values_lie_in_unit_interval(self):
        for b in GRID_B:
            for x in GRID_X:
                assert 0.0 < F(b, x) <= 1.0

    @pytest.mark.parametrize("b", [1.0] + GRID_B)
    def test_strictly_decreasing_in_x(self, b):
        values = [F(b, float(x)) for x in np.logspace(-3.0, 11.0, 57)]
        assert all(later < earlier for earlier, later in zip(values, values[1:]))

    @pytest.mark.parametrize(
        "kwargs",
        [{"b": 0.0, "x": 1.0}, {"b": 1.0, "x": -1.0}, {"b": 1.0, "x": 1.0, "target_rel_err": 1e-3}],
    )
    def test_invalid_request_raises(self, kwargs):
        with pytest.raises(InvalidParameterError):
            Hyp2F1Request(**kwargs)


class TestUpsilon:
    """Y(x) = c * int_0^x ln(1 + snr y) y^(c-1) dy."""

    @pytest.mark.parametrize("c, snr, x", [(0.5, 10.0, 0.01), (1.4, 2.25e11, 8.8e-4), (3.0, 1e3, 0.2)])
    def test_matches_defining_integral(self, c, snr, x):
        value, _ = integrate.quad(
            lambda y: c * math.log1p(snr * y) * y ** (c - 1.0), 0.0, x, epsabs=0.0, epsrel=1e-12, limit=200
        )
        assert upsilon(x, c, snr) == pytest.approx(value, rel=1e-9)

    @pytest.mark.parametrize("x", UPSILON_X)
    @pytest.mark.parametrize("c", UPSILON_C)
    @pytest.mark.parametrize("snr", UPSILON_SNR)
    def test_matches_omega_quadrature_on_grid(self, x, c, snr):
        assert upsilon(x, c, snr) == pytest.approx(c * omega_quadrature(0.0, x, c, snr), rel=1e-8)

    @pytest.mark.parametrize("c", UPSILON_C)
    @pytest.mark.parametrize("snr", UPSILON_SNR)
    def test_strictly_increasing_in_x(self, c, snr):
        values = [upsilon(float(x), c, snr) for x in np.logspace(-6.0, -3.0, 25)]
        assert all(later > earlier for earlier, later in zip(values, values[1:]))

    def test_ratio_avoids_overflow(self):
        # x^c alone underflows, the ratio does not
        c, x = 400.0, 1e-3
        ratio = upsilon_ratio(x, x, c, 1e6)
        assert ratio == pytest.approx(math.log1p(1e3) - 1e3 / (c + 1.0) * F(c + 1.0, 1e3), rel=1e-12)
        assert upsilon_ratio(0.0, x, c, 1e6) == 0.0

    def test_invalid_arguments_raise(self):
        with pytest.raises(InvalidParameterError):
            upsilon(0.0, 1.0, 1.0)
        with pytest.raises(InvalidParameterError):
            upsilon(1.0, 0.0, 1.0)


class TestOmega:
    """Closed form against quadrature of the defining integral."""

    @pytest.mark.parametrize(
        "h_th, a0, gamma, snr",
        [
            (1e-6, 8.8e-4, 1.42, 2.25e11),
            (0.0, 8.8e-4, 0.4, 2.25e11),
            (1e-5, 5.5e-5, 2.0, 1e8),
            (0.1, 1.0, 6.25, 10.0),
        ],
    )
    def test_closed_form_matches_quadrature(self, h_th, a0, gamma, snr):
        assert omega_closed_form(h_th, a0, gamma, snr) == pytest.approx(
            omega_quadrature(h_th, a0, gamma, snr), rel=1e-8
        )

    def test_empty_interval(self):
        assert omega_quadrature(0.5, 0.5, 2.0, 10.0) == 0.0
        assert omega_closed_form(0.5, 0.5, 2.0, 10.0) == pytest.approx(0.0, abs=1e-15)

    def test_threshold_above_peak_raises(self):
        with pytest.raises(DomainError):
            omega_quadrature(1.0, 0.5, 2.0, 10.0)
