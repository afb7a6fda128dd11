"""
Tests for relay geometry, latency and the two planners.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from src.link.beam_optics import SPEED_OF_LIGHT, THZ, BeamParams
from src.link.constellation import (
    ConstellationConfig,
    HopLink,
    LatencyPoint,
    arc_length,
    evaluate_hops,
    first_feasible,
    hop_distance,
    joint_plan,
    latency_scan,
    latency_sweep,
    min_satellites,
    optimize_frequency,
    optimize_frequency_point,
    optimized_scan,
    total_latency,
)
from src.link.pointing import PointingModel
from src.link.rate import LinkBudget, avg_rate_analytic, avg_rate_quadrature
from src.utils.errors import InvalidParameterError, SingularGeometryError

L = 3000e3
L_S = 6900e3


@pytest.fixture
def budget():
    return LinkBudget(bandwidth=10e9, p_t=0.5, eta=0.5, h_pl=0.9, sigma_n2=1e-12)


@pytest.fixture
def pointing():
    return PointingModel(sigma_s0=2.0, k0=0.1, d0=100e3, mode="exponential")


@pytest.fixture
def link(pointing, budget):
    return HopLink(w0=0.1, pointing=pointing, w_d=0.1, h_th=1e-6, budget=budget)


@pytest.fixture
def config():
    return ConstellationConfig(L=L, L_S=L_S, D=100e9, T_th=1.0, N_max=40)


@pytest.fixture
def beam():
    return BeamParams.from_thz(0.1, 200.0)


class TestGeometry:
    """Equal-chord hops along the orbit."""

    def test_single_hop_is_the_chord(self):
        assert hop_distance(1, L, L_S) == L

    def test_chain_covers_the_chord(self):
        for N in range(1, 10_001):
            assert N * hop_distance(N, L, L_S) >= L * (1.0 - 1e-15)

    def test_converges_to_arc_length(self):
        N = 10_000
        assert N * hop_distance(N, L, L_S) == pytest.approx(arc_length(L, L_S), rel=1e-6)

    def test_hops_shrink_with_N(self):
        deltas = [hop_distance(N, L, L_S) for N in range(1, 50)]
        assert np.all(np.diff(deltas) < 0)

    @pytest.mark.parametrize("N, chord", [(0, L), (1, 2.5 * L_S), (1, 0.0)])
    def test_invalid_inputs_raise(self, N, chord):
        with pytest.raises(InvalidParameterError):
            hop_distance(N, chord, L_S)

    def test_invalid_config_raises(self):
        with pytest.raises(InvalidParameterError):
            ConstellationConfig(L=L, L_S=L_S, D=100e9, T_th=0.0)
        with pytest.raises(InvalidParameterError):
            ConstellationConfig(L=L, L_S=L_S, D=100e9, T_th=1.0, N_max=0)


class TestLatency:
    """N D / R(delta) with optional propagation delay."""

    def test_total_latency_definition(self, config, beam, pointing, budget):
        N = 5
        delta = hop_distance(N, L, L_S)
        rate = avg_rate_analytic(delta, beam, pointing, 0.1, 1e-6, budget).rate
        assert total_latency(N, config, beam, pointing, 0.1, 1e-6, budget) == pytest.approx(
            N * 100e9 / rate, rel=1e-12
        )

    def test_propagation_delay(self, config, beam, link):
        N = 4
        with_delay = evaluate_hops(N, replace(config, include_propagation_delay=True), beam, link)
        without = evaluate_hops(N, config, beam, link)
        assert with_delay.latency - without.latency == pytest.approx(
            N * hop_distance(N, L, L_S) / SPEED_OF_LIGHT, rel=1e-9
        )

    def test_outage_gives_infinite_latency(self, config, beam, budget, pointing):
        link = HopLink(w0=0.1, pointing=pointing, w_d=0.1, h_th=1.0, budget=budget)
        point = evaluate_hops(1, config, beam, link)
        assert point.latency == math.inf
        assert not point.finite

    def test_interior_minimum_over_N(self, config, beam, link):
        def interior(points):
            best = int(np.argmin([p.latency for p in points]))
            return 0 < best < len(points) - 1

        sweep = latency_sweep(config, beam, link)
        assert interior(sweep["fixed"]) or interior(sweep["optimized"])


class TestPlanners:
    """min_satellites, optimize_frequency and joint_plan."""

    def test_relaxed_budget_needs_one_hop(self, config, beam, pointing, budget):
        plan = min_satellites(replace(config, T_th=1e9), beam, pointing, 0.1, 1e-6, budget)
        assert plan.feasible
        assert plan.N == 1
        assert plan.delta == L

    def test_min_satellites_matches_brute_force(self, config, beam, pointing, budget):
        latencies = [total_latency(N, config, beam, pointing, 0.1, 1e-6, budget) for N in range(1, 41)]
        finite = [t for t in latencies if math.isfinite(t)]
        previous = 0
        for T_th in sorted({min(finite) * s for s in (1.0, 1.2, 2.0, 5.0, 50.0)}, reverse=True):
            plan = min_satellites(replace(config, T_th=T_th), beam, pointing, 0.1, 1e-6, budget)
            expected = next(N for N, t in enumerate(latencies, start=1) if t <= T_th)
            assert plan.feasible
            assert plan.N == expected
            assert plan.total_latency <= T_th
            # tighter budgets never need fewer hops
            assert plan.N >= previous
            previous = plan.N

    def test_infeasible_budget(self, config, beam, pointing, budget):
        plan = min_satellites(replace(config, T_th=1e-9), beam, pointing, 0.1, 1e-6, budget)
        assert not plan.feasible
        scan = [total_latency(N, config, beam, pointing, 0.1, 1e-6, budget) for N in range(1, 41)]
        assert plan.total_latency == min(scan)

    def test_first_feasible_prefers_smallest_N(self):
        points = [LatencyPoint(N=n, delta=1.0, f=1.0, rate=1.0, latency=t) for n, t in [(1, 5.0), (2, 0.5), (3, 0.4)]]
        assert first_feasible(points, 1.0).N == 2
        assert not first_feasible(points, 0.1).feasible

    def test_optimized_never_worse_than_fixed(self, config, beam, link):
        sweep = latency_sweep(config, beam, link)
        assert len(sweep["fixed"]) == len(sweep["optimized"]) == config.N_max
        for fixed, optimized in zip(sweep["fixed"], sweep["optimized"]):
            assert optimized.latency <= fixed.latency

    def test_optimize_frequency_within_range(self, config, beam, pointing, budget):
        result = optimize_frequency(8, config, beam, pointing, 0.1, 1e-6, budget)
        assert result.feasible
        assert 50 * THZ <= result.f_star <= 400 * THZ
        fixed = total_latency(8, config, beam, pointing, 0.1, 1e-6, budget)
        assert result.latency <= fixed

    def test_optimize_frequency_refinement_only_improves(self, config, beam, pointing, budget):
        coarse = optimize_frequency(8, config, beam, pointing, 0.1, 1e-6, budget, refine=False)
        refined = optimize_frequency(8, config, beam, pointing, 0.1, 1e-6, budget)
        assert refined.latency <= coarse.latency

    def test_optimize_frequency_all_outage(self, config, beam, pointing, budget):
        result = optimize_frequency(1, config, beam, pointing, 0.1, 1.0, budget)
        assert not result.feasible
        assert result.f_star is None
        assert result.latency == math.inf

    def test_degenerate_frequency_range(self, config, beam, pointing, budget):
        result = optimize_frequency(3, config, beam, pointing, 0.1, 1e-6, budget, f_range=(200 * THZ, 200 * THZ))
        assert result.f_star == pytest.approx(200 * THZ)
        assert result.latency == pytest.approx(total_latency(3, config, beam, pointing, 0.1, 1e-6, budget))

    def test_joint_plan_is_first_optimized_feasible(self, config, beam, pointing, budget, link):
        latencies = [p.latency for p in optimized_scan(config, link)]
        T_th = sorted(latencies)[3]
        plan = joint_plan(replace(config, T_th=T_th), beam, pointing, 0.1, 1e-6, budget)
        assert plan.feasible
        assert plan.N == next(N for N, t in enumerate(latencies, start=1) if t <= T_th)
        fixed = min_satellites(replace(config, T_th=T_th), beam, pointing, 0.1, 1e-6, budget)
        if fixed.feasible:
            assert plan.N <= fixed.N

    def test_worker_count_does_not_change_scan(self, config, beam, link):
        assert latency_scan(config, beam, link, workers=1) == latency_scan(config, beam, link, workers=4)

    @pytest.mark.parametrize("N", [1, 8])
    def test_optimal_frequency_stable_under_grid_doubling(self, config, beam, pointing, budget, N):
        coarse = optimize_frequency(N, config, beam, pointing, 0.1, 1e-6, budget, grid=71)
        fine = optimize_frequency(N, config, beam, pointing, 0.1, 1e-6, budget, grid=141)
        assert coarse.feasible and fine.feasible
        assert abs(coarse.f_star - fine.f_star) / THZ < 0.1


class TestOverfilledDetector:
    """Cells where the detector is wider than the beam (A0 > 1) are excluded."""

    @pytest.fixture
    def config64(self, config):
        return replace(config, N_max=64)

    def test_short_hop_at_high_frequency_is_rejected(self, pointing, budget):
        delta = hop_distance(64, L, L_S)
        with pytest.raises(SingularGeometryError):
            avg_rate_analytic(delta, BeamParams.from_thz(0.1, 400.0), pointing, 0.1, 1e-6, budget)

    def test_cell_is_marked_invalid(self, config64, link):
        point = evaluate_hops(64, config64, BeamParams.from_thz(0.1, 400.0), link)
        assert not point.valid
        assert point.latency == math.inf
        assert point.rate == 0.0
        assert point.dropped == 1

    def test_frequency_search_skips_invalid_cells(self, config64, link):
        point = optimize_frequency_point(64, config64, link)
        assert point.valid
        assert point.finite
        assert point.dropped > 0
        assert 50 * THZ <= point.f <= 400 * THZ
        # the optimum itself must be a valid cell
        assert evaluate_hops(64, config64, BeamParams.from_frequency(0.1, point.f), link).valid

    def test_sweep_to_64_hops(self, config64, beam, link):
        sweep = latency_sweep(config64, beam, link)
        assert all(p.valid for p in sweep["optimized"])
        for fixed, optimized in zip(sweep["fixed"], sweep["optimized"]):
            assert optimized.latency <= fixed.latency


def _quadrature_latency(N, config, beam, pointing, budget):
    delta = hop_distance(N, config.L, config.L_S)
    try:
        result = avg_rate_quadrature(delta, beam, pointing, 0.1, 1e-6, budget)
    except SingularGeometryError:
        return math.inf
    if result.outage or result.rate <= 0:
        return math.inf
    return N * config.D / result.rate


def _budgets_between(latencies):
    """Latency budgets at least 1e-4 (relative) away from every latency in the scan."""
    finite = sorted(t for t in latencies if math.isfinite(t))
    picks = {finite[0], finite[len(finite) // 2], finite[-1]}
    budgets = [finite[0] * 0.5]
    for t in sorted(picks):
        candidate = t * 1.001
        while any(abs(candidate - u) <= 1e-4 * u for u in finite):
            candidate *= 1.01
        budgets.append(candidate)
    return sorted(budgets)


class TestRandomConfigurations:
    """min_satellites against an exhaustive scan that uses quadrature rates."""

    @pytest.mark.parametrize("case", range(20))
    def test_matches_quadrature_brute_force(self, budget, case):
        rng = np.random.default_rng([2024, case])
        config = ConstellationConfig(
            L=rng.uniform(1000e3, 4000e3),
            L_S=L_S,
            D=rng.uniform(10e9, 200e9),
            T_th=1.0,
            N_max=int(rng.integers(5, 21)),
        )
        beam = BeamParams.from_thz(0.1, rng.uniform(100.0, 400.0))
        pointing = PointingModel(
            sigma_s0=rng.uniform(1.0, 4.0),
            k0=rng.uniform(0.0, 0.05),
            d0=100e3,
            mode=str(rng.choice(["constant", "exponential"])),
        )
        brute = [_quadrature_latency(N, config, beam, pointing, budget) for N in range(1, config.N_max + 1)]

        previous = None
        for T_th in _budgets_between(brute):
            plan = min_satellites(replace(config, T_th=T_th), beam, pointing, 0.1, 1e-6, budget)
            expected = next((N for N, t in enumerate(brute, start=1) if t <= T_th), None)
            if expected is None:
                assert not plan.feasible
                continue
            assert plan.feasible
            assert plan.N == expected
            # relaxing the budget never needs more hops
            if previous is not None:
                assert plan.N <= previous
            previous = plan.N
