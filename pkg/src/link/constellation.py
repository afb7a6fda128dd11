"""
Cooperative relaying along a circular orbit.

Source and destination satellites sit on a circle of radius L_S, a chord L
apart. N equally spaced hops (N - 1 relays) split the arc angle
phi = 2 arcsin(L / (2 L_S)) into N parts, so each hop spans the chord
delta = 2 L_S sin(phi / (2 N)). All hops share the same rate R(delta), giving a
total transmission latency N D / R(delta).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from loguru import logger
from scipy import optimize
from tqdm import tqdm

from src.link.beam_optics import SPEED_OF_LIGHT, THZ, BeamParams
from src.link.pointing import PointingModel
from src.link.rate import LinkBudget, avg_rate_analytic
from src.utils.errors import InvalidParameterError, SingularGeometryError

T = TypeVar("T")
U = TypeVar("U")


@dataclass(frozen=True)
class ConstellationConfig:
    """
    Attributes:
        L: Chord between source and destination in meters
        L_S: Orbit radius from the Earth centre in meters
        D: Data size in bits
        T_th: Latency budget in seconds
        N_max: Largest hop count searched
        f_range: Frequency search interval in Hz
        f_grid: Number of grid points of the frequency search
        include_propagation_delay: Add N * delta / c to the latency
    """

    L: float
    L_S: float
    D: float
    T_th: float
    N_max: int = 64
    f_range: Tuple[float, float] = (50 * THZ, 400 * THZ)
    f_grid: int = 71
    include_propagation_delay: bool = False

    def __post_init__(self):
        if not 0 < self.L <= 2.0 * self.L_S:
            raise InvalidParameterError(
                f"Chord L={self.L} must lie in (0, 2 L_S={2.0 * self.L_S}]"
            )
        if not self.D > 0 or not self.T_th > 0:
            raise InvalidParameterError(f"D and T_th must be positive, got D={self.D}, T_th={self.T_th}")
        if self.N_max < 1:
            raise InvalidParameterError(f"N_max must be at least 1, got {self.N_max}")
        f_lo, f_hi = self.f_range
        if not 0 < f_lo <= f_hi:
            raise InvalidParameterError(f"Invalid frequency range {self.f_range}")
        if self.f_grid < 2:
            raise InvalidParameterError(f"f_grid must be at least 2, got {self.f_grid}")


@dataclass(frozen=True)
class HopLink:
    """Everything about a hop that does not depend on N or f."""

    w0: float
    pointing: PointingModel
    w_d: float
    h_th: float
    budget: LinkBudget


@dataclass(frozen=True)
class LatencyPoint:
    """One (N, f) cell. Cells with A0 > 1 are invalid; dropped counts the invalid cells searched for it."""

    N: int
    delta: float
    f: float
    rate: float
    latency: float
    valid: bool = True
    dropped: int = 0

    @property
    def finite(self) -> bool:
        return math.isfinite(self.latency)


@dataclass(frozen=True)
class FrequencyOptimum:
    f_star: Optional[float]
    latency: float
    feasible: bool


@dataclass(frozen=True)
class ConstellationPlan:
    N: int
    delta: float
    per_hop_rate: float
    total_latency: float
    f_used: Optional[float]
    feasible: bool


def hop_distance(N: int, L: float, L_S: float) -> float:
    """Chord 2 L_S sin(arcsin(L / (2 L_S)) / N) of one of N equal hops."""
    if N < 1:
        raise InvalidParameterError(f"N must be at least 1, got {N}")
    if not 0 < L <= 2.0 * L_S:
        raise InvalidParameterError(f"Chord L={L} exceeds the orbit diameter {2.0 * L_S}")
    if N == 1:
        return L
    return 2.0 * L_S * math.sin(math.asin(L / (2.0 * L_S)) / N)


def arc_length(L: float, L_S: float) -> float:
    return 2.0 * L_S * math.asin(L / (2.0 * L_S))


def _parallel_map(fn: Callable[[T], U], items: Sequence[T], workers: int, desc: str = "") -> List[U]:
    items = list(items)
    if workers <= 1:
        return [fn(item) for item in tqdm(items, desc=desc, disable=not desc)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(tqdm(pool.map(fn, items), total=len(items), desc=desc, disable=not desc))


def _log_dropped(points: Sequence[LatencyPoint], label: str) -> None:
    dropped = sum(p.dropped for p in points)
    if dropped:
        logger.warning(f"{label}: {dropped} (N, f) cell(s) with A0 > 1 excluded")


def evaluate_hops(N: int, config: ConstellationConfig, beam: BeamParams, link: HopLink) -> LatencyPoint:
    """Per-hop rate and total latency of an N-hop relay chain at the beam's frequency."""
    delta = hop_distance(N, config.L, config.L_S)
    try:
        result = avg_rate_analytic(delta, beam, link.pointing, link.w_d, link.h_th, link.budget)
    except SingularGeometryError as e:
        logger.debug(f"N={N} at {beam.f_thz:.6g} THz dropped: {e}")
        return LatencyPoint(N=N, delta=delta, f=beam.f, rate=0.0, latency=math.inf, valid=False, dropped=1)
    if result.outage or result.rate <= 0:
        latency = math.inf
    else:
        latency = N * config.D / result.rate
        if config.include_propagation_delay:
            latency += N * delta / SPEED_OF_LIGHT
    return LatencyPoint(N=N, delta=delta, f=beam.f, rate=result.rate, latency=latency)


def total_latency(
    N: int,
    config: ConstellationConfig,
    beam: BeamParams,
    pointing: PointingModel,
    w_d: float,
    h_th: float,
    budget: LinkBudget,
) -> float:
    """Sum of D / R_n over N equal hops; math.inf when the hop is in outage."""
    link = HopLink(w0=beam.w0, pointing=pointing, w_d=w_d, h_th=h_th, budget=budget)
    return evaluate_hops(N, config, beam, link).latency


def first_feasible(points: Sequence[LatencyPoint], T_th: float) -> ConstellationPlan:
    """First point meeting T_th, else an infeasible plan at the smallest latency."""
    for point in points:
        if point.latency <= T_th:
            return ConstellationPlan(
                N=point.N,
                delta=point.delta,
                per_hop_rate=point.rate,
                total_latency=point.latency,
                f_used=point.f,
                feasible=True,
            )
    best = min(points, key=lambda p: (p.latency, p.N))
    return ConstellationPlan(
        N=best.N,
        delta=best.delta,
        per_hop_rate=best.rate,
        total_latency=best.latency,
        f_used=best.f if best.finite else None,
        feasible=False,
    )


def latency_scan(
    config: ConstellationConfig, beam: BeamParams, link: HopLink, workers: int = 1
) -> List[LatencyPoint]:
    """Exhaustive fixed-frequency scan over N in [1, N_max], in N order."""
    points = _parallel_map(
        lambda n: evaluate_hops(n, config, beam, link),
        range(1, config.N_max + 1),
        workers,
        desc="Fixed-frequency scan",
    )
    _log_dropped(points, "fixed-frequency scan")
    return points


def min_satellites(
    config: ConstellationConfig,
    beam: BeamParams,
    pointing: PointingModel,
    w_d: float,
    h_th: float,
    budget: LinkBudget,
    workers: int = 1,
) -> ConstellationPlan:
    """
    Smallest hop count meeting the latency budget at the beam's frequency.

    Returns the first feasible N of the exhaustive scan; when no N meets T_th
    the plan is marked infeasible and carries the latency-minimising N.
    """
    link = HopLink(w0=beam.w0, pointing=pointing, w_d=w_d, h_th=h_th, budget=budget)
    plan = first_feasible(latency_scan(config, beam, link, workers), config.T_th)
    logger.debug(f"min_satellites: N={plan.N}, feasible={plan.feasible}, latency={plan.total_latency:.6g}")
    return plan


def _latency_at(N: int, config: ConstellationConfig, link: HopLink, f_thz: float) -> LatencyPoint:
    return evaluate_hops(N, config, BeamParams.from_thz(link.w0, f_thz), link)


def optimize_frequency_point(
    N: int,
    config: ConstellationConfig,
    link: HopLink,
    f_range: Optional[Tuple[float, float]] = None,
    grid: Optional[int] = None,
    refine: bool = True,
) -> LatencyPoint:
    """
    Exhaustive grid search of the laser frequency minimising the N-hop latency.

    When the grid minimum is interior and strictly below both neighbours, a
    golden-section search over the bracketing interval refines it; the refined
    point is kept only if it improves on the grid.
    """
    f_lo, f_hi = f_range or config.f_range
    grid = grid or config.f_grid
    if grid < 2:
        raise InvalidParameterError(f"grid must be at least 2, got {grid}")
    if f_lo == f_hi:
        return _latency_at(N, config, link, f_lo / THZ)

    frequencies = np.linspace(f_lo / THZ, f_hi / THZ, grid)
    points = [_latency_at(N, config, link, float(f)) for f in frequencies]
    dropped = sum(not p.valid for p in points)
    if dropped:
        logger.debug(f"N={N}: {dropped}/{grid} grid frequencies dropped (A0 > 1)")
    latencies = np.array([p.latency for p in points])
    best = int(np.argmin(latencies))
    best_point = replace(points[best], dropped=dropped)
    if not refine or not best_point.finite or best in (0, grid - 1):
        return best_point
    if not (latencies[best] < latencies[best - 1] and latencies[best] < latencies[best + 1]):
        return best_point

    result = optimize.minimize_scalar(
        lambda f: _latency_at(N, config, link, f).latency,
        bracket=(frequencies[best - 1], frequencies[best], frequencies[best + 1]),
        method="golden",
    )
    refined = replace(_latency_at(N, config, link, float(result.x)), dropped=dropped)
    if frequencies[best - 1] <= result.x <= frequencies[best + 1] and refined.latency < best_point.latency:
        return refined
    return best_point


def optimize_frequency(
    N: int,
    config: ConstellationConfig,
    beam: BeamParams,
    pointing: PointingModel,
    w_d: float,
    h_th: float,
    budget: LinkBudget,
    f_range: Optional[Tuple[float, float]] = None,
    grid: Optional[int] = None,
    refine: bool = True,
) -> FrequencyOptimum:
    """Best laser frequency for N hops; infeasible when every grid point is in outage."""
    link = HopLink(w0=beam.w0, pointing=pointing, w_d=w_d, h_th=h_th, budget=budget)
    point = optimize_frequency_point(N, config, link, f_range=f_range, grid=grid, refine=refine)
    if not point.finite:
        return FrequencyOptimum(f_star=None, latency=math.inf, feasible=False)
    return FrequencyOptimum(f_star=point.f, latency=point.latency, feasible=True)


def optimized_scan(config: ConstellationConfig, link: HopLink, workers: int = 1) -> List[LatencyPoint]:
    """Frequency-optimised latency for every N in [1, N_max], in N order."""
    points = _parallel_map(
        lambda n: optimize_frequency_point(n, config, link),
        range(1, config.N_max + 1),
        workers,
        desc="Frequency-optimised scan",
    )
    _log_dropped(points, "frequency-optimised scan")
    return points


def joint_plan(
    config: ConstellationConfig,
    beam: BeamParams,
    pointing: PointingModel,
    w_d: float,
    h_th: float,
    budget: LinkBudget,
    workers: int = 1,
) -> ConstellationPlan:
    """Smallest N meeting T_th when each N also gets its optimal laser frequency."""
    link = HopLink(w0=beam.w0, pointing=pointing, w_d=w_d, h_th=h_th, budget=budget)
    plan = first_feasible(optimized_scan(config, link, workers), config.T_th)
    logger.debug(f"joint_plan: N={plan.N}, f={plan.f_used}, feasible={plan.feasible}")
    return plan


def latency_sweep(
    config: ConstellationConfig, beam: BeamParams, link: HopLink, workers: int = 1
) -> Dict[str, List[LatencyPoint]]:
    """Latency versus N for the beam's fixed frequency and with per-N optimised frequency."""
    logger.info(f"Latency sweep over N in [1, {config.N_max}] with {workers} worker(s)")
    return {
        "fixed": latency_scan(config, beam, link, workers),
        "optimized": optimized_scan(config, link, workers),
    }
