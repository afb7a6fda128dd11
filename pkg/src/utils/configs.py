import json
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger
from omegaconf import DictConfig, OmegaConf
from omegaconf.errors import OmegaConfBaseException

from src.link.beam_optics import THZ, BeamParams
from src.link.channel_stats import DetectorSpec, h_threshold
from src.link.constellation import ConstellationConfig, HopLink
from src.link.pointing import PointingModel
from src.link.rate import LinkBudget
from src.utils.errors import ConfigError

KM = 1e3
GBIT = 1e9

# Config groups are selected by name on the command line and must not be
# re-applied as plain values after a config file merge.
CONFIG_GROUPS = ("command", "pointing")


def create_beam_params(cfg: DictConfig, f_thz: Optional[float] = None) -> BeamParams:
    """Create BeamParams from the beam section, optionally at another frequency."""
    return BeamParams.from_thz(cfg.beam.w0, cfg.beam.f_thz if f_thz is None else f_thz)


def create_pointing_model(cfg: DictConfig, sigma_s0: Optional[float] = None) -> PointingModel:
    """Create a PointingModel from the pointing group; sigma_s0 overrides the reference deviation."""
    pointing_cfg = cfg.pointing
    return PointingModel(
        sigma_s0=float(pointing_cfg.sigma_s0 if sigma_s0 is None else sigma_s0),
        k0=float(pointing_cfg.get("k0", 0.0)),
        d0=float(pointing_cfg.get("d0_km", 100.0)) * KM,
        mode=pointing_cfg.mode,
    )


def create_detector_spec(cfg: DictConfig) -> DetectorSpec:
    detector_cfg = cfg.detector
    return DetectorSpec(
        p_th=float(detector_cfg.get("p_th") or 0.0),
        eta=float(detector_cfg.eta),
        h_pl=float(detector_cfg.h_pl),
        p_t=float(detector_cfg.p_t),
    )


def resolve_h_th(cfg: DictConfig) -> float:
    """Dimensionless threshold: derived from p_th when given, else detector.h_th."""
    if cfg.detector.get("p_th") is not None:
        return h_threshold(create_detector_spec(cfg))
    h_th = float(cfg.detector.h_th)
    if h_th < 0:
        raise ConfigError(f"detector.h_th must be non-negative, got {h_th}")
    return h_th


def create_link_budget(cfg: DictConfig) -> LinkBudget:
    return LinkBudget(
        bandwidth=float(cfg.link.bandwidth),
        p_t=float(cfg.detector.p_t),
        eta=float(cfg.detector.eta),
        h_pl=float(cfg.detector.h_pl),
        sigma_n2=float(cfg.link.sigma_n2),
    )


def create_hop_link(cfg: DictConfig, sigma_s0: Optional[float] = None) -> HopLink:
    return HopLink(
        w0=float(cfg.beam.w0),
        pointing=create_pointing_model(cfg, sigma_s0),
        w_d=float(cfg.detector.w_d),
        h_th=resolve_h_th(cfg),
        budget=create_link_budget(cfg),
    )


def create_constellation_config(cfg: DictConfig) -> ConstellationConfig:
    c_cfg = cfg.constellation
    return ConstellationConfig(
        L=float(c_cfg.L_km) * KM,
        L_S=float(c_cfg.L_S_km) * KM,
        D=float(c_cfg.data_gbit) * GBIT,
        T_th=float(c_cfg.T_th),
        N_max=int(c_cfg.N_max),
        f_range=(float(cfg.sweep.f_min_thz) * THZ, float(cfg.sweep.f_max_thz) * THZ),
        f_grid=int(cfg.sweep.f_points),
        include_propagation_delay=bool(c_cfg.include_propagation_delay),
    )


def frequency_grid(cfg: DictConfig) -> np.ndarray:
    """Sweep frequencies in THz; a degenerate range yields a single point."""
    f_min, f_max, points = float(cfg.sweep.f_min_thz), float(cfg.sweep.f_max_thz), int(cfg.sweep.f_points)
    if not 0 < f_min <= f_max:
        raise ConfigError(f"Frequency sweep bounds must satisfy 0 < f_min <= f_max, got {f_min}, {f_max}")
    if points < 1:
        raise ConfigError(f"sweep.f_points must be at least 1, got {points}")
    if f_min == f_max or points == 1:
        return np.array([f_min])
    return np.linspace(f_min, f_max, points)


def sigma_values(cfg: DictConfig) -> List[float]:
    """Reference deviations swept by the channel and rate commands."""
    values = cfg.sweep.get("sigma_s0_values")
    if values is None:
        return [float(cfg.pointing.sigma_s0)]
    return [float(v) for v in values]


def _override_key(override: str) -> str:
    return override.split("=", 1)[0].lstrip("+~")


def apply_config_file(cfg: DictConfig, cli_overrides: Sequence[str] = ()) -> DictConfig:
    """
    Merge the JSON document named by ``config_file`` over the composed config.

    Command-line overrides are re-applied afterwards so that the precedence is
    defaults < config file < command line. Unknown keys fail because the
    composed config is in struct mode.
    """
    path = cfg.get("config_file")
    if path is None:
        return cfg
    try:
        with open(Path(path), encoding="utf-8") as fh:
            document = json.load(fh)
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e
    if not isinstance(document, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")

    replay = [
        o for o in cli_overrides if not o.startswith("~") and _override_key(o) not in CONFIG_GROUPS
    ]
    replay = [o.lstrip("+") for o in replay]
    OmegaConf.set_struct(cfg, True)
    try:
        merged = OmegaConf.merge(cfg, OmegaConf.create(document))
        merged = OmegaConf.merge(merged, OmegaConf.from_dotlist(replay))
    except OmegaConfBaseException as e:
        raise ConfigError(f"Invalid config file {path}: {e}") from e
    logger.info(f"Merged config file {path} ({len(replay)} command-line overrides re-applied)")
    return merged
