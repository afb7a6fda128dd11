"""
Average channel state versus laser frequency.
"""

import itertools
from typing import Any, Dict, List

from omegaconf import DictConfig
from tqdm import tqdm

from .pipeline import Pipeline
from src.link.channel_stats import (
    ChannelGeometry,
    capture_probability,
    mc_channel_moments,
    mean_h_pe,
)
from src.link.pointing import sigma_s
from src.utils.configs import (
    KM,
    create_beam_params,
    create_pointing_model,
    frequency_grid,
    resolve_h_th,
    sigma_values,
)
from src.utils.errors import ConfigError
from src.utils.output import save_rows_to_csv

COLUMNS = ["f_THz", "z_km", "sigma_s_m", "mean_h_pe_analytic", "capture_probability"]
MC_COLUMNS = ["mean_h_pe_montecarlo", "capture_probability_montecarlo"]


class ChannelPipeline(Pipeline):
    """Sweeps f over every (z, sigma_s0) pair and tabulates the average channel state."""

    def __init__(self, cfg: DictConfig):
        super().__init__(cfg, name="ChannelPipeline")

    def validate_config(self) -> None:
        super().validate_config()
        if not self.cfg.sweep.get("distances_km"):
            raise ConfigError("sweep.distances_km must list at least one distance")

    def columns(self) -> List[str]:
        if self.mc_samples is None:
            return COLUMNS
        return COLUMNS[:4] + MC_COLUMNS[:1] + COLUMNS[4:] + MC_COLUMNS[1:]

    def run(self) -> Dict[str, Any]:
        h_th = resolve_h_th(self.cfg)
        w_d = float(self.cfg.detector.w_d)
        grid = list(
            itertools.product(
                [float(z) for z in self.cfg.sweep.distances_km], sigma_values(self.cfg), frequency_grid(self.cfg)
            )
        )
        self.logger.info(f"Channel sweep: {len(grid)} points, h_th={h_th:.3e}, mc={self.mc_samples}")

        rows, near_field = [], 0
        for z_km, sigma_s0, f_thz in tqdm(grid, desc="Channel sweep"):
            z = z_km * KM
            sigma = sigma_s(create_pointing_model(self.cfg, sigma_s0), z)
            geom = ChannelGeometry.from_beam(z, create_beam_params(self.cfg, f_thz), w_d, sigma)
            near_field += not geom.is_far_field
            row = {
                "f_THz": float(f_thz),
                "z_km": z_km,
                "sigma_s_m": sigma,
                "mean_h_pe_analytic": mean_h_pe(geom, h_th),
                "capture_probability": capture_probability(geom, h_th),
            }
            if self.mc_samples is not None:
                moments = mc_channel_moments(self.seed, geom, h_th, self.mc_samples, workers=self.workers)
                row["mean_h_pe_montecarlo"] = moments.mean
                row["capture_probability_montecarlo"] = moments.capture_probability
            self.logger.debug(f"z={z_km} km, sigma={sigma:.3g} m, f={f_thz:.4g} THz: {row}")
            rows.append(row)

        if near_field:
            self.logger.warning(f"{near_field}/{len(rows)} rows have w_z/w_d below the far-field ratio")
        df = save_rows_to_csv(rows, self.output_path, self.columns())
        return {"output": str(self.output_path), "rows": len(df)}
