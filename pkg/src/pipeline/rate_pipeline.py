"""
Average achievable data rate versus laser frequency.
"""

import itertools
from typing import Any, Dict, List

from omegaconf import DictConfig
from tqdm import tqdm

from .pipeline import Pipeline
from src.link.rate import avg_rate_analytic, avg_rate_montecarlo, avg_rate_quadrature, hop_context
from src.utils.configs import (
    GBIT,
    KM,
    create_beam_params,
    create_link_budget,
    create_pointing_model,
    frequency_grid,
    resolve_h_th,
    sigma_values,
)
from src.utils.errors import ConfigError
from src.utils.output import save_rows_to_csv

COLUMNS = ["f_THz", "delta_km", "sigma_s_m", "rate_analytic_Gbps", "rate_quadrature_Gbps", "outage"]
MC_COLUMNS = ["rate_montecarlo_Gbps", "rate_montecarlo_stderr_Gbps"]


class RatePipeline(Pipeline):
    """Analytic, quadrature and (optionally) Monte Carlo average rate per sweep point."""

    def __init__(self, cfg: DictConfig):
        super().__init__(cfg, name="RatePipeline")
        self.budget = None

    def validate_config(self) -> None:
        super().validate_config()
        if not self.cfg.sweep.get("distances_km"):
            raise ConfigError("sweep.distances_km must list at least one hop distance")
        self.budget = create_link_budget(self.cfg)

    def columns(self) -> List[str]:
        if self.mc_samples is None:
            return COLUMNS
        return COLUMNS[:5] + MC_COLUMNS + COLUMNS[5:]

    def run(self) -> Dict[str, Any]:
        h_th = resolve_h_th(self.cfg)
        w_d = float(self.cfg.detector.w_d)
        grid = list(
            itertools.product(
                [float(d) for d in self.cfg.sweep.distances_km], sigma_values(self.cfg), frequency_grid(self.cfg)
            )
        )
        self.logger.info(
            f"Rate sweep: {len(grid)} points, sigma mode={self.cfg.pointing.mode}, SNR={self.budget.snr:.3e}"
        )

        rows, outages = [], 0
        for delta_km, sigma_s0, f_thz in tqdm(grid, desc="Rate sweep"):
            delta = delta_km * KM
            beam = create_beam_params(self.cfg, f_thz)
            pointing = create_pointing_model(self.cfg, sigma_s0)
            args = (delta, beam, pointing, w_d, h_th, self.budget)
            analytic = avg_rate_analytic(*args)
            quadrature = avg_rate_quadrature(*args)
            outages += analytic.outage
            row = {
                "f_THz": float(f_thz),
                "delta_km": delta_km,
                "sigma_s_m": hop_context(delta, beam, pointing, w_d).sigma,
                "rate_analytic_Gbps": analytic.rate / GBIT,
                "rate_quadrature_Gbps": quadrature.rate / GBIT,
                "outage": int(analytic.outage),
            }
            if self.mc_samples is not None:
                mc = avg_rate_montecarlo(self.seed, self.mc_samples, *args, workers=self.workers)
                row["rate_montecarlo_Gbps"] = mc.rate / GBIT
                row["rate_montecarlo_stderr_Gbps"] = mc.stderr / GBIT
            rows.append(row)

        if outages:
            self.logger.warning(f"{outages}/{len(rows)} sweep points are in total outage (h_th >= A0)")
        df = save_rows_to_csv(rows, self.output_path, self.columns())
        return {"output": str(self.output_path), "rows": len(df), "outages": outages}
