"""
Single-hop link budget report.
"""

import math
from typing import Any, Dict

from omegaconf import DictConfig

from .pipeline import Pipeline
from src.link.beam_optics import waist_relative_error
from src.link.channel_stats import (
    capture_probability,
    channel_stats,
    conditional_mean_h_pe,
    mean_h_pe,
    outage_probability,
)
from src.link.rate import avg_rate_analytic, hop_context, jensen_bound
from src.utils.configs import GBIT, KM, create_beam_params, create_link_budget, create_pointing_model, resolve_h_th
from src.utils.output import save_rows_to_csv


class LinkPipeline(Pipeline):
    """Every derived quantity of one hop at link.delta_km, as a (quantity, value) table."""

    def __init__(self, cfg: DictConfig):
        super().__init__(cfg, name="LinkPipeline")

    def run(self) -> Dict[str, Any]:
        delta = float(self.cfg.link.delta_km) * KM
        beam = create_beam_params(self.cfg)
        pointing = create_pointing_model(self.cfg)
        budget = create_link_budget(self.cfg)
        w_d = float(self.cfg.detector.w_d)
        h_th = resolve_h_th(self.cfg)

        geom = hop_context(delta, beam, pointing, w_d).geometry
        stats = channel_stats(geom, h_th)
        rate = avg_rate_analytic(delta, beam, pointing, w_d, h_th, budget)
        report = {
            "delta_km": delta / KM,
            "f_THz": beam.f_thz,
            "wavelength_m": beam.wavelength,
            "theta_rad": beam.theta,
            "w_z_m": geom.w_z,
            "waist_relative_error": waist_relative_error(delta, beam),
            "w_z_over_w_d": geom.ratio,
            "sigma_s_m": geom.sigma,
            "A0": stats.a0,
            "gamma": stats.gamma,
            "h_th": h_th,
            "r_max_m": math.nan if stats.r_max is None else stats.r_max,
            "mean_h_pe": mean_h_pe(geom, h_th),
            "conditional_mean_h_pe": conditional_mean_h_pe(geom, h_th),
            "capture_probability": capture_probability(geom, h_th),
            "outage_probability": outage_probability(geom, h_th),
            "snr": budget.snr,
            "rate_analytic_Gbps": rate.rate / GBIT,
            "jensen_bound_Gbps": jensen_bound(delta, beam, pointing, w_d, h_th, budget) / GBIT,
        }
        if not geom.is_far_field:
            self.logger.warning(f"w_z/w_d = {geom.ratio:.3g}: far-field statistics are approximate")
        for quantity, value in report.items():
            self.logger.info(f"{quantity:>24s} = {value:.6g}")

        rows = [{"quantity": k, "value": float(v)} for k, v in report.items()]
        save_rows_to_csv(rows, self.output_path, ["quantity", "value"])
        return {"output": str(self.output_path), "report": report}
