"""
Relay planning: total latency versus the number of hops.
"""

from typing import Any, Dict

from omegaconf import DictConfig

from .pipeline import Pipeline
from src.link.constellation import ConstellationPlan, first_feasible, latency_sweep
from src.utils.configs import GBIT, KM, create_beam_params, create_constellation_config, create_hop_link
from src.utils.errors import ConfigError
from src.utils.output import save_rows_to_csv

COLUMNS = ["mode", "N", "delta_km", "f_THz", "rate_Gbps", "total_latency_s"]


def describe_plan(label: str, plan: ConstellationPlan, T_th: float) -> str:
    status = "feasible" if plan.feasible else f"infeasible (no N meets T_th={T_th:g} s)"
    f_used = "n/a" if plan.f_used is None else f"{plan.f_used / 1e12:.4f} THz"
    return (
        f"{label}: N={plan.N} ({plan.N - 1} relays), delta={plan.delta / KM:.3f} km, f={f_used}, "
        f"rate={plan.per_hop_rate / GBIT:.4f} Gbit/s, latency={plan.total_latency:.6g} s, {status}"
    )


class PlanPipeline(Pipeline):
    """Fixed-frequency and frequency-optimised latency scans plus the two plans derived from them."""

    def __init__(self, cfg: DictConfig):
        super().__init__(cfg, name="PlanPipeline")
        self.config = None

    def validate_config(self) -> None:
        super().validate_config()
        if "constellation" not in self.cfg:
            raise ConfigError("Configuration must contain 'constellation' section")
        self.config = create_constellation_config(self.cfg)

    def run(self) -> Dict[str, Any]:
        beam = create_beam_params(self.cfg)
        link = create_hop_link(self.cfg)
        self.logger.info(
            f"Planning L={self.config.L / KM:g} km, L_S={self.config.L_S / KM:g} km, "
            f"D={self.config.D / GBIT:g} Gbit, T_th={self.config.T_th:g} s, N_max={self.config.N_max}"
        )
        scans = latency_sweep(self.config, beam, link, workers=self.workers)

        rows = [
            {
                "mode": mode,
                "N": point.N,
                "delta_km": point.delta / KM,
                "f_THz": point.f / 1e12,
                "rate_Gbps": point.rate / GBIT,
                "total_latency_s": point.latency,
            }
            for mode, points in scans.items()
            for point in points
        ]
        df = save_rows_to_csv(rows, self.output_path, COLUMNS)

        fixed_plan = first_feasible(scans["fixed"], self.config.T_th)
        joint = first_feasible(scans["optimized"], self.config.T_th)
        summary = [
            describe_plan(f"min_satellites at {beam.f_thz:g} THz", fixed_plan, self.config.T_th),
            describe_plan("joint plan", joint, self.config.T_th),
        ]
        for line in summary:
            self.logger.info(line)
        return {
            "output": str(self.output_path),
            "rows": len(df),
            "min_satellites": fixed_plan,
            "joint_plan": joint,
            "summary": summary,
        }
