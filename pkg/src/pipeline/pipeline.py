"""
Abstract pipeline base class for the OISL toolkit.
"""

import warnings
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Optional

from loguru import logger
from omegaconf import DictConfig

from src.utils.errors import ConfigError, FarFieldWarning


class Pipeline(ABC):
    """
    Abstract base class for all command pipelines.

    This class provides a common interface and shared functionality for the
    sweep, planning and validation commands: configuration checks, output
    location and the standard execution flow.
    """

    # File suffix of the single output each command writes
    output_suffix = ".csv"

    def __init__(self, cfg: DictConfig, name: Optional[str] = None):
        """
        Initialize the pipeline with configuration.

        Args:
            cfg: Configuration object containing all run settings
            name: Optional name for the pipeline (defaults to class name)
        """
        self.cfg = cfg
        self.name = name or self.__class__.__name__
        self.output_dir = Path(cfg.pipeline.output_dir)
        self.seed = int(cfg.seed)
        self.workers = max(int(cfg.get("workers", 1)), 1)

        # Set up logging
        self.logger = logger.bind(pipeline=self.name)

    @property
    def output_path(self) -> Path:
        """Explicit ``out`` path, else <output_dir>/<command><suffix>."""
        out = self.cfg.get("out")
        if out is not None:
            return Path(out)
        return self.output_dir / f"{self.cfg.command.name}{self.output_suffix}"

    @property
    def mc_samples(self) -> Optional[int]:
        mc = self.cfg.get("mc")
        return None if mc is None else int(mc)

    @abstractmethod
    def run(self) -> Dict[str, Any]:
        """
        Main execution method for the pipeline.

        Returns:
            Dictionary containing pipeline results and metadata
        """
        pass

    def validate_config(self) -> None:
        """
        Validate the configuration for this pipeline.

        This method can be overridden by concrete implementations
        to add pipeline-specific validation logic.
        """
        for section in ("pipeline", "beam", "detector", "link", "pointing", "sweep", "command"):
            if section not in self.cfg:
                raise ConfigError(f"Configuration must contain '{section}' section")

        if self.cfg.get("workers", 1) < 1:
            raise ConfigError(f"workers must be at least 1, got {self.cfg.workers}")

        if self.mc_samples is not None and self.mc_samples < 1:
            raise ConfigError(f"mc must be a positive sample count, got {self.mc_samples}")

        self.logger.info("Configuration validation passed")

    def setup_environment(self) -> None:
        """Create the output directory of this run."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.logger.info(f"Pipeline output directory: {self.output_dir}")
        self.logger.info(f"Seed: {self.seed}, workers: {self.workers}")

    def cleanup(self) -> None:
        """
        Cleanup method called after pipeline execution.
        """
        self.logger.info(f"Pipeline {self.name} cleanup completed")

    def execute(self) -> Dict[str, Any]:
        """
        Full pipeline execution with setup, validation, and cleanup.

        This method provides a standardized execution flow:
        1. Validate configuration
        2. Set up environment
        3. Run pipeline-specific logic
        4. Cleanup

        Returns:
            Dictionary containing pipeline results and metadata
        """
        try:
            self.logger.info(f"Starting pipeline: {self.name}")

            self.validate_config()
            self.setup_environment()
            with warnings.catch_warnings():
                # sweeps report near-field points themselves
                warnings.simplefilter("ignore", FarFieldWarning)
                results = self.run()

            self.logger.info(f"Pipeline {self.name} completed successfully")
            return results

        except Exception as e:
            self.logger.error(f"Pipeline {self.name} failed: {str(e)}")
            import traceback

            self.logger.debug(f"Full traceback: {traceback.format_exc()}")
            raise e

        finally:
            self.cleanup()
