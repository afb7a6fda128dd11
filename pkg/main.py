#!/usr/bin/env python3
"""
This script serves as the Hydra-enabled entry point for the OISL channel,
rate, planning, link-budget and validation commands.
"""

import os
import sys

import hydra
from hydra.core.hydra_config import HydraConfig
from loguru import logger
from omegaconf import DictConfig, OmegaConf

from src.pipeline import get_pipeline_class
from src.utils.configs import apply_config_file
from src.utils.errors import EXIT_INVALID_CONFIG, EXIT_OK, EXIT_VALIDATION_FAILED, exit_code_for

# set once hydra has composed the config and handed control to main
_command_started = False


def hydra_loguru_init() -> None:
    hydra_path = HydraConfig.get().runtime.output_dir
    logger.add(os.path.join(hydra_path, "main.log"))


def run_command(cfg: DictConfig) -> int:
    """Run the pipeline selected by ``command`` and return the process exit code."""
    pipeline = get_pipeline_class(cfg.command.name)(cfg)
    results = pipeline.execute()
    if results.get("passed") is False:
        return EXIT_VALIDATION_FAILED
    return EXIT_OK


@hydra.main(version_base=None, config_path="configs", config_name="config")
def main(cfg: DictConfig) -> None:
    """Main function that dispatches to the selected command."""
    global _command_started
    _command_started = True

    hydra_loguru_init()
    logger.info(f"Starting OISL toolkit, command: {cfg.command.name}")

    try:
        cfg = apply_config_file(cfg, HydraConfig.get().overrides.task)
        if cfg.debug:
            logger.debug("Debug mode enabled")
            logger.debug(f"Configuration:\n{OmegaConf.to_yaml(cfg)}")
        code = run_command(cfg)
    except Exception as e:
        code = exit_code_for(e)
        if code is None:
            raise
        logger.error(f"{type(e).__name__}: {e}")

    logger.info(f"Command {cfg.command.name} finished with exit code {code}")
    sys.exit(code)


def cli() -> None:
    """
    Console entry point.

    Hydra reports composition errors (unknown keys, bad override syntax, missing
    config groups) with status 1, which is reserved for failed validation; they
    are reported as invalid configuration instead.
    """
    global _command_started
    _command_started = False
    try:
        main()
    except Exception as e:  # re-raised by hydra under HYDRA_FULL_ERROR
        code = exit_code_for(e)
        if code is None:
            raise
        sys.exit(code)
    except SystemExit as e:
        if e.code == EXIT_VALIDATION_FAILED and not _command_started:
            sys.exit(EXIT_INVALID_CONFIG)
        raise


if __name__ == "__main__":
    cli()
