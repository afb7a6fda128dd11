"""
Pipeline module: one pipeline per command.
"""

from typing import Type

from .pipeline import Pipeline
from .channel_pipeline import ChannelPipeline
from .rate_pipeline import RatePipeline
from .plan_pipeline import PlanPipeline
from .link_pipeline import LinkPipeline
from .validation_pipeline import ValidationPipeline
from src.utils.errors import ConfigError


def get_pipeline_class(command_name: str) -> Type[Pipeline]:
    """Get the appropriate pipeline class for a given command name."""
    if command_name == "channel":
        return ChannelPipeline
    elif command_name == "rate":
        return RatePipeline
    elif command_name == "plan":
        return PlanPipeline
    elif command_name == "link":
        return LinkPipeline
    elif command_name == "validate":
        return ValidationPipeline
    else:
        raise ConfigError(f"Unknown command: {command_name}")


__all__ = [
    "Pipeline",
    "ChannelPipeline",
    "RatePipeline",
    "PlanPipeline",
    "LinkPipeline",
    "ValidationPipeline",
    "get_pipeline_class",
]
