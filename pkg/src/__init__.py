
__version__ = "0.1.0"

from . import link, utils, pipeline

__all__ = ["link", "utils", "pipeline"]
