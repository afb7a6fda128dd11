from pathlib import Path
from typing import Sequence

import pytest
from hydra import compose, initialize_config_dir

CONFIG_DIR = str(Path(__file__).resolve().parents[1] / "configs")


@pytest.fixture
def make_cfg(tmp_path):
    """Compose the run configuration with the output directory under tmp_path."""

    def _make(overrides: Sequence[str] = ()):
        with initialize_config_dir(config_dir=CONFIG_DIR, version_base=None):
            return compose(
                config_name="config",
                overrides=[f"pipeline.output_dir={tmp_path / 'run'}", *overrides],
            )

    return _make
