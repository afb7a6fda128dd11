"""
Writers for sweep tables and validation reports.

CSV files are UTF-8, comma separated, "\\n" terminated, with a mandatory header
and scientific notation at 9 significant digits, so identical inputs give
byte-identical files.
"""

from pathlib import Path
from typing import Dict, List, Sequence

import pandas as pd
from loguru import logger

FLOAT_FORMAT = "%.8e"


def save_rows_to_csv(rows: List[Dict], filepath: Path, columns: Sequence[str]) -> pd.DataFrame:
    """Save sweep rows to CSV in the given column order."""
    assert len(rows) > 0, "No rows to save"
    df = pd.DataFrame(rows, columns=list(columns))
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(filepath, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    logger.info(f"Saved {len(df)} rows to {filepath}")
    return df


def save_report(lines: Sequence[str], filepath: Path) -> None:
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    logger.info(f"Saved report ({len(lines)} lines) to {filepath}")
