"""Location of bundled data files (override with DECBENCH_DATA)."""

import os
from pathlib import Path

_BUNDLED = Path(__file__).resolve().parent / "data"


def data_dir() -> Path:
    override = os.environ.get("DECBENCH_DATA")
    return Path(override) if override else _BUNDLED


def data_path(*parts) -> Path:
    return data_dir().joinpath(*parts)
