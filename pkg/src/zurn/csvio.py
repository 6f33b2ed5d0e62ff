"""Deterministic CSV and manifest emission.

Contract: UTF-8, header row, LF line endings, floats rendered with 17
significant digits (round-trip exact for float64).  Outputs depend only on
(config, seed), never on worker count or wall clock, so reruns are
byte-identical.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .config import ExperimentConfig, config_items


def fmt_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_manifest(out_dir, cfg: ExperimentConfig, command: str, extra: dict | None = None) -> None:
    """Config echo + seed + versions; no timestamps, reruns stay byte-identical."""
    import scipy

    import zurn

    lines = [
        f"command = {command}",
        f"zurn_version = {zurn.__version__}",
        f"numpy_version = {np.__version__}",
        f"scipy_version = {scipy.__version__}",
    ]
    lines += [f"{key} = {val}" for key, val in config_items(cfg)]
    for key, val in (extra or {}).items():
        lines.append(f"{key} = {val}")
    Path(out_dir, "manifest.txt").write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
