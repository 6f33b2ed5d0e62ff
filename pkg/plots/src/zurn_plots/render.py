"""Histogram rendering for zurn CSV outputs.

Two kinds: ``label_hist`` (final ball labels of a simulate run) and
``a_hist`` (final scaled means of an a-distribution run).  Overlays are
moment-fitted densities; all fitted parameters and the bin counts are
printed as machine-readable lines so tests can assert them without
comparing image bytes.  Input files are never modified.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class SchemaError(ValueError):
    """Input CSV does not match the documented schema for its kind."""


@dataclass
class PlotSpec:
    input_csv: str
    kind: str  # "label_hist" | "a_hist"
    output_image: str
    bins: int = 30
    overlay: str = "none"  # "none" | "normal" | "gamma"
    coord: int = 0

    def __post_init__(self):
        if self.kind not in ("label_hist", "a_hist"):
            raise SchemaError(f"unknown kind {self.kind!r}")
        if self.overlay not in ("none", "normal", "gamma"):
            raise SchemaError(f"unknown overlay {self.overlay!r}")
        if self.bins < 1:
            raise SchemaError(f"bins must be >= 1, got {self.bins}")


def _read_rows(path) -> tuple[list[str], list[dict]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        return list(reader.fieldnames), list(reader)


def _check_columns(path, have: list[str], want: set[str]):
    have_set = set(have)
    missing = sorted(want - have_set)
    extra = sorted(have_set - want)
    if missing or extra:
        raise SchemaError(
            f"{path}: column mismatch; missing={missing or 'none'} unexpected={extra or 'none'}"
        )


def load_values(spec: PlotSpec) -> np.ndarray:
    """Values to histogram, after exact schema validation."""
    header, rows = _read_rows(spec.input_csv)
    if spec.kind == "label_hist":
        label_cols = [c for c in header if c.startswith("label_")]
        want = {"realization", "ball_index"} | {f"label_{j}" for j in range(len(label_cols))}
        _check_columns(spec.input_csv, header, want)
        col = f"label_{spec.coord}"
        if col not in header:
            raise SchemaError(f"{spec.input_csv}: no column {col}")
        return np.array([float(r[col]) for r in rows])
    want = {"realization", "coord", "a_final"}
    _check_columns(spec.input_csv, header, want)
    vals = [float(r["a_final"]) for r in rows if int(r["coord"]) == spec.coord]
    if not vals:
        raise SchemaError(f"{spec.input_csv}: no rows with coord={spec.coord}")
    return np.array(vals)


def fit_overlay_params(values: np.ndarray) -> dict:
    """Moment-matched parameters of the limit-law families.

    Matches the primary package's fit: the scaled-exponential model has
    scale equal to the sample mean, the scaled-gamma (shape 2) model half
    the mean; the normal overlay is (mean, std).
    """
    mean = float(values.mean())
    return {
        "mean": mean,
        "exp_scale": mean,
        "gamma_scale": mean / 2.0,
        "sign": 0 if mean == 0 else (1 if mean > 0 else -1),
        "norm_mu": mean,
        "norm_sigma": float(values.std(ddof=0)),
    }


def _overlay_curve(overlay: str, params: dict, grid: np.ndarray) -> np.ndarray:
    if overlay == "normal":
        mu, sigma = params["norm_mu"], params["norm_sigma"]
        return np.exp(-0.5 * ((grid - mu) / sigma) ** 2) / (sigma * np.sqrt(2 * np.pi))
    a = params["gamma_scale"]
    z = grid / a
    dens = np.where(z >= 0, z * np.exp(-np.clip(z, 0, None)), 0.0) / abs(a)
    return dens


def render(spec: PlotSpec) -> dict:
    """Render the histogram image and return the printed parameters."""
    values = load_values(spec)
    counts, edges = np.histogram(values, bins=spec.bins)
    params = fit_overlay_params(values)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.hist(values, bins=spec.bins, density=True, color="#7aa6c2", edgecolor="white")
    if spec.overlay != "none":
        grid = np.linspace(edges[0], edges[-1], 400)
        ax.plot(grid, _overlay_curve(spec.overlay, params, grid), "k-", linewidth=1.5)
    ax.set_xlabel("label value" if spec.kind == "label_hist" else "final scaled mean")
    ax.set_ylabel("density")
    fig.tight_layout()
    fig.savefig(spec.output_image)
    plt.close(fig)

    out = {
        "kind": spec.kind,
        "n": values.size,
        "bins": spec.bins,
        "bin_width": float(edges[1] - edges[0]) if spec.bins >= 1 else 0.0,
        "overlay": spec.overlay,
        **params,
        "counts": " ".join(str(int(c)) for c in counts),
    }
    return out


def format_report(out: dict) -> str:
    keys = ["kind", "n", "bins", "bin_width", "overlay",
            "mean", "exp_scale", "gamma_scale", "sign", "norm_mu", "norm_sigma"]
    parts = []
    for k in keys:
        v = out[k]
        parts.append(f"{k}={v:.17g}" if isinstance(v, float) else f"{k}={v}")
    return "\n".join([" ".join(parts), f"counts={out['counts']}"])
