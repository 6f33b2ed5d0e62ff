"""Statistical estimators applied to urn realizations.

Everything here is a pure function over immutable snapshots: the scaled-mean
martingale statistic, one- and two-sample Kolmogorov-Smirnov distances,
moment-matched fits of the limiting scaled-exponential / scaled-Gamma
families, empirical characteristic functions, and the diagnostics used to
probe sign concentration and the shared-Gamma coupling across coordinates.

All normalizations that involve the scaled mean use the same realization's
value (the quenched protocol), never an average across realizations.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt
from typing import Callable, NamedTuple

import numpy as np

from .urn import UrnState


@dataclass
class ATrace:
    """Scaled-mean values recorded at increasing checkpoints, one row per
    checkpoint, one column per coordinate."""

    checkpoints: list
    values: np.ndarray

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if len(self.checkpoints) != self.values.shape[0]:
            raise ValueError("one value row per checkpoint required")
        if any(b <= a for a, b in zip(self.checkpoints, self.checkpoints[1:])):
            raise ValueError("checkpoints must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("trace values must be finite")


@dataclass
class NormalizedSample:
    """Label sample with its normalization recorded.

    ``by_n`` divides labels by the ball count; ``by_nA`` additionally divides
    each coordinate by the realization's own scaled mean.
    """

    values: np.ndarray
    normalization: str

    def __post_init__(self):
        if self.normalization not in ("by_n", "by_nA"):
            raise ValueError(f"unknown normalization {self.normalization!r}")
        self.values = np.asarray(self.values, dtype=float)


class LimitFit(NamedTuple):
    exp_scale: float    # scale a of the draw-law model a*Exp(1); equals the sample mean
    gamma_scale: float  # scale a of the added-ball model a*Gamma(2,1); half the mean
    sign: int


class SignConcentration(NamedTuple):
    fraction: float
    zero_a_fallback: bool


def compute_a(urn: UrnState) -> np.ndarray:
    """Scaled mean S_n / (n (n+1)) per coordinate; the martingale statistic."""
    n = urn.n
    denom = n * (n + 1)
    return np.array([s / denom for s in urn.sum_s], dtype=float)


def normalized_labels(urn: UrnState, normalization: str) -> NormalizedSample:
    """All labels of one realization under the given normalization (quenched:
    uses this urn's own scaled mean for ``by_nA``)."""
    x = urn.labels_array(dtype=np.float64)
    n = urn.n
    if normalization == "by_n":
        vals = x / n
    elif normalization == "by_nA":
        a = compute_a(urn)
        if np.any(a == 0):
            raise ZeroDivisionError("by_nA normalization undefined: scaled mean has a zero coordinate")
        vals = x / (n * a)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    if urn.d == 1:
        vals = vals[:, 0]
    return NormalizedSample(vals, normalization)


def ks_statistic(sample, cdf: Callable) -> float:
    """One-sample two-sided Kolmogorov-Smirnov statistic.

    ``sample`` must be sorted ascending; ``cdf`` is evaluated vectorized and
    must map into [0, 1].
    """
    x = np.asarray(sample, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample")
    if np.any(np.diff(x) < 0):
        raise ValueError("sample must be sorted ascending")
    f = np.asarray(cdf(x), dtype=float)
    if np.any(f < 0) or np.any(f > 1):
        raise ValueError("cdf returned values outside [0, 1]")
    m = x.size
    grid = np.arange(1, m + 1) / m
    d_plus = np.max(grid - f)
    d_minus = np.max(f - (grid - 1.0 / m))
    return float(max(d_plus, d_minus, 0.0))


def ks_two_sample(x, y) -> float:
    """Two-sample Kolmogorov-Smirnov statistic (sup distance of empirical CDFs)."""
    xs = np.sort(np.asarray(x, dtype=float))
    ys = np.sort(np.asarray(y, dtype=float))
    pooled = np.concatenate([xs, ys])
    fx = np.searchsorted(xs, pooled, side="right") / xs.size
    fy = np.searchsorted(ys, pooled, side="right") / ys.size
    return float(np.max(np.abs(fx - fy)))


def ks_critical(alpha: float, m: int, m2: int = None) -> float:
    """Asymptotic Kolmogorov critical value at significance alpha for a
    one-sample (m2 is None) or two-sample test."""
    c = sqrt(-log(alpha / 2.0) / 2.0)
    if m2 is None:
        return c / sqrt(m)
    return c * sqrt((m + m2) / (m * m2))


def fit_limits(sample) -> LimitFit:
    """Moment-matched scale fits of the limiting laws from a by-n sample.

    The draw-law model a*Exp(1) has mean a, so its scale is the sample mean;
    the added-ball model a*Gamma(2,1) has mean 2a, so its scale is half the
    mean.  Raises on a zero mean (no orientation).
    """
    if isinstance(sample, NormalizedSample):
        if sample.normalization != "by_n":
            raise ValueError("fit_limits expects a by_n-normalized sample")
        values = sample.values
    else:
        values = np.asarray(sample, dtype=float)
    if values.ndim != 1:
        raise ValueError("fit_limits handles one coordinate at a time")
    mean = float(values.mean())
    if mean == 0:
        raise ValueError("sample mean is zero; no sign can be fitted")
    return LimitFit(exp_scale=mean, gamma_scale=mean / 2.0, sign=1 if mean > 0 else -1)


def empirical_cf(samples, t) -> complex:
    """Empirical characteristic function (1/m) sum exp(i <t, x_j>)."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample")
    tv = np.asarray(t, dtype=float)
    if x.ndim == 1:
        phase = x * float(tv)
    else:
        phase = x @ tv.ravel()
    return complex(np.exp(1j * phase).mean())


def sign_concentration(urn: UrnState, coord: int = 0) -> SignConcentration:
    """Fraction of balls whose chosen coordinate has the sign of the scaled
    mean, zeros counting half.  When the scaled mean is exactly zero the
    fraction of positives is returned instead, flagged."""
    if not (0 <= coord < urn.d):
        raise IndexError(f"coordinate {coord} outside dimension {urn.d}")
    vals = urn.labels_array(dtype=np.float64)[:, coord]
    n = urn.n
    zeros = float(np.count_nonzero(vals == 0))
    s = urn.sum_s[coord]
    if s == 0:
        frac = (float(np.count_nonzero(vals > 0)) + 0.5 * zeros) / n
        return SignConcentration(frac, True)
    matching = np.count_nonzero(vals > 0) if s > 0 else np.count_nonzero(vals < 0)
    return SignConcentration((float(matching) + 0.5 * zeros) / n, False)


def coordinate_coupling(samples, a) -> float:
    """Median relative mismatch between the two rescaled coordinates.

    With samples from a single shared scalar times the vector ``a`` the two
    rescaled coordinates agree and the statistic is near zero; independent
    coordinates push the median well away from zero.
    """
    x = np.asarray(samples.values if isinstance(samples, NormalizedSample) else samples, dtype=float)
    if x.ndim != 2 or x.shape[1] != 2:
        raise ValueError("coordinate_coupling expects (m, 2) samples")
    av = np.asarray(a, dtype=float)
    if av.shape != (2,) or np.any(av == 0):
        raise ValueError("scale vector must be length 2 and nonzero in both coordinates")
    r1 = x[:, 0] / av[0]
    r2 = x[:, 1] / av[1]
    stat = np.abs(r1 - r2) / (np.abs(r1) + np.abs(r2) + 1e-12)
    return float(np.median(stat))
