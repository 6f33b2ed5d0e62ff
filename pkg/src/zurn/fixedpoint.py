"""Population dynamics for the urn's recursive distributional equations.

A distribution is represented by a pool of samples.  One iteration of the
additive map replaces every sample with ``U_1 X^(1) + ... + U_k X^(k)``
where the ``U_i`` are fresh independent Uniform[0,1] weights and the
``X^(i)`` are drawn from the pool uniformly with replacement.  For k = 2
the scaled Gamma(2,1) family is the fixed point; the one-dimensional map
``Y <- U (Y^1 + Y^2)`` with a single shared weight has the exponential
family as its fixed point.  Distances between one-dimensional pools are
exact Wasserstein (minimal-Lp) distances between the empirical measures,
and a coupled two-pool evolution exposes the squared-L2 contraction factor
of the additive map (2/3 in expectation for matched-mean pools).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import RngStream


@dataclass
class SamplePool:
    """Population of real vectors standing in for a distribution.

    ``samples`` is (m,) for scalar pools or (m, d) for vector pools, m >= 2.
    """

    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim not in (1, 2):
            raise ValueError(f"samples must be 1- or 2-dimensional, got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise ValueError(f"pool needs at least 2 samples, got {arr.shape[0]}")
        if not np.isfinite(arr.mean()):
            raise ValueError("pool mean is not finite")
        self.samples = arr

    @property
    def m(self) -> int:
        return self.samples.shape[0]

    @property
    def d(self) -> int:
        return 1 if self.samples.ndim == 1 else self.samples.shape[1]

    def mean(self):
        return self.samples.mean(axis=0)


def iterate_pool(pool: SamplePool, k: int, rng: RngStream) -> SamplePool:
    """One step of the additive map: each new sample is sum of k pool picks,
    each scaled by its own fresh Uniform[0,1] weight.  Mean-preserving for
    k = 2 (the weights average to one); for k > 2 the mean grows by k/2 per
    step while the shape still converges."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    x = pool.samples
    m = pool.m
    idx = rng.integers(0, m, size=(m, k))
    u = rng.uniform(size=(m, k))
    if x.ndim == 1:
        new = (u * x[idx]).sum(axis=1)
    else:
        new = (u[:, :, None] * x[idx]).sum(axis=1)
    return SamplePool(new)


def iterate_exp_pool(pool: SamplePool, rng: RngStream) -> SamplePool:
    """One step of ``Y <- U (Y^1 + Y^2)`` with a single shared U per sample.

    Requires a nonnegative scalar pool; the exponential family is the fixed
    point of this map.
    """
    x = pool.samples
    if x.ndim != 1:
        raise ValueError("exponential-map pools must be one-dimensional")
    if (x < 0).any():
        raise ValueError("exponential-map pools must be nonnegative")
    m = pool.m
    idx = rng.integers(0, m, size=(m, 2))
    u = rng.uniform(size=m)
    return SamplePool(u * (x[idx[:, 0]] + x[idx[:, 1]]))


def wasserstein(p: SamplePool, q: SamplePool, order: int = 2) -> float:
    """Exact minimal-Lp distance between two one-dimensional empirical measures.

    Equal-size pools use the sorted coupling; unequal sizes are handled
    exactly on the union of the two quantile grids.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    if p.d != 1 or q.d != 1:
        raise ValueError("wasserstein is defined here for one-dimensional pools only")
    ps = np.sort(p.samples)
    qs = np.sort(q.samples)
    if ps.shape == qs.shape:
        return float(np.mean(np.abs(ps - qs) ** order) ** (1.0 / order))
    mp, mq = len(ps), len(qs)
    levels = np.union1d(np.arange(1, mp) / mp, np.arange(1, mq) / mq)
    edges = np.concatenate([[0.0], levels, [1.0]])
    widths = np.diff(edges)
    mids = (edges[:-1] + edges[1:]) / 2.0
    vp = ps[np.minimum((mids * mp).astype(np.int64), mp - 1)]
    vq = qs[np.minimum((mids * mq).astype(np.int64), mq - 1)]
    return float(np.sum(widths * np.abs(vp - vq) ** order) ** (1.0 / order))


def contraction_estimate(
    p: SamplePool,
    q: SamplePool,
    iterations: int,
    rng: RngStream,
    k: int = 2,
) -> list[float]:
    """Coupled evolution of two equal-size pools under identical randomness.

    ``q`` is first recentered (additive shift per coordinate) onto ``p``'s
    mean, which the contraction argument requires.  Every iteration draws
    one set of (indices, uniform weights) and applies it to both pools, so
    the index-paired samples form an explicit coupling; the returned list
    holds the mean squared paired distance before the first and after every
    iteration.  In expectation each entry is 2/3 of its predecessor.
    """
    if p.m != q.m or p.d != q.d:
        raise ValueError("coupled pools must have identical size and dimension")
    xp = np.array(p.samples, dtype=float)
    xq = np.array(q.samples, dtype=float)
    xq = xq + (xp.mean(axis=0) - xq.mean(axis=0))
    if np.max(np.abs(xp.mean(axis=0) - xq.mean(axis=0))) > 1e-9:
        raise ValueError("pool means differ by more than 1e-9 after recentering")
    m = p.m

    def msd(a, b):
        diff = a - b
        if diff.ndim == 1:
            return float(np.mean(diff * diff))
        return float(np.mean(np.sum(diff * diff, axis=1)))

    dists = [msd(xp, xq)]
    for _ in range(iterations):
        idx = rng.integers(0, m, size=(m, k))
        u = rng.uniform(size=(m, k))
        if xp.ndim == 1:
            xp = (u * xp[idx]).sum(axis=1)
            xq = (u * xq[idx]).sum(axis=1)
        else:
            xp = (u[:, :, None] * xp[idx]).sum(axis=1)
            xq = (u[:, :, None] * xq[idx]).sum(axis=1)
        dists.append(msd(xp, xq))
    return dists


def step_ratios(distances) -> np.ndarray:
    """Per-step ratios d_{t+1}/d_t (NaN where the previous distance is zero)."""
    d = np.asarray(distances, dtype=float)
    prev = d[:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(prev > 0, d[1:] / prev, np.nan)
