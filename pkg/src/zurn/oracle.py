"""Exact ground truth for the addition urn's annealed moments and limit laws.

The urn's per-coordinate moments E[R_n] (squared label sum) and E[Q_n]
(sum of squared labels) obey a linear two-term recursion in the ball count;
iterating it is exact and cheap, and an optional rational mode removes
floating error entirely so tests can assert equality against brute-force
enumeration.  The module also provides the closed-form CDFs, characteristic
function and samplers of the limiting laws (a scaled exponential for a draw,
a scaled Gamma(2,1) for an added ball), and the positive lower bound on the
second moment of the scaled-mean martingale limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import Union

import numpy as np
from scipy.special import gammaln

from .rng import RngStream

Number = Union[float, Fraction]


@dataclass(frozen=True)
class MomentPair:
    """Annealed per-coordinate moments: r = E[S_n^2], q = E[sum of X_i^2]."""

    r: Number
    q: Number

    def __post_init__(self):
        if self.r < 0 or self.q < 0:
            raise ValueError(f"moments must be nonnegative, got r={self.r}, q={self.q}")


def moment_recursion(
    tau0: int,
    start: MomentPair,
    n: int,
    exact: bool = False,
    check_bounds: bool = False,
) -> MomentPair:
    """Advance the annealed moment pair from ball count tau0 to n.

    One update with m balls maps (r, q) to
    ``((1 + 4/m + 2/m^2) r + (2/m) q,  (2/m^2) r + (1 + 2/m) q)``.
    With ``exact=True`` the iteration runs in exact rationals (intended for
    n up to a few hundred; denominators grow).  With ``check_bounds=True``
    the growth bounds r(m) <= C m^4 and q(m) <= 2 C m^3 are asserted at
    every step, where C = r(tau0) when positive and q(tau0) otherwise.
    """
    if tau0 < 1:
        raise ValueError(f"tau0 must be >= 1, got {tau0}")
    if n < tau0:
        raise ValueError(f"target n={n} is below tau0={tau0}")
    if exact:
        r, q = Fraction(start.r), Fraction(start.q)
    else:
        r, q = float(start.r), float(start.q)
    c = r if r > 0 else q
    for m in range(tau0, n):
        if exact:
            mm = Fraction(1, m * m)
            r, q = (
                (1 + Fraction(4, m) + 2 * mm) * r + Fraction(2, m) * q,
                2 * mm * r + (1 + Fraction(2, m)) * q,
            )
        else:
            inv = 1.0 / m
            inv2 = inv * inv
            r, q = (
                (1.0 + 4.0 * inv + 2.0 * inv2) * r + 2.0 * inv * q,
                2.0 * inv2 * r + (1.0 + 2.0 * inv) * q,
            )
        if check_bounds:
            mnext = m + 1
            if r > c * mnext**4 or q > 2 * c * mnext**3:
                raise RuntimeError(
                    f"moment growth bound violated at n={mnext}: "
                    f"r={r}, q={q}, C={c}"
                )
    return MomentPair(r, q)


def annealed_mean_sum(s_tau0, tau0: int, n: int):
    """Expected label sum at ball count n: S_tau0 scaled by n(n+1)/(tau0(tau0+1))."""
    if tau0 < 1 or n < tau0:
        raise ValueError(f"need n >= tau0 >= 1, got n={n}, tau0={tau0}")
    factor = (n * (n + 1)) / (tau0 * (tau0 + 1))
    arr = np.asarray(s_tau0, dtype=float) * factor
    return float(arr) if arr.ndim == 0 else arr


def a_second_moment_lower_bound(a_tau0_sq: float, tau0: int) -> float:
    """Positive lower bound on the limiting second moment of the scaled mean.

    Evaluates ``a_tau0_sq * prod_{k>=tau0} (1 - 2/(k+2)^2)`` exactly: each
    factor splits as (k+2-sqrt(2))(k+2+sqrt(2))/(k+2)^2, so the infinite
    product telescopes to a ratio of gamma functions with no truncation
    error.  Strictly positive whenever ``a_tau0_sq`` is.
    """
    if tau0 < 1:
        raise ValueError(f"tau0 must be >= 1, got {tau0}")
    if a_tau0_sq < 0:
        raise ValueError(f"a_tau0_sq must be >= 0, got {a_tau0_sq}")
    j0 = tau0 + 2
    s = sqrt(2.0)
    log_p = 2.0 * gammaln(j0) - gammaln(j0 - s) - gammaln(j0 + s)
    return a_tau0_sq * float(np.exp(log_p))


def limit_cdf(x, family: str, a: float):
    """CDF of the scaled limit law: ``a*Exp(1)`` or ``a*Gamma(2,1)``.

    ``a < 0`` mirrors the support onto the negative axis; ``a = 0`` is a
    point mass the caller must handle and raises here.
    """
    if a == 0:
        raise ValueError("a=0 is a degenerate point mass; no continuous CDF")
    xs = np.asarray(x, dtype=float)
    z = xs / a
    if family == "exp_signed":
        g = np.where(z >= 0, -np.expm1(-np.clip(z, 0, None)), 0.0)
    elif family == "gamma2":
        zc = np.clip(z, 0, None)
        g = np.where(z >= 0, 1.0 - (1.0 + zc) * np.exp(-zc), 0.0)
    else:
        raise ValueError(f"unknown family {family!r}; use 'exp_signed' or 'gamma2'")
    out = g if a > 0 else 1.0 - g
    return float(out) if out.ndim == 0 else out


def gamma_cf(t, a) -> complex:
    """Characteristic function (1 - i <t, a>)^(-2) of the shared-Gamma limit vector."""
    s = float(np.dot(np.asarray(t, dtype=float).ravel(), np.asarray(a, dtype=float).ravel()))
    return (1.0 - 1j * s) ** (-2)


def sample_exp_signed(a: float, size: int, rng: RngStream) -> np.ndarray:
    """Exact sampler for a*Exp(1)."""
    return a * rng.exponential(1.0, size=size)


def sample_gamma2(a: float, size: int, rng: RngStream) -> np.ndarray:
    """Exact sampler for a*Gamma(2,1)."""
    return a * rng.gamma(2.0, 1.0, size=size)


def sample_shared_gamma(a, size: int, rng: RngStream) -> np.ndarray:
    """(size, d) samples of G * a with one Gamma(2,1) scalar G shared across coordinates."""
    a = np.asarray(a, dtype=float)
    g = rng.gamma(2.0, 1.0, size=size)
    return g[:, None] * a[None, :]
