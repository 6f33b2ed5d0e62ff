"""Core simulator for the integer addition urn.

An urn holds balls labeled with d-dimensional integer vectors.  One update
draws k balls (k >= 2, default 2) uniformly at random with replacement and
appends a new ball labeled with the coordinate-wise sum of the drawn labels.
The urn never removes balls, so after ``additions`` updates an urn started
with ``tau0`` balls holds ``tau0 + additions`` balls, indexed in addition
order.

Arithmetic is exact: labels and the running sums are Python integers, so
values can never silently wrap.  In the default checked mode any coordinate
of a new label, of the running sum, or of the running sum of squares that
leaves the signed 64-bit range raises :class:`UrnOverflowError` (worst-case
label growth doubles per step, so unchecked growth would overflow quickly).
Constructing the urn with ``bigint=True`` lifts the range check and lets
values grow without bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .rng import RngStream

INT64_MAX = 2**63 - 1
INT64_MIN = -(2**63)


class UrnOverflowError(OverflowError):
    """A coordinate left the signed 64-bit range in checked mode.

    Attributes record where: ``ball`` is the 1-based index of the ball whose
    addition failed, ``coord`` the offending coordinate, ``quantity`` one of
    ``"label"``, ``"sum"`` or ``"sum_sq"``.
    """

    def __init__(self, ball: int, coord: int, quantity: str, value: int):
        self.ball = ball
        self.coord = coord
        self.quantity = quantity
        self.value = value
        super().__init__(
            f"{quantity} coordinate {coord} overflows int64 at ball {ball} "
            f"(value {value}); rerun with bigint=True for exact arbitrary-precision arithmetic"
        )


@dataclass
class Snapshot:
    """Statistics recorded at a checkpoint during :func:`run`."""

    n: int
    a: tuple  # scaled mean S_n / (n (n+1)) per coordinate
    r: tuple  # squared label sum S_n^2 per coordinate
    q: tuple  # sum of squared labels per coordinate
    urn: "UrnState"


class UrnState:
    """Mutable state of one urn realization.

    Labels are stored flat in addition order: plain ints for d = 1, tuples of
    ints otherwise.  The first ``tau0`` entries are the initial configuration
    and never change.  Running per-coordinate sums (``sum_s``) and sums of
    squares (``sum_q``) are maintained incrementally and always equal the
    rescan over labels.

    A single UrnState must be confined to one thread; realizations are
    parallelized by giving each its own urn and :class:`RngStream`.
    """

    __slots__ = ("d", "tau0", "bigint", "_labels", "_s", "_q")

    def __init__(self, initial, d: int, bigint: bool = False):
        if d < 1:
            raise ValueError(f"dimension d must be >= 1, got {d}")
        initial = list(initial)
        if not initial:
            raise ValueError("initial configuration must contain at least one ball")
        self.d = int(d)
        self.bigint = bool(bigint)
        labels = []
        for pos, lab in enumerate(initial):
            labels.append(self._coerce_label(lab, pos))
        self._labels = labels
        self.tau0 = len(labels)
        if d == 1:
            self._s = [sum(labels)]
            self._q = [sum(x * x for x in labels)]
        else:
            self._s = [sum(lab[j] for lab in labels) for j in range(d)]
            self._q = [sum(lab[j] ** 2 for lab in labels) for j in range(d)]
        if not self.bigint:
            for j in range(d):
                _check64(self._s[j], self.tau0, j, "sum")
                _check64(self._q[j], self.tau0, j, "sum_sq")

    def _coerce_label(self, lab, pos):
        if self.d == 1:
            if isinstance(lab, (list, tuple, np.ndarray)):
                if len(lab) != 1:
                    raise ValueError(
                        f"label at position {pos} has length {len(lab)}, expected 1"
                    )
                lab = lab[0]
            v = int(lab)
            if not self.bigint and not (INT64_MIN <= v <= INT64_MAX):
                raise UrnOverflowError(pos + 1, 0, "label", v)
            return v
        if not isinstance(lab, (list, tuple, np.ndarray)) or len(lab) != self.d:
            raise ValueError(
                f"label at position {pos} must be a length-{self.d} integer vector"
            )
        vec = tuple(int(x) for x in lab)
        if not self.bigint:
            for j, v in enumerate(vec):
                if not (INT64_MIN <= v <= INT64_MAX):
                    raise UrnOverflowError(pos + 1, j, "label", v)
        return vec

    # -- read access ------------------------------------------------------

    @property
    def n(self) -> int:
        """Current ball count."""
        return len(self._labels)

    @property
    def sum_s(self) -> tuple:
        """Per-coordinate sum of all labels (exact)."""
        return tuple(self._s)

    @property
    def sum_q(self) -> tuple:
        """Per-coordinate sum of squared labels (exact)."""
        return tuple(self._q)

    @property
    def labels(self) -> list:
        """The label sequence in addition order (ints for d=1, tuples otherwise)."""
        return list(self._labels)

    def label_at(self, index: int):
        return self._labels[index]

    def labels_array(self, dtype=np.int64) -> np.ndarray:
        """Labels as an (n, d) array.  Use a float dtype in bigint mode if
        values have outgrown int64."""
        arr = np.array(self._labels, dtype=dtype)
        return arr.reshape(self.n, self.d)

    def verify_sums(self) -> bool:
        """Exact conservation check: rescan labels and compare with the
        incrementally maintained sums."""
        if self.d == 1:
            return self._s[0] == sum(self._labels) and self._q[0] == sum(
                x * x for x in self._labels
            )
        for j in range(self.d):
            if self._s[j] != sum(lab[j] for lab in self._labels):
                return False
            if self._q[j] != sum(lab[j] ** 2 for lab in self._labels):
                return False
        return True


def new_urn(initial: Iterable, d: int = 1, bigint: bool = False) -> UrnState:
    """Build an urn from its initial configuration.

    ``initial`` is a nonempty sequence of labels; for d = 1 plain integers
    are accepted.  Raises ``ValueError`` on an empty configuration or a
    dimension mismatch.
    """
    return UrnState(initial, d=d, bigint=bigint)


def draw_index(urn: UrnState, rng: RngStream) -> int:
    """Uniform 0-based ball index, each with probability exactly 1/n."""
    return int(rng.integers(0, urn.n))


def sample_draw(urn: UrnState, rng: RngStream):
    """Label of a uniformly drawn ball; the urn is not modified."""
    return urn._labels[draw_index(urn, rng)]


def step(
    urn: UrnState,
    rng: Optional[RngStream],
    k: int = 2,
    indices: Optional[Sequence[int]] = None,
):
    """Perform one addition: draw k balls with replacement, append their sum.

    ``indices`` overrides the random draws with a fixed index sequence
    (length k, 0-based), which the exhaustive small-urn tests rely on.
    Returns the new label.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if indices is None:
        idx = [int(i) for i in rng.integers(0, urn.n, size=k)]
    else:
        idx = [int(i) for i in indices]
        if len(idx) != k:
            raise ValueError(f"expected {k} forced indices, got {len(idx)}")
        for i in idx:
            if not (0 <= i < urn.n):
                raise IndexError(f"forced index {i} outside urn of size {urn.n}")
    labels = urn._labels
    ball = urn.n + 1
    if urn.d == 1:
        v = 0
        for i in idx:
            v += labels[i]
        s = urn._s[0] + v
        q = urn._q[0] + v * v
        if not urn.bigint:
            _check64(v, ball, 0, "label")
            _check64(s, ball, 0, "sum")
            _check64(q, ball, 0, "sum_sq")
        labels.append(v)
        urn._s[0] = s
        urn._q[0] = q
        return v
    vec = [0] * urn.d
    for i in idx:
        lab = labels[i]
        for j in range(urn.d):
            vec[j] += lab[j]
    new = tuple(vec)
    new_s = []
    new_q = []
    for j, v in enumerate(new):
        s = urn._s[j] + v
        q = urn._q[j] + v * v
        if not urn.bigint:
            _check64(v, ball, j, "label")
            _check64(s, ball, j, "sum")
            _check64(q, ball, j, "sum_sq")
        new_s.append(s)
        new_q.append(q)
    labels.append(new)
    urn._s[:] = new_s
    urn._q[:] = new_q
    return new


def _check64(v: int, ball: int, coord: int, quantity: str):
    if v > INT64_MAX or v < INT64_MIN:
        raise UrnOverflowError(ball, coord, quantity, v)


def run(
    urn: UrnState,
    additions: int,
    rng: RngStream,
    k: int = 2,
    checkpoints: Sequence[int] = (),
    recorder: Optional[Callable[[Snapshot], None]] = None,
) -> UrnState:
    """Perform ``additions`` updates, invoking ``recorder`` at checkpoints.

    Checkpoints are ball counts in (current n, current n + additions]; the
    recorder receives a :class:`Snapshot` when the urn first reaches each of
    them.  All index draws for the run are pre-generated from ``rng`` in one
    batch, exactly uniform per step.  Returns the (mutated) urn.
    """
    if additions < 0:
        raise ValueError(f"additions must be >= 0, got {additions}")
    cps = sorted(set(int(c) for c in checkpoints))
    n0 = urn.n
    for c in cps:
        if not (n0 < c <= n0 + additions):
            raise ValueError(
                f"checkpoint {c} outside ({n0}, {n0 + additions}]"
            )
    if additions == 0:
        return urn
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")

    counts = np.arange(n0, n0 + additions)
    idx = rng.integers(0, counts[:, None], size=(additions, k)).tolist()

    cps.append(-1)  # sentinel
    cp_pos = 0
    next_cp = cps[0]
    labels = urn._labels
    checked = not urn.bigint

    if urn.d == 1 and k == 2:
        s = urn._s[0]
        q = urn._q[0]
        m = n0
        for i1, i2 in idx:
            v = labels[i1] + labels[i2]
            labels.append(v)
            s += v
            q += v * v
            m += 1
            if checked and (v > INT64_MAX or v < INT64_MIN or q > INT64_MAX
                            or s > INT64_MAX or s < INT64_MIN):
                # roll back to the last consistent state before raising
                del labels[-1]
                urn._s[0] = s - v
                urn._q[0] = q - v * v
                bad = ("label" if (v > INT64_MAX or v < INT64_MIN)
                       else "sum_sq" if q > INT64_MAX else "sum")
                raise UrnOverflowError(m, 0, bad, v if bad == "label" else (q if bad == "sum_sq" else s))
            if m == next_cp:
                urn._s[0], urn._q[0] = s, q
                _record(urn, recorder)
                cp_pos += 1
                next_cp = cps[cp_pos]
        urn._s[0], urn._q[0] = s, q
        return urn

    # general dimension / general k path
    for row in idx:
        step(urn, None, k=k, indices=row)
        if urn.n == next_cp:
            _record(urn, recorder)
            cp_pos += 1
            next_cp = cps[cp_pos]
    return urn


def _record(urn: UrnState, recorder):
    if recorder is None:
        return
    n = urn.n
    denom = n * (n + 1)
    a = tuple(s / denom for s in urn._s)
    r = tuple(s * s for s in urn._s)
    recorder(Snapshot(n=n, a=a, r=r, q=tuple(urn._q), urn=urn))
