"""Open intervals on I = [0, 1] and open arcs on the circle R/Z.

Arcs are stored in lift coordinates: ``(a, b)`` with ``0 <= a < 1`` and
``a < b <= a + 1``, so an arc crossing 0 has ``b > 1``.  The arc ``(a, a + 1)``
is the circle minus the point ``a``; the whole circle is the separate
``full`` flag of :class:`IntervalSet`.

Comparisons take a tolerance and return ``True``/``False``/``None``; ``None``
means the endpoints are too close to call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

Interval = tuple  # (a, b) with a < b


class Manifold(str, Enum):
    INTERVAL = "interval"
    CIRCLE = "circle"

    @classmethod
    def parse(cls, value) -> "Manifold":
        if isinstance(value, Manifold):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            from .errors import DomainError
            raise DomainError(f"unknown manifold {value!r}") from None


def frac(x: float) -> float:
    y = x - math.floor(x)
    return 0.0 if y >= 1.0 else y


def normalize(iv: Sequence[float], manifold: Manifold) -> Interval:
    a, b = float(iv[0]), float(iv[1])
    if not b > a:
        raise ValueError(f"empty interval ({a}, {b})")
    if manifold is Manifold.CIRCLE:
        if b - a > 1.0:
            raise ValueError(f"arc ({a}, {b}) is longer than the circle")
        s = math.floor(a)
        a, b = a - s, b - s
    return (a, b)


def _shifts(manifold: Manifold):
    return (-1.0, 0.0, 1.0) if manifold is Manifold.CIRCLE else (0.0,)


def overlap(u: Interval, v: Interval, manifold: Manifold) -> float:
    """Length of the largest common piece; negative values are gap widths."""
    return max(min(u[1], v[1] + k) - max(u[0], v[0] + k) for k in _shifts(manifold))


def meets(u: Interval, v: Interval, manifold: Manifold, tol: float = 0.0):
    """Three-valued test of ``u ∩ v != ∅`` for open intervals."""
    o = overlap(u, v, manifold)
    if o > tol:
        return True
    if o < -tol or (tol == 0.0 and o <= 0.0):
        return False
    return None


def equal(u: Interval, v: Interval, manifold: Manifold, tol: float = 0.0) -> bool:
    return any(abs(u[0] - v[0] - k) <= tol and abs(u[1] - v[1] - k) <= tol for k in _shifts(manifold))


def subset(u: Interval, v: Interval, manifold: Manifold, tol: float = 0.0) -> bool:
    """``u ⊆ v`` up to ``tol`` at the endpoints."""
    return any(v[0] + k - tol <= u[0] and u[1] <= v[1] + k + tol for k in _shifts(manifold))


def contains(iv: Interval, x: float, manifold: Manifold, tol: float = 0.0) -> bool:
    """Open-interval membership, enlarged by ``tol`` (shrunk if ``tol < 0``)."""
    if manifold is Manifold.CIRCLE:
        x = iv[0] + frac(x - iv[0] + tol) - tol
    return iv[0] - tol < x < iv[1] + tol


def intersection(u: Interval, v: Interval, manifold: Manifold) -> list[Interval]:
    """Pieces of ``u ∩ v`` (two pieces are possible for arcs)."""
    out = []
    for k in _shifts(manifold):
        lo, hi = max(u[0], v[0] + k), min(u[1], v[1] + k)
        if hi > lo:
            piece = normalize((lo, hi), manifold)
            if not any(equal(piece, p, manifold, 1e-15) for p in out):
                out.append(piece)
    return out


def lift_near(x: float, ref: float) -> float:
    """Representative of ``x mod 1`` in ``[ref, ref + 1)``."""
    return ref + frac(x - ref)


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise disjoint open intervals (arcs on the circle)."""

    manifold: Manifold
    intervals: tuple = ()
    full: bool = False

    def __post_init__(self):
        m = Manifold.parse(self.manifold)
        object.__setattr__(self, "manifold", m)
        if self.full:
            if m is not Manifold.CIRCLE:
                raise ValueError("only the circle uses the full flag; use (0, 1) on the interval")
            object.__setattr__(self, "intervals", ())
            return
        ivs = sorted(normalize(iv, m) for iv in self.intervals)
        for u, v in zip(ivs, ivs[1:]):
            if u[1] > v[0]:
                raise ValueError(f"intervals {u} and {v} overlap")
        if m is Manifold.CIRCLE and len(ivs) > 1 and ivs[-1][1] > ivs[0][0] + 1.0:
            raise ValueError(f"arcs {ivs[-1]} and {ivs[0]} overlap across 0")
        if m is Manifold.INTERVAL and ivs and (ivs[0][0] < 0.0 or ivs[-1][1] > 1.0):
            raise ValueError("intervals must lie in [0, 1]")
        object.__setattr__(self, "intervals", tuple(ivs))

    @classmethod
    def empty(cls, manifold) -> "IntervalSet":
        return cls(Manifold.parse(manifold))

    @classmethod
    def whole(cls, manifold) -> "IntervalSet":
        m = Manifold.parse(manifold)
        if m is Manifold.CIRCLE:
            return cls(m, full=True)
        return cls(m, ((0.0, 1.0),))

    def __len__(self):
        return 1 if self.full else len(self.intervals)

    def __iter__(self):
        return iter(self.components())

    def is_empty(self) -> bool:
        return not self.full and not self.intervals

    def components(self) -> list[Interval]:
        """Components as intervals; the full circle is reported as ``(0, 1)``."""
        if self.full:
            return [(0.0, 1.0)]
        return list(self.intervals)

    def measure(self) -> float:
        return 1.0 if self.full else sum(b - a for a, b in self.intervals)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        if self.full:
            return True
        return any(contains(iv, x, self.manifold, tol) for iv in self.intervals)

    def component_of(self, x: float, tol: float = 0.0):
        """The component containing ``x`` (or ``None``)."""
        if self.full:
            return (0.0, 1.0)
        for iv in self.intervals:
            if contains(iv, x, self.manifold, tol):
                return iv
        return None

    def locate(self, xs):
        """Index of the component containing each point (``-1`` if none); vectorized."""
        import numpy as np
        xs = np.asarray(xs, dtype=float)
        if self.full:
            return np.zeros(xs.shape, dtype=int)
        if not self.intervals:
            return np.full(xs.shape, -1, dtype=int)
        starts = np.array([a for a, _ in self.intervals])
        ends = np.array([b for _, b in self.intervals])
        if self.manifold is Manifold.CIRCLE:
            xs = xs - np.floor(xs)
        idx = np.searchsorted(starts, xs, side="right") - 1
        ok = (idx >= 0) & (xs > starts[np.clip(idx, 0, None)]) & (xs < ends[np.clip(idx, 0, None)])
        out = np.where(ok, idx, -1)
        if self.manifold is Manifold.CIRCLE and ends[-1] > 1.0:
            wrap = (out == -1) & (xs + 1.0 < ends[-1])
            out = np.where(wrap, len(ends) - 1, out)
        return out

    def contains_interval(self, iv: Interval, tol: float = 0.0) -> bool:
        if self.full:
            return True
        return any(subset(iv, c, self.manifold, tol) for c in self.intervals)

    def approx_equal(self, other: "IntervalSet", tol: float) -> bool:
        if self.full or other.full:
            return self.full == other.full
        if len(self.intervals) != len(other.intervals):
            return False
        unmatched = list(other.intervals)
        for iv in self.intervals:
            hit = next((j for j, w in enumerate(unmatched) if equal(iv, w, self.manifold, tol)), None)
            if hit is None:
                return False
            unmatched.pop(hit)
        return True

    def hausdorff(self, other: "IntervalSet") -> float:
        """Largest endpoint mismatch after matching components (inf if counts differ)."""
        if self.full or other.full:
            return 0.0 if self.full == other.full else math.inf
        if len(self.intervals) != len(other.intervals):
            return math.inf
        worst = 0.0
        for iv in self.intervals:
            best = math.inf
            for w in other.intervals:
                for k in _shifts(self.manifold):
                    best = min(best, max(abs(iv[0] - w[0] - k), abs(iv[1] - w[1] - k)))
            worst = max(worst, best)
        return worst

    def closure_complement(self) -> "IntervalSet":
        """Components of ``M`` minus the closure of this set."""
        m = self.manifold
        if self.full:
            return IntervalSet(m)
        if not self.intervals:
            return IntervalSet.whole(m)
        merged = _merge_closed(self.intervals, m)
        if m is Manifold.INTERVAL:
            gaps, cur = [], 0.0
            for a, b in merged:
                if a > cur:
                    gaps.append((cur, a))
                cur = max(cur, b)
            if cur < 1.0:
                gaps.append((cur, 1.0))
            return IntervalSet(m, tuple(gaps))
        if len(merged) == 1 and merged[0][1] - merged[0][0] >= 1.0:
            return IntervalSet(m)
        gaps = []
        for (a, b), (c, _) in zip(merged, merged[1:] + [(merged[0][0] + 1.0, None)]):
            if c > b:
                gaps.append((b, c))
        return IntervalSet(m, tuple(gaps))

    def image(self, fn) -> "IntervalSet":
        """Image under an increasing lift ``fn`` (applied to the endpoints)."""
        if self.full:
            return self
        out = []
        for a, b in self.intervals:
            fa, fb = float(fn(a)), float(fn(b))
            if self.manifold is Manifold.CIRCLE:
                fb = fa + min(max(fb - fa, 0.0), 1.0)
            out.append((fa, fb))
        return IntervalSet(self.manifold, tuple(out))

    def to_json(self) -> dict:
        return {"manifold": self.manifold.value, "full": self.full,
                "intervals": [list(iv) for iv in self.intervals]}


def _merge_closed(ivs: Iterable[Interval], manifold: Manifold) -> list[Interval]:
    """Merge intervals whose closures touch; arcs may merge across 0."""
    ivs = sorted(ivs)
    merged: list[list[float]] = []
    for a, b in ivs:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    if manifold is Manifold.CIRCLE and len(merged) > 1 and merged[-1][1] >= merged[0][0] + 1.0:
        last = merged.pop()
        first = merged.pop(0)
        merged.append([last[0], max(last[1], first[1] + 1.0)])
        merged.sort()
    return [tuple(x) for x in merged]


def union_open(ivs: Iterable[Interval], manifold: Manifold) -> "IntervalSet":
    """Union of open intervals; pieces that only touch at a point stay separate."""
    items = sorted(normalize(iv, manifold) for iv in ivs)
    if manifold is Manifold.CIRCLE:
        long = [iv for iv in items if iv[1] - iv[0] >= 1.0]
        if long:
            hole = long[0][0]
            if any(contains(iv, hole, manifold) for iv in items):
                return IntervalSet(manifold, full=True)
            return IntervalSet(manifold, (long[0],))
    merged: list[list[float]] = []
    for a, b in items:
        if merged and a < merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    if manifold is Manifold.CIRCLE:
        if len(merged) > 1 and merged[-1][1] > merged[0][0] + 1.0:
            last, first = merged.pop(), merged.pop(0)
            merged.append([last[0], max(last[1], first[1] + 1.0)])
        if any(b - a > 1.0 for a, b in merged):
            return IntervalSet(manifold, full=True)
    return IntervalSet(manifold, tuple(tuple(x) for x in merged))
