"""Dynamical invariants: fixed sets, supports, rotation numbers, variation.

Supports are computed structurally where the expression allows it and
numerically otherwise:

* primitives know their exact supports;
* a conjugate ``A C A^-1`` has support ``A(supp C)``;
* a power of a grounded map has the support of the map;
* factors whose supports are disjoint commute, so each cluster of
  overlapping factors is analysed on its own;
* anything left is scanned on a grid inside the union of the factor supports.

The numerical scan follows the usual recipe: sign changes of ``F(x) - x - k``
refined by bisection, runs of near-zero values reported as fixed intervals,
and near-tangencies flagged as warnings.  Plateau ends found this way are only
accurate to roughly ``sqrt(tol_id / curvature)`` because C^1 maps may leave a
fixed interval tangentially.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .config import DEFAULT, RunConfig
from .diffeo import (Atom, Diffeo, Rotation, apply_atoms, atoms_derivative, expr_to_json,
                     invert_atoms, support_from_fixed)
from .errors import DomainError
from .intervals import IntervalSet, Manifold, _merge_closed, overlap

NEAR_TANGENCY = 1e-6
MIN_WINDOW_GRID = 256


@dataclass(frozen=True)
class FixedSet:
    manifold: Manifold
    points: tuple = ()
    intervals: tuple = ()
    warnings: tuple = ()

    @property
    def whole(self) -> bool:
        return any(b - a >= 1.0 for a, b in self.intervals)

    def is_empty(self) -> bool:
        return not self.points and not self.intervals

    def __len__(self):
        return len(self.points) + len(self.intervals)

    def to_json(self) -> dict:
        return {"manifold": self.manifold.value, "points": [float(p) for p in self.points],
                "intervals": [[float(a), float(b)] for a, b in self.intervals],
                "whole": self.whole, "warnings": list(self.warnings)}


@dataclass(frozen=True)
class SupportAnalysis:
    support: IntervalSet
    exact: bool
    warnings: tuple = ()


# ---------------------------------------------------------------------------
# atom-list utilities


def reduce_atoms(atoms) -> tuple:
    out: list[Atom] = []
    for a in atoms:
        if out and out[-1][0] == a[0] and out[-1][1] == -a[1]:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def _atom_key(atoms) -> tuple:
    return tuple((type(leaf).__name__, repr(expr_to_json(leaf)), s) for leaf, s in atoms)


def _grounded_set(s: IntervalSet) -> bool:
    return not s.full


# ---------------------------------------------------------------------------
# numerical scan


def _refine_roots(G, lo, hi, tol):
    lo, hi = np.array(lo, dtype=float), np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    glo = G(lo)
    for _ in range(200):
        if not np.any(hi - lo > tol):
            break
        mid = 0.5 * (lo + hi)
        gm = G(mid)
        same = np.sign(gm) == np.sign(glo)
        lo, glo = np.where(same, mid, lo), np.where(same, gm, glo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _refine_edges(G, inside, outside, tol_small, tol):
    """Boundary between a point with ``|G| < tol_small`` and one without."""
    a, b = np.array(inside, dtype=float), np.array(outside, dtype=float)
    if a.size == 0:
        return a
    for _ in range(200):
        if not np.any(np.abs(b - a) > tol):
            break
        mid = 0.5 * (a + b)
        small = np.abs(G(mid)) < tol_small
        a, b = np.where(small, mid, a), np.where(small, b, mid)
    return a


def _scan(G, xs, gs, tol, fixed_ends: bool):
    """Fixed items ``(a, b)`` (``a == b`` for points) of ``G`` on the grid ``xs``."""
    n = len(xs)
    small = np.abs(gs) < tol.tol_id
    sign = np.sign(gs)
    if fixed_ends:
        small[0] = small[-1] = False
        sign[0] = sign[-1] = 0.0
    items, warnings = [], []
    brackets, tangent = [], []
    edges_in, edges_out, edge_slots = [], [], []

    idx = np.flatnonzero(small)
    runs = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1) if idx.size else []
    for run in runs:
        s, e = int(run[0]), int(run[-1])
        if e > s:
            slot = len(items)
            items.append([xs[s], xs[e]])
            for end, nb, k in ((s, s - 1, 0), (e, e + 1, 1)):
                if nb < 0 or nb >= n:
                    continue
                if fixed_ends and nb in (0, n - 1):
                    items[slot][k] = xs[nb]
                else:
                    edges_in.append(xs[end])
                    edges_out.append(xs[nb])
                    edge_slots.append((slot, k))
        else:
            left = sign[s - 1] if s > 0 else 0.0
            right = sign[s + 1] if s < n - 1 else 0.0
            if left * right < 0:
                brackets.append((xs[s - 1], xs[s + 1]))
            else:
                tangent.append((xs[max(s - 1, 0)], xs[min(s + 1, n - 1)]))

    regular = ~small & (sign != 0)
    ch = np.flatnonzero(regular[:-1] & regular[1:] & (sign[:-1] * sign[1:] < 0))
    brackets += [(xs[i], xs[i + 1]) for i in ch]

    absg = np.abs(gs)
    if n >= 3:
        mid = np.arange(1, n - 1)
        cand = mid[regular[mid - 1] & regular[mid] & regular[mid + 1]
                   & (sign[mid - 1] == sign[mid]) & (sign[mid + 1] == sign[mid])
                   & (absg[mid] <= absg[mid - 1]) & (absg[mid] <= absg[mid + 1])
                   & (absg[mid] < NEAR_TANGENCY)]
        tangent += [(xs[i - 1], xs[i + 1]) for i in cand]

    if edges_in:
        refined = _refine_edges(G, edges_in, edges_out, tol.tol_id, tol.tol_root)
        for (slot, k), x in zip(edge_slots, refined):
            items[slot][k] = float(x)
    if brackets:
        lo, hi = zip(*brackets)
        for r in _refine_roots(G, lo, hi, tol.tol_root):
            items.append([float(r), float(r)])
    for lo, hi in tangent:
        res = minimize_scalar(lambda x: abs(float(G(np.array([x]))[0])), bounds=(lo, hi),
                              method="bounded", options={"xatol": tol.tol_root})
        if res.fun < tol.tol_id:
            items.append([float(res.x), float(res.x)])
        elif res.fun < NEAR_TANGENCY:
            warnings.append(f"near-tangency at x={res.x:.12g}: |f(x)-x| = {res.fun:.3g}")
    return _clean_items(items, tol.tol_root * 10), warnings


def _clean_items(items, tol):
    items = sorted((float(a), float(b)) for a, b in items)
    out: list[list[float]] = []
    for a, b in items:
        if out and a <= out[-1][1] + tol:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [tuple(x) for x in out]


def _window_support(atoms, m: Manifold, lo: float, hi: float, cfg: RunConfig):
    """Support components inside the window ``(lo, hi)`` whose ends are fixed."""
    tol = cfg.tol
    n = max(MIN_WINDOW_GRID, int(math.ceil(cfg.grid * (hi - lo))))
    xs = np.linspace(lo, hi, n + 1)
    k = float(np.round(apply_atoms(atoms, np.array([lo]))[0] - lo))

    def G(x):
        return apply_atoms(atoms, x) - x - k

    items, warnings = _scan(G, xs, G(xs), tol, fixed_ends=True)
    items = [(lo, lo)] + [it for it in items if it[1] > lo and it[0] < hi] + [(hi, hi)]
    items = _clean_items(items, tol.tol_root * 10)
    comps = [(b, c) for (_, b), (c, _) in zip(items, items[1:]) if c > b]
    return comps, warnings


def _circle_support(atoms, cfg: RunConfig):
    """Numerical support of a circle map scanned over the whole circle."""
    tol = cfg.tol
    n = cfg.grid
    base = np.arange(n) / n
    d = apply_atoms(atoms, base) - base
    ks = [k for k in range(math.ceil(d.min() - tol.tol_id), math.floor(d.max() + tol.tol_id) + 1)]
    if not ks:
        return IntervalSet(Manifold.CIRCLE, full=True), []
    k = min(ks, key=lambda j: np.min(np.abs(d - j)))
    g0 = d - k
    if np.max(np.abs(g0)) < tol.tol_id:
        return IntervalSet.empty(Manifold.CIRCLE), []
    j = int(np.argmax(np.abs(g0)))
    start = base[j]
    xs = start + np.arange(n + 1) / n
    gs = np.concatenate([np.roll(g0, -j), g0[j:j + 1]])

    def G(x):
        return apply_atoms(atoms, x) - x - k

    items, warnings = _scan(G, xs, gs, tol, fixed_ends=False)
    if not items:
        return IntervalSet(Manifold.CIRCLE, full=True), warnings
    pts = [a for a, b in items if a == b]
    ivs = [(a, b) for a, b in items if b > a]
    return support_from_fixed(pts, ivs, Manifold.CIRCLE, lo=start), warnings


def _numeric_support(atoms, m: Manifold, supports, cfg: RunConfig) -> SupportAnalysis:
    inv = tuple(invert_atoms(atoms))
    if _atom_key(inv) < _atom_key(atoms):
        atoms = inv
    if any(s.full for s in supports):
        if m is Manifold.CIRCLE:
            sup, warns = _circle_support(atoms, cfg)
            return SupportAnalysis(sup, False, tuple(warns))
    comps = [c for s in supports for c in s.components()]
    windows = _merge_closed(comps, m)
    if m is Manifold.CIRCLE and len(windows) == 1 and windows[0][1] - windows[0][0] >= 1.0:
        sup, warns = _circle_support(atoms, cfg)
        return SupportAnalysis(sup, False, tuple(warns))
    out, warns = [], []
    for lo, hi in windows:
        c, w = _window_support(atoms, m, lo, hi, cfg)
        out += c
        warns += w
    return SupportAnalysis(IntervalSet(m, tuple(out)), False, tuple(warns))


# ---------------------------------------------------------------------------
# structural support analysis


@lru_cache(maxsize=4096)
def _support_atoms(atoms: tuple, m: Manifold, cfg: RunConfig) -> SupportAnalysis:
    if not atoms:
        return SupportAnalysis(IntervalSet.empty(m), True)
    if all(isinstance(leaf, Rotation) for leaf, _ in atoms):
        c = sum(s * leaf.c for leaf, s in atoms)
        if abs(c - round(c)) < 1e-12:
            return SupportAnalysis(IntervalSet.empty(m), True)
        return SupportAnalysis(IntervalSet.whole(m), True)

    k, n = 0, len(atoms)
    while 2 * (k + 1) < n and atoms[k][0] == atoms[n - 1 - k][0] and atoms[k][1] == -atoms[n - 1 - k][1]:
        k += 1
    if k:
        inner = _support_atoms(atoms[k:n - k], m, cfg)
        prefix = atoms[:k]
        img = inner.support.image(lambda x: float(apply_atoms(prefix, np.array([x]))[0]))
        return SupportAnalysis(img, inner.exact, inner.warnings)

    for p in range(1, n // 2 + 1):
        if n % p == 0 and atoms == atoms[:p] * (n // p):
            base = _support_atoms(atoms[:p], m, cfg)
            if base.exact and _grounded_set(base.support):
                return base
            break

    supports = [leaf.support(m) for leaf, _ in atoms]
    live = [i for i, s in enumerate(supports) if not s.is_empty()]
    if len(live) < n:
        return _support_atoms(reduce_atoms(atoms[i] for i in live), m, cfg)

    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if find(i) != find(j) and _supports_meet(supports[i], supports[j], m):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    if len(groups) > 1:
        parts = [_support_atoms(reduce_atoms(atoms[i] for i in g), m, cfg) for g in groups.values()]
        comps = [c for p in parts for c in p.support.components()]
        return SupportAnalysis(IntervalSet(m, tuple(comps)), all(p.exact for p in parts),
                               tuple(w for p in parts for w in p.warnings))

    leaves = {leaf for leaf, _ in atoms}
    if len(leaves) == 1:
        net = sum(s for _, s in atoms)
        if net == 0:
            return SupportAnalysis(IntervalSet.empty(m), True)
        if _grounded_set(supports[0]):
            return SupportAnalysis(supports[0], True)
    return _numeric_support(atoms, m, supports, cfg)


def _supports_meet(u: IntervalSet, v: IntervalSet, m: Manifold) -> bool:
    if u.full or v.full:
        return True
    return any(overlap(a, b, m) > 0 for a in u.intervals for b in v.intervals)


def analyze_support(f: Diffeo, cfg: RunConfig = DEFAULT) -> SupportAnalysis:
    return _support_atoms(tuple(f.atoms), f.manifold, cfg)


def support(f: Diffeo, cfg: RunConfig = DEFAULT) -> IntervalSet:
    """Open support ``M \\ Fix f``; identical for ``f`` and its inverse."""
    return analyze_support(f, cfg).support


def fixed_set_from_support(sup: IntervalSet, warnings=()) -> FixedSet:
    m = sup.manifold
    if sup.full:
        return FixedSet(m, (), (), tuple(warnings))
    if sup.is_empty():
        return FixedSet(m, (), ((0.0, 1.0),), tuple(warnings))
    comps = list(sup.intervals)
    pts, ivs = [], []
    if m is Manifold.INTERVAL:
        gaps = list(zip([0.0] + [b for _, b in comps], [a for a, _ in comps] + [1.0]))
    else:
        gaps = list(zip([b for _, b in comps], [a for a, _ in comps[1:]] + [comps[0][0] + 1.0]))
    for a, b in gaps:
        if b > a:
            ivs.append((a, b))
        else:
            pts.append(a if m is Manifold.INTERVAL or a < 1.0 else a - 1.0)
    return FixedSet(m, tuple(sorted(pts)), tuple(ivs), tuple(warnings))


def fixed_set(f: Diffeo, cfg: RunConfig = DEFAULT) -> FixedSet:
    """``Fix f`` as isolated points plus closed intervals.

    On the interval, 0 and 1 are always included.  Arcs on the circle are in
    lift coordinates and may end past 1.
    """
    a = analyze_support(f, cfg)
    return fixed_set_from_support(a.support, a.warnings)


def is_grounded(f: Diffeo, cfg: RunConfig = DEFAULT) -> bool:
    if f.manifold is Manifold.INTERVAL:
        return True
    return not support(f, cfg).full


# ---------------------------------------------------------------------------
# rotation number


@dataclass(frozen=True)
class RotationNumber:
    value: float
    rational: bool
    fraction: tuple | None = None
    grounded: bool = False
    converged: bool = True
    iterations: int = 0

    def to_json(self) -> dict:
        return {"value": self.value, "rational": self.rational,
                "fraction": list(self.fraction) if self.fraction else None,
                "grounded": self.grounded, "converged": self.converged,
                "iterations": self.iterations}


def _weights(n: int) -> np.ndarray:
    t = (np.arange(n) + 0.5) / n
    w = np.exp(-1.0 / (t * (1.0 - t)))
    return w / w.sum()


def _orbit_mean(atoms, tol_rot: float, max_exp: int = 17, min_exp: int = 6):
    """Weighted Birkhoff average of the lift displacement along the orbit of 0."""
    if all(isinstance(leaf, Rotation) for leaf, _ in atoms):
        return sum(s * leaf.c for leaf, s in atoms), True, 1
    x = np.array([0.0])
    disp: list[float] = []
    prev, n = None, 2 ** min_exp
    while True:
        while len(disp) < n:
            y = apply_atoms(atoms, x)
            disp.append(float(y[0] - x[0]))
            x = y - math.floor(y[0])
        est = float(np.dot(_weights(n), disp[:n]))
        if prev is not None and abs(est - prev) < tol_rot:
            return est, True, n
        if n >= 2 ** max_exp:
            return est, False, n
        prev, n = est, 2 * n


def _convergents(x: float, max_q: int):
    out = []
    for q in range(1, max_q + 1):
        fr = Fraction(x).limit_denominator(q)
        if not out or fr != out[-1]:
            out.append(fr)
    return out


COARSE_EXP = 10
COARSE_TOL = 1e-3


def rotation_number(f: Diffeo, cfg: RunConfig = DEFAULT) -> RotationNumber:
    """Rotation number in ``[0, 1)`` with a rational tag.

    Small denominators near a coarse orbit estimate are tried first: if
    ``f^q`` has a fixed point the value is exactly ``p/q``.  Otherwise the
    orbit average is refined until successive estimates agree to ``tol_rot``.
    """
    if f.manifold is not Manifold.CIRCLE:
        raise DomainError("rotation number is defined for circle maps only")
    if is_grounded(f, cfg):
        return RotationNumber(0.0, True, (0, 1), grounded=True)
    coarse, _, _ = _orbit_mean(f.atoms, cfg.tol.tol_rot, max_exp=COARSE_EXP, min_exp=COARSE_EXP)
    coarse -= math.floor(coarse)
    cands = sorted({Fraction(p, q) for q in range(2, cfg.period_cap + 1)
                    for p in (math.floor(coarse * q), math.ceil(coarse * q))
                    if 0 < p < q and abs(p / q - coarse) < COARSE_TOL},
                   key=lambda fr: fr.denominator)
    for fr in cands:
        if is_grounded(f.power(fr.denominator), cfg):
            return RotationNumber(float(fr), True, (fr.numerator, fr.denominator),
                                  iterations=2 ** COARSE_EXP)
    raw, converged, iters = _orbit_mean(f.atoms, cfg.tol.tol_rot)
    value = raw - math.floor(raw)
    if value >= 1.0:
        value = 0.0
    for fr in _convergents(value, cfg.period_cap):
        if fr.denominator == 1 or fr in cands:
            continue
        if abs(float(fr) - value) < 1e-6 and is_grounded(f.power(fr.denominator), cfg):
            return RotationNumber(float(fr), True, (fr.numerator, fr.denominator),
                                  converged=converged, iterations=iters)
    return RotationNumber(value, False, None, converged=converged, iterations=iters)


def periodic_points(f: Diffeo, period_cap: int, cfg: RunConfig = DEFAULT) -> list[dict]:
    """Points and intervals of ``Fix f^p`` for ``p <= period_cap``, tagged with least period."""
    if period_cap < 1:
        raise DomainError("period_cap must be >= 1")
    out: list[dict] = []
    seen_pts: list[float] = []
    seen_ivs: list[tuple] = []

    def known(x):
        return (any(min(abs(x - p - k) for k in (-1, 0, 1)) < 1e-9 for p in seen_pts)
                or any(a - 1e-9 <= x + k <= b + 1e-9 for a, b in seen_ivs for k in (-1, 0, 1)))

    for p in range(1, period_cap + 1):
        fs = fixed_set(f.power(p), cfg)
        for a, b in fs.intervals:
            if not any(abs(a - c) < 1e-9 and abs(b - d) < 1e-9 for c, d in seen_ivs):
                seen_ivs.append((a, b))
                out.append({"interval": [a, b], "period": p})
        for x in fs.points:
            if not known(x):
                seen_pts.append(x)
                out.append({"point": x, "period": p})
        if p == 1 and not fs.is_empty():
            break  # a grounded map has no other periodic points
    return out


# ---------------------------------------------------------------------------
# variation and displacement


@dataclass(frozen=True)
class VariationEstimate:
    value: float
    levels: int
    converged: bool
    history: tuple = field(default=(), compare=False)

    def to_json(self) -> dict:
        return {"value": self.value, "levels": self.levels, "converged": self.converged,
                "history": list(self.history)}


def derivative_variation(f: Diffeo, cfg: RunConfig = DEFAULT) -> VariationEstimate:
    """Total variation of ``f'`` over dyadic partitions of ``[0, 1]``.

    On the circle the partition closes up, ``f'(1) = f'(0)``.
    """
    history = []
    prev = None
    for level in range(cfg.var_min_level, cfg.var_max_level + 1):
        xs = np.linspace(0.0, 1.0, 2 ** level + 1)
        d = atoms_derivative(f.atoms, xs)
        v = float(np.sum(np.abs(np.diff(d))))
        history.append(v)
        if prev is not None and abs(v - prev) < cfg.tol.tol_var:
            return VariationEstimate(v, level, True, tuple(history))
        prev = v
    return VariationEstimate(prev, cfg.var_max_level, False, tuple(history))


@dataclass(frozen=True)
class Displacement:
    value: float
    status: str          # "identity", "nontrivial" or "indeterminate"
    argmax: float

    @property
    def indeterminate(self) -> bool:
        return self.status == "indeterminate"

    def to_json(self) -> dict:
        return {"value": self.value, "status": self.status, "argmax": self.argmax}


def classify(value: float, cfg: RunConfig = DEFAULT) -> str:
    if value < cfg.tol.tol_id:
        return "identity"
    if value > cfg.tol.tol_nz:
        return "nontrivial"
    return "indeterminate"


def sup_displacement(f: Diffeo, cfg: RunConfig = DEFAULT, window: tuple | None = None) -> Displacement:
    """``max_x dist(f(x), x)`` on a grid plus local refinement.

    ``window`` restricts the search to an interval (lift coordinates).
    """
    lo, hi = window if window is not None else (0.0, 1.0)
    n = max(MIN_WINDOW_GRID, int(math.ceil(cfg.grid * (hi - lo))))
    xs = np.linspace(lo, hi, n + 1)
    circle = f.manifold is Manifold.CIRCLE

    def dist(x):
        d = f.lift(x) - x
        return np.abs(d - np.round(d)) if circle else np.abs(d)

    ds = dist(xs)
    best_i = np.argsort(ds)[-3:]
    best, arg = float(ds.max()), float(xs[int(np.argmax(ds))])
    for i in best_i:
        a, b = xs[max(i - 1, 0)], xs[min(i + 1, n)]
        res = minimize_scalar(lambda x: -float(dist(np.array([x]))[0]), bounds=(a, b),
                              method="bounded", options={"xatol": 1e-12})
        if -res.fun > best:
            best, arg = float(-res.fun), float(res.x)
    return Displacement(best, classify(best, cfg), arg)
