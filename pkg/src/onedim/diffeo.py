"""Orientation-preserving diffeomorphisms of I = [0, 1] and S^1 = R/Z.

A :class:`Diffeo` is an immutable expression tree over a small catalog of
primitives.  Everything is evaluated on lifts: for the circle a map is
represented by an increasing ``F: R -> R`` with ``F(x + 1) = F(x) + 1``.
Compositions are never simplified into new primitives; evaluation walks a
flattened, freely reduced list of *atoms* (a primitive or its inverse), so
derivatives come from the chain rule rather than finite differences.

``Compose([f, g])`` is ``f ∘ g``: the last factor acts first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, InvariantViolation, NumericError
from .intervals import IntervalSet, Manifold

TOL_EVAL = 1e-12
_MAX_BISECT = 200


def _bisect(fn, y, lo, hi, tol=TOL_EVAL, dfn=None):
    """Solve ``fn(x) = y`` for increasing ``fn`` on brackets ``[lo, hi]`` (vectorized).

    After bisection a couple of Newton steps, clipped to the final bracket,
    polish the root below the bisection tolerance.
    """
    y = np.asarray(y, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), y.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), y.shape).copy()
    for _ in range(_MAX_BISECT):
        if not np.any(hi - lo > tol):
            break
        mid = 0.5 * (lo + hi)
        below = fn(mid) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    else:
        raise NumericError("inverse evaluation did not converge")
    x = 0.5 * (lo + hi)
    if dfn is not None:
        for _ in range(2):
            d = dfn(x)
            step = np.where(d > 0, (fn(x) - y) / np.where(d > 0, d, 1.0), 0.0)
            x = np.clip(x - step, lo, hi)
    return x


# ---------------------------------------------------------------------------
# primitives


@dataclass(frozen=True)
class Rotation:
    c: float

    def lift(self, x):
        return x + self.c

    def dlift(self, x):
        return np.ones_like(x)

    def inv(self, y):
        return y - self.c

    def support(self, m: Manifold) -> IntervalSet:
        r = self.c - math.floor(self.c)
        if min(r, 1.0 - r) == 0.0:
            return IntervalSet.empty(m)
        return IntervalSet.whole(m)

    def to_json(self):
        return {"kind": "rotation", "c": self.c}


@dataclass(frozen=True)
class SinePerturb:
    """``x -> x + eps * sin(2 pi k x)``."""

    k: int
    eps: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise DomainError("sine_perturb needs an integer k >= 1")
        if not abs(self.eps) * 2 * math.pi * self.k < 1:
            raise DomainError("sine_perturb needs |eps| * 2 pi k < 1")

    def lift(self, x):
        return x + self.eps * np.sin(2 * np.pi * self.k * x)

    def dlift(self, x):
        return 1.0 + 2 * np.pi * self.k * self.eps * np.cos(2 * np.pi * self.k * x)

    def inv(self, y):
        if self.eps == 0:
            return y
        e = abs(self.eps)
        return _bisect(self.lift, y, y - e, y + e, dfn=self.dlift)

    def support(self, m: Manifold) -> IntervalSet:
        if self.eps == 0:
            return IntervalSet.empty(m)
        n = 2 * self.k
        return IntervalSet(m, tuple((j / n, (j + 1) / n) for j in range(n)))

    def to_json(self):
        return {"kind": "sine_perturb", "k": self.k, "eps": self.eps}


@dataclass(frozen=True)
class BumpPush:
    """Push supported on ``(p, q)``: ``x + s (q - p) sin^2(pi t) / pi`` with ``t = (x - p)/(q - p)``.

    The derivative is ``1 + s sin(2 pi t)``, equal to 1 at both ends, so the
    map is C^1 and the identity outside ``(p, q)``.  ``|s| < 1``.
    On the circle ``(p, q)`` is an arc in lift coordinates.
    """

    p: float
    q: float
    strength: float

    def __post_init__(self):
        if not self.q > self.p:
            raise DomainError("bump_push support must have p < q")
        if self.q - self.p > 1.0:
            raise DomainError("bump_push support longer than the circle")
        if not abs(self.strength) < 1:
            raise DomainError("bump_push strength must satisfy |s| < 1")

    def _t(self, x):
        return (x - self.p - np.floor(x - self.p)) / (self.q - self.p)

    def lift(self, x):
        x = np.asarray(x, dtype=float)
        t = self._t(x)
        inside = t < 1.0
        disp = self.strength * (self.q - self.p) * np.sin(np.pi * t) ** 2 / np.pi
        return np.where(inside, x + disp, x)

    def dlift(self, x):
        t = self._t(np.asarray(x, dtype=float))
        return np.where(t < 1.0, 1.0 + self.strength * np.sin(2 * np.pi * t), 1.0)

    def inv(self, y):
        y = np.asarray(y, dtype=float)
        if self.strength == 0:
            return y
        t = self._t(y)
        inside = (t > 0.0) & (t < 1.0)
        if not np.any(inside):
            return y.copy()
        base = y - t * (self.q - self.p)            # lift of p near y
        span = self.q - self.p
        sol = _bisect(lambda s: self.lift(s), y[inside], base[inside], base[inside] + span, dfn=self.dlift)
        out = y.copy()
        out[inside] = sol
        return out

    def support(self, m: Manifold) -> IntervalSet:
        if self.strength == 0:
            return IntervalSet.empty(m)
        return IntervalSet(m, ((self.p, self.q),))

    def to_json(self):
        return {"kind": "bump_push", "support": [self.p, self.q], "strength": self.strength}


@dataclass(frozen=True)
class Spline:
    """Monotone cubic Hermite map through ``(knots[i], values[i])`` with slopes ``derivs[i]``.

    Knots run from 0 to 1.  On the interval the values run from 0 to 1; on the
    circle ``values[-1] = values[0] + 1`` and the end slopes agree, and the lift
    is ``floor(x) + S(frac(x))``.  Slopes violating the Fritsch-Carlson
    circle ``alpha^2 + beta^2 <= 9`` are scaled down per piece.
    """

    knots: tuple
    values: tuple
    derivs: tuple

    def __post_init__(self):
        for name in ("knots", "values", "derivs"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        t, v, d = self.knots, self.values, self.derivs
        if not (len(t) == len(v) == len(d) >= 2):
            raise DomainError("spline needs matching knots/values/derivs of length >= 2")
        if t[0] != 0.0 or t[-1] != 1.0:
            raise DomainError("spline knots must start at 0 and end at 1")
        if any(b <= a for a, b in zip(t, t[1:])) or any(b <= a for a, b in zip(v, v[1:])):
            raise DomainError("spline knots and values must be strictly increasing")
        if any(m <= 0 for m in d):
            raise DomainError("spline derivatives must be positive")

    @cached_property
    def slopes(self) -> np.ndarray:
        t, v = np.array(self.knots), np.array(self.values)
        m = np.array(self.derivs)
        sec = np.diff(v) / np.diff(t)
        for i, s in enumerate(sec):
            a, b = m[i] / s, m[i + 1] / s
            r = a * a + b * b
            if r > 9.0:
                tau = 3.0 / math.sqrt(r)
                m[i], m[i + 1] = tau * a * s, tau * b * s
        return m

    @property
    def clamped(self) -> bool:
        return bool(np.any(self.slopes != np.array(self.derivs)))

    @cached_property
    def _coeffs(self) -> np.ndarray:
        """Per-piece cubic coefficients in the local variable ``s in [0, 1]``."""
        t, v, m = np.array(self.knots), np.array(self.values), self.slopes
        h = np.diff(t)
        v0, v1, m0, m1 = v[:-1], v[1:], m[:-1] * h, m[1:] * h
        c = np.stack([v0, m0, -3 * v0 - 2 * m0 + 3 * v1 - m1, 2 * v0 + m0 - 2 * v1 + m1], axis=1)
        return c

    @cached_property
    def _identity_piece(self) -> np.ndarray:
        t, v, m = np.array(self.knots), np.array(self.values), self.slopes
        return ((np.abs(v[:-1] - t[:-1]) <= 1e-15) & (np.abs(v[1:] - t[1:]) <= 1e-15)
                & (np.abs(m[:-1] - 1) <= 1e-15) & (np.abs(m[1:] - 1) <= 1e-15))

    @property
    def periodic(self) -> bool:
        return abs(self.values[-1] - self.values[0] - 1.0) < 1e-14

    def _piece(self, u):
        t = np.array(self.knots)
        i = np.clip(np.searchsorted(t, u, side="right") - 1, 0, len(t) - 2)
        s = (u - t[i]) / (t[i + 1] - t[i])
        return i, s

    def _eval01(self, u):
        i, s = self._piece(u)
        c = self._coeffs[i]
        val = c[..., 0] + s * (c[..., 1] + s * (c[..., 2] + s * c[..., 3]))
        return np.where(self._identity_piece[i], u, val)

    def _deriv01(self, u):
        i, s = self._piece(u)
        c = self._coeffs[i]
        h = np.diff(np.array(self.knots))[i]
        d = (c[..., 1] + s * (2 * c[..., 2] + 3 * s * c[..., 3])) / h
        return np.where(self._identity_piece[i], 1.0, d)

    def lift(self, x):
        x = np.asarray(x, dtype=float)
        if self.periodic:
            n = np.floor(x)
            u = x - n
            return n + self._eval01(u)
        inside = (x >= 0.0) & (x <= 1.0)
        return np.where(inside, self._eval01(np.clip(x, 0.0, 1.0)), x)

    def dlift(self, x):
        x = np.asarray(x, dtype=float)
        if self.periodic:
            return self._deriv01(x - np.floor(x))
        inside = (x >= 0.0) & (x <= 1.0)
        return np.where(inside, self._deriv01(np.clip(x, 0.0, 1.0)), 1.0)

    def inv(self, y):
        y = np.asarray(y, dtype=float)
        v = np.array(self.values)
        if self.periodic:
            n = np.floor(y - v[0])
            w = y - n
        else:
            n = np.zeros_like(y)
            w = np.clip(y, 0.0, 1.0)
        j = np.clip(np.searchsorted(v, w, side="right") - 1, 0, len(v) - 2)
        t = np.array(self.knots)
        x = t[j] + (t[j + 1] - t[j]) * _cubic_solve(self._coeffs[j], w)
        x = np.where(self._identity_piece[j], w, x)
        if not self.periodic:
            x = np.where((y >= 0.0) & (y <= 1.0), x, y)
        return x + n

    def fixed_points(self):
        """Exact fixed structure from the cubic pieces.

        Returns ``(points, intervals)`` in ``[0, 1]``: roots of ``S(x) - x - k``
        (``k`` the integer shift) and whole pieces on which the map is a
        translation by ``k``.
        """
        t = np.array(self.knots)
        c = self._coeffs
        pts, ivs = [], []
        if self.periodic:
            probe = np.linspace(0, 1, 4097)
            d = self._eval01(probe) - probe
            ks = range(math.ceil(d.min() - 1e-12), math.floor(d.max() + 1e-12) + 1)
        else:
            ks = (0,)
        for k in ks:
            for i in range(len(t) - 1):
                h = t[i + 1] - t[i]
                poly = c[i].copy()
                poly[0] -= t[i] + k
                poly[1] -= h
                if self._identity_piece[i] and k == 0 or np.all(np.abs(poly) <= 1e-14):
                    ivs.append((t[i], t[i + 1]))
                    continue
                for r in _cubic_roots01(poly):
                    pts.append(t[i] + h * r)
        return _merge_fixed(pts, ivs)

    def support(self, m: Manifold) -> IntervalSet:
        pts, ivs = self.fixed_points()
        return support_from_fixed(pts, ivs, m)

    def to_json(self):
        return {"kind": "spline", "knots": list(self.knots), "values": list(self.values),
                "derivs": list(self.derivs)}


def _cubic_solve(c, w, iters=100):
    """Solve ``c0 + c1 s + c2 s^2 + c3 s^3 = w`` on ``[0, 1]`` for increasing cubics.

    Newton steps safeguarded by a shrinking bracket; rows are independent.
    """
    lo, hi = np.zeros_like(w), np.ones_like(w)
    s = np.clip((w - c[..., 0]) / np.maximum(c[..., 0] + c[..., 1] + c[..., 2] + c[..., 3] - c[..., 0], 1e-300), 0, 1)
    for _ in range(iters):
        p = c[..., 0] + s * (c[..., 1] + s * (c[..., 2] + s * c[..., 3])) - w
        lo = np.where(p < 0, s, lo)
        hi = np.where(p > 0, s, hi)
        dp = c[..., 1] + s * (2 * c[..., 2] + 3 * s * c[..., 3])
        nxt = s - p / np.where(dp > 0, dp, 1.0)
        bad = (dp <= 0) | ~(nxt > lo) | ~(nxt < hi)
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        done = (p == 0) | (np.abs(nxt - s) <= 1e-16) | (hi - lo <= 1e-16)
        s = np.where(p == 0, s, nxt)
        if np.all(done):
            break
    return s


def _cubic_roots01(poly) -> list[float]:
    """Real roots in ``[0, 1]`` of ``poly[0] + poly[1] s + poly[2] s^2 + poly[3] s^3``."""
    p = np.polynomial.Polynomial(poly)
    scale = max(np.max(np.abs(poly)), 1e-300)
    p = np.polynomial.Polynomial(np.where(np.abs(poly) < 1e-15 * scale, 0.0, poly))
    if p.degree() < 1 and p.coef[0] != 0:
        return []
    out = [e for e in (0.0, 1.0) if abs(p(e)) <= 1e-14 * max(1.0, scale)]
    dp = p.deriv()
    for r in sorted(p.roots(), key=lambda z: z.real):
        if abs(r.imag) > 1e-7:
            continue
        s = r.real
        if not -1e-9 <= s <= 1 + 1e-9:
            continue
        for _ in range(3):
            d = dp(s)
            if d == 0:
                break
            cand = s - p(s) / d
            if not abs(p(cand)) < abs(p(s)) or abs(cand - s) > 1e-6:
                break
            s = cand
        s = min(max(s, 0.0), 1.0)
        near = [j for j, o in enumerate(out) if abs(s - o) < 1e-6]
        if near:
            # a double root comes back as two nearby reals; knot ends are exact
            j = near[0]
            if out[j] not in (0.0, 1.0) and abs(p(s)) < abs(p(out[j])):
                out[j] = s
            continue
        out.append(s)
    return sorted(out)


def _merge_fixed(pts, ivs, tol=1e-12):
    ivs = sorted(ivs)
    merged = []
    for a, b in ivs:
        if merged and a <= merged[-1][1] + tol:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    out_pts = []
    for x in sorted(pts):
        if any(a - tol <= x <= b + tol for a, b in merged):
            continue
        if out_pts and abs(x - out_pts[-1]) <= tol:
            continue
        out_pts.append(x)
    return out_pts, merged


def support_from_fixed(points, intervals, m: Manifold, lo: float = 0.0) -> IntervalSet:
    """Open complement of a closed fixed set given by points and closed intervals.

    On the interval the endpoints 0 and 1 are always fixed.  On the circle the
    input is read modulo 1.
    """
    items = [(p, p) for p in points] + [tuple(iv) for iv in intervals]
    if m is Manifold.INTERVAL:
        items += [(0.0, 0.0), (1.0, 1.0)]
        items.sort()
        comps, cur = [], items[0][1]
        for a, b in items[1:]:
            if a > cur:
                comps.append((cur, a))
            cur = max(cur, b)
        return IntervalSet(m, tuple(comps))
    if not items:
        return IntervalSet(m, full=True)
    norm = []
    for a, b in items:
        if b - a >= 1.0:
            return IntervalSet.empty(m)
        s = math.floor(a - lo)
        norm.append((a - s, b - s))
    norm.sort()
    merged = []
    for a, b in norm:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    if merged[-1][1] - 1.0 >= merged[0][0]:
        if len(merged) == 1:
            return IntervalSet.empty(m)
        first = merged.pop(0)
        merged[-1] = (merged[-1][0], max(merged[-1][1], first[1] + 1.0))
    comps = []
    for (a, b), (c, _) in zip(merged, merged[1:] + [(merged[0][0] + 1.0, None)]):
        if c > b:
            comps.append((b, c))
    return IntervalSet(m, tuple(comps))


Leaf = Union[Rotation, SinePerturb, BumpPush, Spline]


@dataclass(frozen=True)
class Compose:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


@dataclass(frozen=True)
class Inverse:
    of: object


Expr = Union[Leaf, Compose, Inverse]
Atom = tuple  # (leaf, +1 | -1)

LEAVES = (Rotation, SinePerturb, BumpPush, Spline)


def flatten(expr) -> list[Atom]:
    """Freely reduced list of ``(leaf, sign)``; the first atom acts last."""
    out: list[Atom] = []

    def push(atom):
        if out and out[-1][0] == atom[0] and out[-1][1] == -atom[1]:
            out.pop()
        else:
            out.append(atom)

    def walk(e, sign):
        if isinstance(e, LEAVES):
            push((e, sign))
        elif isinstance(e, Inverse):
            walk(e.of, -sign)
        elif isinstance(e, Compose):
            parts = e.parts if sign > 0 else reversed(e.parts)
            for p in parts:
                walk(p, sign)
        elif isinstance(e, Diffeo):
            walk(e.expr, sign)
        else:
            raise DomainError(f"not a diffeomorphism expression: {e!r}")

    walk(expr, 1)
    return out


def invert_atoms(atoms: Sequence[Atom]) -> list[Atom]:
    return [(leaf, -s) for leaf, s in reversed(atoms)]


def atoms_expr(atoms: Sequence[Atom]):
    parts = tuple(leaf if s > 0 else Inverse(leaf) for leaf, s in atoms)
    return parts[0] if len(parts) == 1 else Compose(parts)


def apply_atoms(atoms: Sequence[Atom], x):
    x = np.asarray(x, dtype=float)
    for leaf, s in reversed(atoms):
        x = leaf.lift(x) if s > 0 else leaf.inv(x)
    return x


def atoms_derivative(atoms: Sequence[Atom], x):
    x = np.asarray(x, dtype=float)
    d = np.ones_like(x)
    for leaf, s in reversed(atoms):
        if s > 0:
            d = d * leaf.dlift(x)
            x = leaf.lift(x)
        else:
            x = leaf.inv(x)
            d = d / leaf.dlift(x)
    return d


@dataclass(frozen=True, eq=True)
class Diffeo:
    manifold: Manifold
    expr: object
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "manifold", Manifold.parse(self.manifold))
        if isinstance(self.expr, Diffeo):
            if self.expr.manifold is not self.manifold:
                raise DomainError("manifold mismatch")
            object.__setattr__(self, "expr", self.expr.expr)
        if self.check:
            self._validate()

    def _validate(self):
        m = self.manifold
        for leaf, _ in self.atoms:
            if m is Manifold.INTERVAL:
                if isinstance(leaf, Rotation):
                    raise DomainError("rotations only act on the circle")
                if isinstance(leaf, BumpPush) and not (0.0 <= leaf.p and leaf.q <= 1.0):
                    raise DomainError("bump support must lie in [0, 1]")
                if isinstance(leaf, Spline) and (leaf.values[0] != 0.0 or leaf.values[-1] != 1.0):
                    raise DomainError("interval splines must map 0 to 0 and 1 to 1")
            elif isinstance(leaf, Spline):
                if not leaf.periodic or abs(leaf.derivs[0] - leaf.derivs[-1]) > 1e-12:
                    raise DomainError("circle splines need values[-1] = values[0] + 1 and equal end slopes")
            if isinstance(leaf, BumpPush) and m is Manifold.CIRCLE and not 0.0 <= leaf.p < 1.0:
                raise DomainError("circle bump support must start in [0, 1)")
        xs = np.linspace(0.0, 1.0, 1025)
        for leaf, _ in self.atoms:
            probe = xs
            if isinstance(leaf, Spline):
                probe = np.union1d(xs, leaf.knots)
            d = leaf.dlift(probe)
            if np.any(~(d > 0)):
                raise InvariantViolation(f"nonpositive derivative in {type(leaf).__name__}")

    # construction helpers -------------------------------------------------
    @classmethod
    def identity(cls, manifold) -> "Diffeo":
        return cls(manifold, Compose(()))

    @classmethod
    def from_atoms(cls, manifold, atoms: Sequence[Atom]) -> "Diffeo":
        return cls(manifold, atoms_expr(atoms) if atoms else Compose(()), check=False)

    def __matmul__(self, other: "Diffeo") -> "Diffeo":
        return compose(self, other)

    def inverse(self) -> "Diffeo":
        return Diffeo(self.manifold, Inverse(self.expr), check=False)

    def power(self, n: int) -> "Diffeo":
        base = self.expr if n >= 0 else Inverse(self.expr)
        return Diffeo(self.manifold, Compose((base,) * abs(n)), check=False)

    # evaluation -----------------------------------------------------------
    @cached_property
    def atoms(self) -> list[Atom]:
        return flatten(self.expr)

    def lift(self, x):
        """Lift evaluation (for the circle, values are not reduced mod 1)."""
        return apply_atoms(self.atoms, x)

    def __call__(self, x):
        y = self.lift(x)
        if self.manifold is Manifold.CIRCLE:
            y = y - np.floor(y)
        return y

    def derivative(self, x):
        d = atoms_derivative(self.atoms, x)
        if np.any(~(np.asarray(d) > 0)):
            raise InvariantViolation("nonpositive derivative encountered")
        return d

    def to_json(self) -> dict:
        out = expr_to_json(self.expr)
        out["manifold"] = self.manifold.value
        return out


def compose(*maps: Diffeo) -> Diffeo:
    """``compose(f, g)`` is ``f ∘ g``."""
    if not maps:
        raise DomainError("compose needs at least one map")
    m = maps[0].manifold
    if any(f.manifold is not m for f in maps):
        raise DomainError("manifold mismatch in composition")
    return Diffeo(m, Compose(tuple(f.expr for f in maps)), check=False)


def evaluate(f: Diffeo, x):
    """Point of the manifold ``f(x)``; scalars in, scalars out."""
    y = f(np.asarray(x, dtype=float))
    return float(y) if np.ndim(y) == 0 else y


def derivative(f: Diffeo, x):
    d = f.derivative(np.asarray(x, dtype=float))
    return float(d) if np.ndim(d) == 0 else d


def commutator(f: Diffeo, g: Diffeo) -> Diffeo:
    """``[f, g] = f^-1 g^-1 f g``."""
    if f.manifold is not g.manifold:
        raise DomainError("manifold mismatch in commutator")
    return Diffeo(f.manifold, Compose((Inverse(f.expr), Inverse(g.expr), f.expr, g.expr)), check=False)


def conjugate(g: Diffeo, f: Diffeo) -> Diffeo:
    """``g f g^-1``."""
    if f.manifold is not g.manifold:
        raise DomainError("manifold mismatch in conjugation")
    return Diffeo(f.manifold, Compose((g.expr, f.expr, Inverse(g.expr))), check=False)


# ---------------------------------------------------------------------------
# JSON specs


def expr_to_json(e) -> dict:
    if isinstance(e, LEAVES):
        return e.to_json()
    if isinstance(e, Inverse):
        return {"kind": "inverse", "of": expr_to_json(e.of)}
    if isinstance(e, Compose):
        return {"kind": "compose", "of": [expr_to_json(p) for p in e.parts]}
    raise DomainError(f"cannot serialize {e!r}")


def expr_from_json(spec) -> Expr:
    try:
        kind = spec["kind"]
        if kind == "rotation":
            return Rotation(float(spec["c"]))
        if kind == "sine_perturb":
            return SinePerturb(int(spec["k"]), float(spec["eps"]))
        if kind == "bump_push":
            p, q = spec["support"]
            return BumpPush(float(p), float(q), float(spec["strength"]))
        if kind == "spline":
            return Spline(tuple(spec["knots"]), tuple(spec["values"]), tuple(spec["derivs"]))
        if kind == "compose":
            return Compose(tuple(expr_from_json(s) for s in spec["of"]))
        if kind == "inverse":
            return Inverse(expr_from_json(spec["of"]))
        if kind == "identity":
            return Compose(())
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed diffeo spec: {exc}") from exc
    raise DomainError(f"unknown diffeo kind {spec.get('kind')!r}")


def diffeo_from_json(spec, manifold=None) -> Diffeo:
    m = spec.get("manifold", manifold) if isinstance(spec, dict) else manifold
    if m is None:
        raise DomainError("diffeo spec needs a manifold")
    return Diffeo(Manifold.parse(m), expr_from_json(spec))
