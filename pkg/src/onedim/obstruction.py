"""Interval combinatorics of a candidate action of A(P4) and the derivative blow-up test.

Roles follow the path ``b - d - a - c``: the pairs ``bd``, ``da`` and ``ac``
commute, the others do not.  Every routine accepts a ``roles`` mapping from
these four role names to the generator labels of an assignment.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .config import DEFAULT, RunConfig
from .diffeo import Compose, Diffeo, Inverse, commutator, compose
from .dynamics import fixed_set, is_grounded, rotation_number, sup_displacement, support
from .errors import DomainError, InvariantViolation, PreconditionError
from .graphs import p4_labeling
from .intervals import (IntervalSet, Manifold, equal, intersection, lift_near, meets, overlap,
                        subset, union_open)
from .raag import ActionAssignment, check_action

ROLES = ("a", "b", "c", "d")


def _at(f: Diffeo, x: float) -> float:
    return float(f.lift(np.array([float(x)]))[0])


def _image(f: Diffeo, iv) -> tuple:
    a = _at(f, iv[0])
    b = _at(f, iv[1])
    if f.manifold is Manifold.CIRCLE:
        b = a + min(max(b - a, 0.0), 1.0)
    return (a, b)


def _iv(iv) -> list:
    return [float(iv[0]), float(iv[1])]


def _circ_dist(x: float, y: float, m: Manifold) -> float:
    d = x - y
    return abs(d - round(d)) if m is Manifold.CIRCLE else abs(d)


# ---------------------------------------------------------------------------
# commutator region


@dataclass(frozen=True)
class CommutatorRegion:
    region: IntervalSet
    reasons: tuple              # one tuple of tags per component of ``region``
    indeterminate: tuple = ()   # components included only because a test was inconclusive
    containment_ok: bool = True
    violations: tuple = ()

    def to_json(self) -> dict:
        return {"region": self.region.to_json(),
                "components": [{"interval": _iv(c), "reasons": list(r)}
                               for c, r in zip(self.region.components(), self.reasons)],
                "indeterminate": [_iv(c) for c in self.indeterminate],
                "containment_ok": self.containment_ok,
                "violations": [float(x) for x in self.violations]}


def _moving_points(h: Diffeo, n: int, tol: float):
    xs = (np.arange(n) + 0.5) / n
    d = h.lift(xs) - xs
    if h.manifold is Manifold.CIRCLE:
        d = d - np.round(d)
    return xs[np.abs(d) > tol]


def commutator_region(f: Diffeo, g: Diffeo, cfg: RunConfig = DEFAULT) -> CommutatorRegion:
    """The union of support components of ``f`` and ``g`` on which they can fail to commute.

    A pair of components that overlap without being equal contributes both
    components; a shared component contributes itself when the commutator
    moves points there.  Inconclusive tests include the component.
    """
    if f.manifold is not g.manifold:
        raise DomainError("manifold mismatch")
    m = f.manifold
    tol = cfg.tol.tol_geom
    sf, sg = support(f, cfg), support(g, cfg)
    comm = commutator(f, g)
    picked: list[tuple] = []
    unsure: list[tuple] = []
    for I in sf.components():
        for K in sg.components():
            if sf.full or sg.full:
                same = sf.full and sg.full
                hit = True
            else:
                same = equal(I, K, m, tol)
                hit = meets(I, K, m, tol)
            if same:
                d = sup_displacement(comm, cfg, window=I)
                if d.status == "identity":
                    continue
                picked.append((I, "shared-nonabelian"))
                if d.status == "indeterminate":
                    unsure.append(I)
            elif hit is not False:
                picked += [(I, "overlap-unequal"), (K, "overlap-unequal")]
                if hit is None:
                    unsure += [I, K]
    if any(iv == (0.0, 1.0) and (sf.full or sg.full) for iv, _ in picked) and m is Manifold.CIRCLE:
        region = IntervalSet(m, full=True)
    else:
        region = union_open([iv for iv, _ in picked], m)
    reasons = []
    for comp in region.components():
        tags = sorted({t for iv, t in picked if region.full or subset(iv, comp, m, tol)})
        reasons.append(tuple(tags))
    moving = _moving_points(comm, cfg.grid, cfg.tol.tol_id)
    bad = [x for x in moving if not region.contains(x, tol)]
    return CommutatorRegion(region, tuple(reasons), tuple(dict.fromkeys(unsure)),
                            not bad, tuple(bad[:20]))


def disjointness_check(f: Diffeo, g: Diffeo, cfg: RunConfig = DEFAULT) -> dict:
    """Commuting grounded maps have support components that are equal or disjoint."""
    if not (is_grounded(f, cfg) and is_grounded(g, cfg)):
        raise PreconditionError("both maps must be grounded")
    d = sup_displacement(commutator(f, g), cfg)
    if d.status != "identity":
        raise PreconditionError("maps do not commute", displacement=d.value)
    m, tol = f.manifold, cfg.tol.tol_geom
    for I in support(f, cfg).components():
        for K in support(g, cfg).components():
            if equal(I, K, m, tol):
                continue
            if overlap(I, K, m) > tol:
                return {"pass": False, "pair": [_iv(I), _iv(K)]}
    return {"pass": True, "pair": None}


# ---------------------------------------------------------------------------
# chains


def is_chain(ivs, m: Manifold, tol: float) -> bool:
    """``I_i`` meets ``I_j`` exactly when ``|i - j| = 1`` (decided with tolerance)."""
    for i in range(4):
        for j in range(i + 1, 4):
            hit = meets(ivs[i], ivs[j], m, tol)
            if hit is None or hit != (j - i == 1):
                return False
    return True


@dataclass(frozen=True)
class ChainWitness:
    intervals: tuple            # (I_a, I_b, I_c, I_d)
    roles: tuple                # generator labels for a, b, c, d
    x: float | None = None
    bx: float | None = None
    cbx: float | None = None

    def to_json(self) -> dict:
        return {"intervals": {r: _iv(iv) for r, iv in zip(ROLES, self.intervals)},
                "labels": dict(zip(ROLES, self.roles)),
                "trajectory": None if self.x is None else [self.x, self.bx, self.cbx]}


def _resolve_roles(a: ActionAssignment, roles) -> dict:
    if roles is None:
        roles = p4_labeling(a.presentation.graph)
        if roles is None:
            raise DomainError("the presentation graph is not a path on four vertices")
    missing = set(ROLES) - set(roles)
    if missing:
        raise DomainError(f"roles missing {sorted(missing)}")
    return dict(roles)


def _sample(sup: IntervalSet, n: int) -> np.ndarray:
    comps = sup.components()
    total = sum(b - a for a, b in comps) or 1.0
    pts = []
    for lo, hi in comps:
        k = max(16, int(math.ceil(n * (hi - lo) / total)))
        pts.append(lo + (hi - lo) * (np.arange(k) + 0.5) / k)
    return np.concatenate(pts) if pts else np.zeros(0)


def detect_chains(a: ActionAssignment, roles=None, cfg: RunConfig = DEFAULT) -> list[ChainWitness]:
    """Chains ``(I_a, I_b, I_c, I_d)`` reconstructed from sampled orbits ``x, bx, cbx``."""
    r = _resolve_roles(a, roles)
    fa, fb, fc, fd = (a[r[k]] for k in ROLES)
    m, tol = a.manifold, cfg.tol.tol_geom
    sa, sb, sc, sd = (support(f, cfg) for f in (fa, fb, fc, fd))
    xs = _sample(sa, cfg.samples)
    if xs.size == 0:
        return []
    bx = fb.lift(xs)
    cbx = fc.lift(bx)
    ia, ib = sa.locate(xs), sb.locate(xs)
    ic, ic2, id_ = sc.locate(bx), sc.locate(cbx), sd.locate(cbx)
    ca, cb_, cc, cd = (s.components() for s in (sa, sb, sc, sd))
    out, seen = [], set()
    for k in np.flatnonzero((id_ >= 0) & (ib >= 0) & (ic >= 0) & (ic == ic2)):
        key = (int(ia[k]), int(ib[k]), int(ic[k]), int(id_[k]))
        if key in seen:
            continue
        seen.add(key)
        quad = (ca[key[0]], cb_[key[1]], cc[key[2]], cd[key[3]])
        if equal(quad[0], quad[3], m, tol) or not is_chain(quad, m, tol):
            continue
        out.append(ChainWitness(quad, tuple(r[k_] for k_ in ROLES),
                                float(xs[k]), float(bx[k]), float(cbx[k])))
    return out


def _inside(iv, ys, m: Manifold):
    ys = np.asarray(ys, dtype=float)
    if m is Manifold.CIRCLE:
        ys = iv[0] + (ys - iv[0]) % 1.0
    return (ys > iv[0]) & (ys < iv[1])


def _chain_for_pair(fb, fc, sb, sc, Ia, Id, m, tol, n=257) -> ChainWitness | None:
    xs = Ia[0] + (Ia[1] - Ia[0]) * (np.arange(n) + 0.5) / n
    bx = fb.lift(xs)
    cbx = fc.lift(bx)
    ib, ic, ic2 = sb.locate(xs), sc.locate(bx), sc.locate(cbx)
    hits = np.flatnonzero(_inside(Id, cbx, m) & (ib >= 0) & (ic >= 0) & (ic == ic2))
    for k in hits:
        quad = (Ia, sb.components()[ib[k]], sc.components()[ic[k]], Id)
        if is_chain(quad, m, tol):
            return ChainWitness(quad, (), float(xs[k]), float(bx[k]), float(cbx[k]))
    return None


# ---------------------------------------------------------------------------
# proposition intervals


@dataclass(frozen=True)
class PropositionPair:
    I_a: tuple
    I_d: tuple
    chain: ChainWitness | None
    consistent: bool            # the pair falls under one of the two admissible patterns

    def to_json(self) -> dict:
        return {"I_a": _iv(self.I_a), "I_d": _iv(self.I_d),
                "chain": None if self.chain is None else self.chain.to_json(),
                "consistent": self.consistent}


@dataclass(frozen=True)
class PropositionSearch:
    pairs: tuple
    exhausted: bool
    examined: int

    def to_json(self) -> dict:
        return {"pairs": [p.to_json() for p in self.pairs], "exhausted": self.exhausted,
                "examined": self.examined}


def find_proposition_intervals(a: ActionAssignment, count: int, roles=None,
                               cfg: RunConfig = DEFAULT) -> PropositionSearch:
    """Distinct pairs ``I_a != I_d`` of support components with ``cb(I_a)`` meeting ``I_d``.

    At most ``cfg.budget`` components of ``supp a`` are examined.  Each pair is
    cross-checked: disjoint ``I_a, I_d`` must come with a chain.
    """
    r = _resolve_roles(a, roles)
    fa, fb, fc, fd = (a[r[k]] for k in ROLES)
    m, tol = a.manifold, cfg.tol.tol_geom
    sa, sb, sc, sd = (support(f, cfg) for f in (fa, fb, fc, fd))
    cb = compose(fc, fb)
    pairs, examined = [], 0
    labels = tuple(r[k] for k in ROLES)
    for Ia in sa.components():
        if examined >= cfg.budget or len(pairs) >= count:
            break
        examined += 1
        img = _image(cb, Ia)
        for Id in sd.components():
            if equal(Ia, Id, m, tol) or meets(img, Id, m, tol) is not True:
                continue
            chain = _chain_for_pair(fb, fc, sb, sc, Ia, Id, m, tol)
            if chain is not None:
                chain = ChainWitness(chain.intervals, labels, chain.x, chain.bx, chain.cbx)
            disjoint = meets(Ia, Id, m, tol) is False
            pairs.append(PropositionPair(Ia, Id, chain, disjoint and chain is not None))
            if len(pairs) >= count:
                break
    return PropositionSearch(tuple(pairs), len(pairs) < count, examined)


# ---------------------------------------------------------------------------
# envelopes


@dataclass(frozen=True)
class Envelope:
    Y: tuple
    Z: tuple
    in_Y0: bool
    full: bool = False

    def to_json(self) -> dict:
        return {"Y": _iv(self.Y), "Z": _iv(self.Z), "in_Y0": self.in_Y0, "full": self.full}


@dataclass(frozen=True)
class EnvelopeReport:
    envelopes: tuple
    j_cd: CommutatorRegion
    disjoint: bool
    findings: tuple = ()

    def __iter__(self):
        return iter(self.envelopes)

    def __len__(self):
        return len(self.envelopes)

    def to_json(self) -> dict:
        return {"envelopes": [e.to_json() for e in self.envelopes], "J_cd": self.j_cd.to_json(),
                "disjoint": self.disjoint, "findings": list(self.findings)}


def _lift_towards(iv, ref_iv):
    """Integer translate of ``iv`` that best overlaps ``ref_iv``."""
    mid = 0.5 * (ref_iv[0] + ref_iv[1])
    k = round(0.5 * (iv[0] + iv[1]) - mid)
    return (iv[0] - k, iv[1] - k)


def compute_envelopes(a: ActionAssignment, roles=None, cfg: RunConfig = DEFAULT) -> EnvelopeReport:
    """Components ``Y`` of ``M`` minus the closure of ``J(c, d)`` and their envelopes ``Z(Y)``.

    ``Z(Y)`` is the smallest open interval containing ``Y`` and every image
    ``cb(I_a)`` of a support component ``I_a ⊆ Y`` of ``a``.
    """
    r = _resolve_roles(a, roles)
    fa, fb, fc, fd = (a[r[k]] for k in ROLES)
    m, tol = a.manifold, cfg.tol.tol_geom
    jcd = commutator_region(fc, fd, cfg)
    ys = jcd.region.closure_complement()
    sa, sd = support(fa, cfg), support(fd, cfg)
    cb = compose(fc, fb)
    findings = []
    if ys.full:
        return EnvelopeReport((Envelope((0.0, 1.0), (0.0, 1.0), False, full=True),), jcd, True)
    Ys = ys.components()
    owned: dict[int, list] = {i: [] for i in range(len(Ys))}
    for Ia in sa.components():
        home = [i for i, Y in enumerate(Ys) if subset(Ia, Y, m, tol)]
        if not home:
            findings.append(f"support component {_iv(Ia)} of a meets the closure of J(c,d)")
            continue
        owned[home[0]].append(Ia)
    envs = []
    for i, Y in enumerate(Ys):
        lo, hi = Y
        y0 = False
        for Ia in owned[i]:
            img = _image(cb, Ia)
            if m is Manifold.CIRCLE:
                img = _lift_towards(img, Y)
            lo, hi = min(lo, img[0]), max(hi, img[1])
            for Id in sd.components():
                for piece in intersection(img if m is Manifold.INTERVAL else _norm(img), Id, m):
                    if not subset(piece, Y, m, tol):
                        y0 = True
        if m is Manifold.CIRCLE and hi - lo >= 1.0:
            findings.append(f"envelope of Y={_iv(Y)} wraps the whole circle")
            hi = lo + 1.0
        Z = (lo, hi)
        for j, Y2 in enumerate(Ys):
            if j != i and overlap(Z, Y2, m) > tol:
                findings.append(f"Z(Y) for Y={_iv(Y)} meets the other component {_iv(Y2)}")
        envs.append(Envelope(Y, Z, y0))
    disjoint = True
    for i in range(len(envs)):
        for j in range(i + 1, len(envs)):
            if overlap(envs[i].Z, envs[j].Z, m) > tol:
                disjoint = False
                findings.append(f"Z({_iv(envs[i].Y)}) and Z({_iv(envs[j].Y)}) overlap")
    return EnvelopeReport(tuple(envs), jcd, disjoint, tuple(findings))


def _norm(iv):
    k = math.floor(iv[0])
    return (iv[0] - k, iv[1] - k)


def envelope_invariance(a: ActionAssignment, report: EnvelopeReport | None = None, roles=None,
                        cfg: RunConfig = DEFAULT) -> dict:
    """For ``g = cbab^-1c^-1``: ``g`` preserves each ``Z(Y)`` and ``supp g`` lies in their union."""
    r = _resolve_roles(a, roles)
    fa, fb, fc = (a[r[k]] for k in ("a", "b", "c"))
    report = report or compute_envelopes(a, roles, cfg)
    m, tol = a.manifold, cfg.tol.tol_geom
    cb = compose(fc, fb)
    g = Diffeo(m, Compose((cb.expr, fa.expr, Inverse(cb.expr))), check=False)
    preserved = []
    for e in report.envelopes:
        if e.full:
            preserved.append(True)
            continue
        ok = all(_circ_dist(_at(g, x), x, m) <= tol for x in e.Z)
        preserved.append(ok)
    sg = support(g, cfg)
    outside = [c for c in sg.components()
               if not any(e.full or subset(c, e.Z, m, tol) for e in report.envelopes)]
    return {"preserved": preserved, "all_preserved": all(preserved),
            "support_contained": not outside, "outside": [_iv(c) for c in outside]}


# ---------------------------------------------------------------------------
# two jumps


@dataclass(frozen=True)
class TwoJumpsWitness:
    y: float
    I: tuple
    A: tuple
    B: tuple
    s: float
    t: float
    u: float
    v: float
    quotient_g: float
    quotient_f: float
    g_prime_u: float
    f_prime_v: float

    @property
    def product(self) -> float:
        return self.quotient_g * self.quotient_f

    @property
    def derivative_product(self) -> float:
        return self.g_prime_u * self.f_prime_v

    @property
    def bound(self) -> float:
        la, lb = self.A[1] - self.A[0], self.B[1] - self.B[0]
        return (1 + lb / la) * (1 + la / lb)

    @property
    def length(self) -> float:
        return self.I[1] - self.I[0]

    def to_json(self) -> dict:
        return {"y": self.y, "I": _iv(self.I), "A": _iv(self.A), "B": _iv(self.B),
                "s": self.s, "t": self.t, "u": self.u, "v": self.v,
                "quotient_g": self.quotient_g, "quotient_f": self.quotient_f,
                "product": self.product, "bound": self.bound,
                "g_prime_u": self.g_prime_u, "f_prime_v": self.f_prime_v,
                "derivative_product": self.derivative_product}


@dataclass(frozen=True)
class TwoJumpsReport:
    witnesses: tuple
    rejected: tuple              # (index, reason)

    def __iter__(self):
        return iter(self.witnesses)

    def __len__(self):
        return len(self.witnesses)

    def to_json(self) -> dict:
        return {"witnesses": [w.to_json() for w in self.witnesses],
                "rejected": [{"index": i, "reason": why} for i, why in self.rejected]}


def _nearest_fixed(h: Diffeo, lo: float, hi: float, y: float, cfg: RunConfig):
    """Fixed point of ``h`` in ``[lo, hi]`` closest to ``y`` (lift coordinates)."""
    fs = fixed_set(h, cfg)
    shifts = range(-2, 3) if h.manifold is Manifold.CIRCLE else (0,)
    best = None
    cands = [(p, p) for p in fs.points] + list(fs.intervals)
    for a, b in cands:
        for k in shifts:
            a2, b2 = max(a + k, lo), min(b + k, hi)
            if a2 > b2:
                continue
            x = min(max(y, a2), b2)
            if best is None or abs(x - y) < abs(best - y):
                best = x
    return best


def _max_derivative(h: Diffeo, lo: float, hi: float, n: int = 257):
    xs = lo + (hi - lo) * (np.arange(n) + 0.5) / n
    ds = h.derivative(xs)
    i = int(np.argmax(ds))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, n - 1)]
    res = minimize_scalar(lambda x: -float(h.derivative(np.array([x]))[0]), bounds=(a, b),
                          method="bounded", options={"xatol": 1e-13})
    if -res.fun > ds[i]:
        return float(res.x), float(-res.fun)
    return float(xs[i]), float(ds[i])


def two_jumps(f: Diffeo, g: Diffeo, configs, cfg: RunConfig = DEFAULT) -> TwoJumpsReport:
    """Derivative witnesses for configurations ``(y, I)`` with ``I`` bounded by ``f(y)`` and ``g(y)``.

    ``A`` is the half of ``I`` on the side of ``f(y)`` and ``B`` the half on the
    side of ``g(y)``; ``s`` is the fixed point of ``g`` in ``A`` nearest ``y``
    and ``t`` the fixed point of ``f`` in ``B`` nearest ``y``.  The mean value
    theorem then gives points ``u`` in ``(s, y)`` and ``v`` in ``(y, t)`` with
    ``g'(u) f'(v) >= (1 + |B|/|A|)(1 + |A|/|B|) >= 4``.
    """
    if f.manifold is not g.manifold:
        raise DomainError("manifold mismatch")
    tol = cfg.tol.tol_geom
    circle = f.manifold is Manifold.CIRCLE
    out, rejected = [], []
    for j, conf in enumerate(configs):
        y, I = (conf, None) if np.isscalar(conf) else (conf[0], conf[1] if len(conf) > 1 else None)
        y = float(y)
        fy, gy = _at(f, y), _at(g, y)
        if circle:
            fy, gy = lift_near(fy, y - 0.5), lift_near(gy, y - 0.5)
        if I is not None:
            lo, hi = sorted(map(float, I))
            if circle:
                lo = lift_near(lo, y - 0.5)
                hi = lo + (float(max(I)) - float(min(I)))
            if not (abs(min(fy, gy) - lo) <= tol and abs(max(fy, gy) - hi) <= tol):
                rejected.append((j, "I is not bounded by f(y) and g(y)"))
                continue
        if not (min(fy, gy) < y < max(fy, gy)):
            rejected.append((j, "y is not interior to I"))
            continue
        A = (min(fy, y), max(fy, y))
        B = (min(gy, y), max(gy, y))
        s = _nearest_fixed(g, A[0], A[1], y, cfg)
        t = _nearest_fixed(f, B[0], B[1], y, cfg)
        if s is None:
            rejected.append((j, "no fixed point of g in A"))
            continue
        if t is None:
            rejected.append((j, "no fixed point of f in B"))
            continue
        if s == y or t == y:
            rejected.append((j, "y itself is fixed"))
            continue
        qg = (gy - s) / (y - s)
        qf = (t - fy) / (t - y)
        u, gu = _max_derivative(g, min(s, y), max(s, y))
        v, fv = _max_derivative(f, min(t, y), max(t, y))
        w = TwoJumpsWitness(y, (min(fy, gy), max(fy, gy)), A, B, float(s), float(t), u, v,
                            float(qg), float(qf), gu, fv)
        if w.product < w.bound - 1e-6:
            raise InvariantViolation(f"quotient product {w.product} below bound {w.bound}")
        out.append(w)
    return TwoJumpsReport(tuple(out), tuple(rejected))


def _family_conclusion(ws) -> dict:
    lengths = [w.length for w in ws]
    shrinking = (len(ws) >= 3 and all(b < a for a, b in zip(lengths, lengths[1:]))
                 and lengths[-1] <= lengths[0] / 8)
    out = {"count": len(ws), "lengths": lengths, "min_product": min((w.product for w in ws), default=None),
           "shrinking": shrinking}
    if shrinking:
        out["conclusion"] = ("derivative products stay >= 4 while |I_j| shrinks; an infinite "
                             "continuation of this family is incompatible with C^1 maps")
    else:
        out["conclusion"] = None
        out["withheld"] = "no shrinking family: the blow-up argument needs |I_j| -> 0"
    return out


def fg_obstruction(f: Diffeo, g: Diffeo, If_list, Ig_list, x_list, cfg: RunConfig = DEFAULT) -> dict:
    """Turn configurations ``x in I_f \\ I_g``, ``f(x) in I_g``, ``gf(x) not in I_f`` into witnesses.

    Each configuration is fed to :func:`two_jumps` for ``f^-1`` and ``g`` at
    ``y = f(x)``, so ``I`` is bounded by ``x`` and ``g(f(x))``.
    """
    if not (len(If_list) == len(Ig_list) == len(x_list)):
        raise DomainError("If_list, Ig_list and x_list must have equal lengths")
    m, tol = f.manifold, cfg.tol.tol_geom
    finv = f.inverse()
    witnesses, rejected = [], []
    for j, (If, Ig, x) in enumerate(zip(If_list, Ig_list, x_list)):
        If, Ig, x = tuple(map(float, If)), tuple(map(float, Ig)), float(x)
        reason = None
        if any(_circ_dist(_at(f, e), e, m) > tol for e in If):
            reason = "f does not preserve I_f"
        elif any(_circ_dist(_at(g, e), e, m) > tol for e in Ig):
            reason = "g does not preserve I_g"
        else:
            fx = _at(f, x)
            gfx = _at(g, fx)
            inside = (lambda iv, p: (iv[0] < lift_near(p, iv[0]) < iv[1]) if m is Manifold.CIRCLE
                      else iv[0] < p < iv[1])
            if not inside(If, x) or inside(Ig, x):
                reason = "x is not in I_f \\ I_g"
            elif not inside(Ig, fx):
                reason = "f(x) is not in I_g"
            elif inside(If, gfx):
                reason = "g(f(x)) lies in I_f"
        if reason:
            rejected.append((j, reason))
            continue
        rep = two_jumps(finv, g, [(fx, None)], cfg)
        if rep.rejected:
            rejected.append((j, rep.rejected[0][1]))
            continue
        witnesses.append(rep.witnesses[0])
    return {"witnesses": witnesses, "rejected": rejected, "family": _family_conclusion(witnesses)}


# ---------------------------------------------------------------------------
# pipeline


@dataclass
class P4Verdict:
    verdict: str
    roles: dict
    relations: dict | None = None
    powers: dict = field(default_factory=dict)
    search: PropositionSearch | None = None
    witnesses: list = field(default_factory=list)
    family: dict | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "roles": self.roles, "relations": self.relations,
                "powers": self.powers,
                "search": None if self.search is None else self.search.to_json(),
                "witnesses": [w.to_json() for w in self.witnesses], "family": self.family,
                "notes": self.notes}


def analyze_p4_action(a: ActionAssignment, cfg: RunConfig = DEFAULT, swap: bool = False) -> P4Verdict:
    """Run relation checks, grounding, the interval search and the blow-up test.

    With ``f = b`` and ``g = c`` (``swap`` exchanges the roles of the two
    path ends), each proposition pair with a chain yields a configuration for
    :func:`fg_obstruction`.
    """
    roles = _resolve_roles(a, None)
    if swap:
        roles = {"a": roles["d"], "d": roles["a"], "b": roles["c"], "c": roles["b"]}
    rel = check_action(a, cfg)
    verdict = P4Verdict("CONFIG-EXHAUSTED", roles, rel)
    failed = [e["pair"] for e in rel["edges"] if e["result"] == "fail"]
    if failed:
        verdict.verdict = "RELATIONS-FAIL"
        verdict.notes.append(f"edge relations violated: {failed}")
        return verdict
    if rel["indeterminate"]:
        verdict.notes.append("some relation tests fell in the indeterminate zone")
    maps = dict(a.maps)
    for v, grounded in rel["grounded"].items():
        if grounded:
            continue
        rot = rotation_number(maps[v], cfg)
        if not rot.rational:
            verdict.notes.append(f"generator {v} has no fixed point and an irrational-looking rotation "
                                 f"number {rot.value:.12g}; no power of it is grounded")
            return verdict
        q = rot.fraction[1]
        maps[v] = maps[v].power(q)
        verdict.powers[v] = q
    work = ActionAssignment(a.presentation, maps, a.manifold) if verdict.powers else a
    search = find_proposition_intervals(work, cfg.budget, roles, cfg)
    verdict.search = search
    fb, fc = work[roles["b"]], work[roles["c"]]
    If, Ig, xs = [], [], []
    for pair in search.pairs:
        ch = pair.chain
        if ch is None:
            continue
        If.append(ch.intervals[1])
        Ig.append(ch.intervals[2])
        xs.append(ch.x)
    obs = fg_obstruction(fb, fc, If, Ig, xs, cfg)
    verdict.witnesses = obs["witnesses"]
    # the family test wants the configurations ordered by decreasing size
    fam = _family_conclusion(sorted(verdict.witnesses, key=lambda w: -w.length))
    fam["exhausted"] = search.exhausted
    fam["rejected"] = [{"index": i, "reason": why} for i, why in obs["rejected"]]
    verdict.family = fam
    if verdict.witnesses:
        verdict.verdict = "BLOWUP-WITNESS"
    else:
        verdict.notes.append("no proposition interval pair produced a blow-up configuration")
    return verdict
