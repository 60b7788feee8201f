"""Right-angled Artin groups: words, normal forms and actions by diffeomorphisms."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import DEFAULT, RunConfig
from .diffeo import Compose, Diffeo, Inverse, commutator, diffeo_from_json
from .dynamics import (fixed_set, is_grounded, rotation_number, sup_displacement,
                       support)
from .errors import DomainError, PreconditionError
from .graphs import SimplicialGraph
from .intervals import Manifold, lift_near, subset

Word = tuple  # ((label, exponent), ...)


# ---------------------------------------------------------------------------
# free words

_TOKEN = re.compile(r"^([A-Za-z_][\w]*)(?:\^\(?(-?\d+)\)?)?$")


def parse_word(w) -> Word:
    """Accept ``"a b^-1 c^2"``, ``[["a", 1], ["b", -1]]`` or an existing word."""
    if isinstance(w, str):
        out = []
        for tok in w.replace("*", " ").split():
            m = _TOKEN.match(tok)
            if not m:
                raise DomainError(f"bad word token {tok!r}")
            out.append((m.group(1), int(m.group(2) or 1)))
        return free_reduce(out)
    try:
        return free_reduce((str(lbl), int(e)) for lbl, e in w)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"malformed word {w!r}") from exc


def format_word(w: Word) -> str:
    return " ".join(lbl if e == 1 else f"{lbl}^{e}" for lbl, e in w)


def free_reduce(w: Iterable) -> Word:
    """Merge equal neighbouring labels and drop zero exponents."""
    out: list[list] = []
    for lbl, e in w:
        if e == 0:
            continue
        if out and out[-1][0] == lbl:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([lbl, e])
    return tuple((lbl, e) for lbl, e in out)


def inverse(w: Word) -> Word:
    return tuple((lbl, -e) for lbl, e in reversed(w))


def concat(*ws: Word) -> Word:
    return free_reduce(s for w in ws for s in w)


def power(w: Word, n: int) -> Word:
    base = w if n >= 0 else inverse(w)
    return concat(*([base] * abs(n)))


def commutator_word(u: Word, v: Word) -> Word:
    """``[u, v] = u^-1 v^-1 u v``."""
    return concat(inverse(u), inverse(v), u, v)


def letter(lbl: str, e: int = 1) -> Word:
    return ((lbl, e),)


def length(w: Word) -> int:
    return sum(abs(e) for _, e in w)


def exponent_sum(w: Word, lbl: str) -> int:
    return sum(e for x, e in w if x == lbl)


def _letters(w: Word) -> list[tuple[str, int]]:
    return [(lbl, 1 if e > 0 else -1) for lbl, e in w for _ in range(abs(e))]


# ---------------------------------------------------------------------------
# presentations and the word problem


@dataclass(frozen=True)
class RaagPresentation:
    graph: SimplicialGraph

    @property
    def generators(self) -> tuple[str, ...]:
        return self.graph.vertices

    def commutes(self, u: str, v: str) -> bool:
        return u == v or self.graph.adjacent(u, v)

    def check_labels(self, w: Word):
        unknown = sorted({lbl for lbl, _ in w} - set(self.generators))
        if unknown:
            raise DomainError(f"unknown generator(s) {unknown}")


@dataclass(frozen=True)
class Reduction:
    word: Word
    trivial: bool

    @property
    def length(self) -> int:
        return length(self.word)


def reduce_in_raag(w, p: RaagPresentation) -> Reduction:
    """Normal form in the RAAG.

    First cancel every pair ``x^e ... x^-e`` whose intermediate letters all
    commute with ``x`` (this yields a geodesic), then take the
    lexicographically least representative of the commutation class, reading
    letters by generator order and then sign.
    """
    w = parse_word(w)
    p.check_labels(w)
    letters = _letters(w)
    changed = True
    while changed:
        changed = False
        for i in range(len(letters)):
            x, s = letters[i]
            for j in range(i + 1, len(letters)):
                y, t = letters[j]
                if y == x and t == -s:
                    del letters[j], letters[i]
                    changed = True
                    break
                if not p.commutes(x, y) or y == x:
                    break
            if changed:
                break
    rank = {v: k for k, v in enumerate(p.generators)}
    out = []
    rest = letters
    while rest:
        best = None
        for k, (y, t) in enumerate(rest):
            if all(p.commutes(y, z) and z != y for z, _ in rest[:k]):
                key = (rank[y], -t)
                if best is None or key < best[0]:
                    best = (key, k)
        k = best[1]
        out.append(rest[k])
        rest = rest[:k] + rest[k + 1:]
    nf = free_reduce(out)
    return Reduction(nf, not nf)


def power_subgroup(p: RaagPresentation, n: int, w) -> Word:
    """Substitute ``v -> v^n`` in ``w``; the ``n``-th powers generate a copy of the same RAAG."""
    if n < 1:
        raise DomainError("power exponent must be >= 1")
    w = parse_word(w)
    p.check_labels(w)
    return tuple((lbl, n * e) for lbl, e in w)


# ---------------------------------------------------------------------------
# actions


@dataclass(frozen=True)
class ActionAssignment:
    presentation: RaagPresentation
    maps: Mapping[str, Diffeo]
    manifold: Manifold

    def __post_init__(self):
        object.__setattr__(self, "manifold", Manifold.parse(self.manifold))
        missing = set(self.presentation.generators) - set(self.maps)
        extra = set(self.maps) - set(self.presentation.generators)
        if missing or extra:
            raise DomainError(f"assignment labels do not match generators "
                              f"(missing {sorted(missing)}, extra {sorted(extra)})")
        for lbl, f in self.maps.items():
            if f.manifold is not self.manifold:
                raise DomainError(f"map {lbl} acts on {f.manifold.value}, expected {self.manifold.value}")
        object.__setattr__(self, "maps", dict(self.maps))

    def __hash__(self):
        return id(self)

    @classmethod
    def build(cls, graph: SimplicialGraph, maps: Mapping[str, Diffeo]) -> "ActionAssignment":
        ms = {f.manifold for f in maps.values()}
        if len(ms) != 1:
            raise DomainError("all maps must act on the same manifold")
        return cls(RaagPresentation(graph), maps, ms.pop())

    @classmethod
    def from_json(cls, data: Mapping) -> "ActionAssignment":
        try:
            graph = SimplicialGraph.from_json(data["presentation"])
            m = Manifold.parse(data["manifold"])
            maps = {str(k): diffeo_from_json(v, m) for k, v in data["assignment"].items()}
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed action file: {exc}") from exc
        return cls(RaagPresentation(graph), maps, m)

    def to_json(self) -> dict:
        return {"presentation": self.presentation.graph.to_json(),
                "manifold": self.manifold.value,
                "assignment": {k: self.maps[k].to_json() for k in sorted(self.maps)}}

    def __getitem__(self, lbl: str) -> Diffeo:
        return self.maps[lbl]

    def word(self, w) -> Diffeo:
        return evaluate_word(self, w)


def evaluate_free(w, maps: Mapping[str, Diffeo], manifold) -> Diffeo:
    """Evaluate a word as a composition; ``x1 x2`` acts as ``maps[x1] ∘ maps[x2]``."""
    w = parse_word(w)
    parts = []
    for lbl, e in w:
        if lbl not in maps:
            raise DomainError(f"unknown generator {lbl!r}")
        f = maps[lbl].expr
        parts += [f if e > 0 else Inverse(f)] * abs(e)
    return Diffeo(manifold, Compose(tuple(parts)), check=False)


def evaluate_word(a: ActionAssignment, w) -> Diffeo:
    return evaluate_free(w, a.maps, a.manifold)


def _pair_entry(a: ActionAssignment, u: str, v: str, cfg: RunConfig, want: str) -> dict:
    d = sup_displacement(commutator(a[u], a[v]), cfg)
    if d.status == "indeterminate":
        verdict = "indeterminate"
    else:
        verdict = "pass" if d.status == want else "fail"
    return {"pair": [u, v], "displacement": d.value, "status": d.status, "result": verdict}


def check_action(a: ActionAssignment, cfg: RunConfig = DEFAULT) -> dict:
    """Relation report: edges must commute, non-edges must visibly not commute."""
    gens = a.presentation.generators
    edges, non_edges = [], []
    for i, u in enumerate(gens):
        for v in gens[i + 1:]:
            if a.presentation.graph.adjacent(u, v):
                edges.append(_pair_entry(a, u, v, cfg, "identity"))
            else:
                non_edges.append(_pair_entry(a, u, v, cfg, "nontrivial"))
    grounded = {v: is_grounded(a[v], cfg) for v in gens}
    return {
        "edges": edges,
        "non_edges": non_edges,
        "grounded": grounded,
        "relations_hold": all(e["result"] == "pass" for e in edges),
        "non_edges_nontrivial": all(e["result"] == "pass" for e in non_edges),
        "indeterminate": any(e["result"] == "indeterminate" for e in edges + non_edges),
    }


# ---------------------------------------------------------------------------
# conjugation machinery


def successive_conjugation(signs: Sequence[int], x: str = "x", y: str = "y") -> Word:
    """``w_1 = y x^s1 y^-1`` and ``w_{i+1} = w_i x^s_{i+1} w_i^-1``; returns the last one.

    Spelled exactly as the recurrence writes it; with ``n`` signs the length
    is ``2^(n+1) - 1``.
    """
    if not signs:
        raise DomainError("successive conjugation needs at least one sign")
    if any(s not in (1, -1) for s in signs):
        raise DomainError("signs must be +1 or -1")
    w = ((y, 1), (x, signs[0]), (y, -1))
    for s in signs[1:]:
        w = w + ((x, s),) + inverse(w)
    return w


def _branch(P: float, Q: float) -> float:
    """Reference point so that ``[ref, ref + 1)`` contains ``[P, Q]``."""
    gap = 1.0 - (Q - P)
    return P - gap / 2 if gap > 0 else P - 1e-7


@dataclass(frozen=True)
class SignChoice:
    s: int
    t: int
    case: int
    word: Word
    image: tuple
    contained: bool

    def to_json(self) -> dict:
        return {"s": self.s, "t": self.t, "case": self.case, "word": format_word(self.word),
                "image_of_Y": list(self.image), "contained": self.contained}


def _point_map(f: Diffeo, ref: float | None):
    def go(x: float) -> float:
        y = float(f.lift(np.array([x]))[0])
        return y if ref is None else lift_near(y, ref)
    return go


def choose_conjugation_signs(f: Diffeo, g: Diffeo, Y, Z, cfg: RunConfig = DEFAULT) -> SignChoice:
    """Pick ``s, t`` in {-1, 1} with ``w(Y) ⊆ Y`` for ``w = u f^t u^-1``, ``u = g f^s g^-1``.

    ``Y = (p, q) ⊆ Z = (P, Q)``; every support component of ``f`` must lie in
    ``Y`` or miss ``Z``, and ``g(Z) = Z``.  The case split orders ``p, u(p),
    q, u(q)``; ties go to the case where ``u(Y) ⊆ Y``.
    """
    tol = cfg.tol.tol_geom
    m = f.manifold
    (p, q), (P, Q) = map(float, Y), map(float, Z)
    ref = _branch(P, Q) if m is Manifold.CIRCLE else None
    if ref is not None:
        p, q = lift_near(p, ref), lift_near(q, ref)
        P = lift_near(P, ref)
        Q = P + (float(Z[1]) - float(Z[0]))
    if not (P - tol <= p < q <= Q + tol):
        raise PreconditionError("Y must be contained in Z", Y=[p, q], Z=[P, Q])
    for c in support(f, cfg).components():
        a, b = (lift_near(c[0], ref), lift_near(c[0], ref) + c[1] - c[0]) if ref is not None else c
        inside = p - tol <= a and b <= q + tol
        outside = b <= P + tol or a >= Q - tol
        if ref is not None and not outside:
            outside = b - 1 <= P + tol and a + 1 >= Q - tol or a - 1 >= Q - tol
        if not (inside or outside):
            raise PreconditionError("support component of f straddles Y and Z", component=list(c))
    gm = _point_map(g, ref)
    for end in (P, Q):
        e = gm(end)
        if ref is not None:
            e = min((e + k for k in (-1, 0, 1)), key=lambda v: abs(v - end))
        if abs(e - end) > tol:
            raise PreconditionError("g does not preserve Z", endpoint=end, image=e)

    def u_of(s):
        return _point_map(Diffeo(m, Compose((g.expr, f.power(s).expr, Inverse(g.expr))), check=False), ref)

    s = 1
    u = u_of(1)
    if u(p) < p - tol:
        s, u = -1, u_of(-1)
    up, uq = u(p), u(q)
    if uq <= q + tol:
        case, t = 1, s
    elif up < q - tol or abs(up - q) <= tol:
        case = 2
        w_plus = _point_map(evaluate_free(successive_conjugation([s, s]), {"x": f, "y": g}, m), ref)
        t = s if w_plus(q) <= q + tol else -s
    else:
        case, t = 3, s
    word = successive_conjugation([s, t])
    w = _point_map(evaluate_free(word, {"x": f, "y": g}, m), ref)
    wp, wq = w(p), w(q)
    return SignChoice(s, t, case, word, (wp, wq), p - tol <= wp and wq <= q + tol)


@dataclass
class NestedReport:
    word: Word
    signs: list
    stages: list = field(default_factory=list)
    y_contained: list = field(default_factory=list)
    support_contained: bool = False
    offending: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.y_contained) and self.support_contained

    def to_json(self) -> dict:
        return {"word": format_word(self.word), "signs": self.signs,
                "stages": [s.to_json() for s in self.stages], "y_contained": self.y_contained,
                "support_contained": self.support_contained, "offending": self.offending,
                "passed": self.passed}


def nested_conjugation_lemma(f: Diffeo, g: Diffeo, Ys, Zs, m: int,
                             cfg: RunConfig = DEFAULT) -> NestedReport:
    """Successive conjugation ``w`` with ``w(Y_j) ⊆ Y_j`` for ``j <= m``.

    Stage ``i`` applies :func:`choose_conjugation_signs` with the current word
    in place of ``g`` and appends its two signs.  The report checks that
    ``supp(w f w^-1)`` lies in ``Y_1 ∪ ... ∪ Y_m ∪ Z_{m+1} ∪ ...``.
    """
    tol = cfg.tol.tol_geom
    if len(Ys) != len(Zs):
        raise DomainError("Ys and Zs must have the same length")
    if m < 0 or m > len(Ys):
        raise DomainError("m must lie between 0 and the number of intervals")
    mf = f.manifold
    signs: list[int] = []
    stages = []
    current = g
    for i in range(m):
        try:
            choice = choose_conjugation_signs(f, current, Ys[i], Zs[i], cfg)
        except PreconditionError as exc:
            raise PreconditionError(f"stage {i + 1}: {exc}", stage=i + 1, **exc.details) from exc
        stages.append(choice)
        signs += [choice.s, choice.t]
        current = evaluate_free(successive_conjugation(signs), {"x": f, "y": g}, mf)
    word = successive_conjugation(signs or [1])
    w = evaluate_free(word, {"x": f, "y": g}, mf)
    report = NestedReport(word, signs or [1], stages)
    for j in range(m):
        p, q = map(float, Ys[j])
        img = w.lift(np.array([p, q]))
        if mf is Manifold.CIRCLE:
            img = img - np.round(img[0] - p)
        report.y_contained.append(bool(p - tol <= img[0] and img[1] <= q + tol))
    allowed = [tuple(map(float, Ys[j])) for j in range(m)] + [tuple(map(float, Zs[j])) for j in range(m, len(Zs))]
    conj = Diffeo(mf, Compose((w.expr, f.expr, Inverse(w.expr))), check=False)
    for c in support(conj, cfg).components():
        if not any(subset(c, iv, mf, tol) for iv in allowed):
            report.offending.append(list(c))
    report.support_contained = not report.offending
    return report


# ---------------------------------------------------------------------------
# central extensions


def central_split_exponents(orders, generators: Sequence[str] = ()) -> dict[str, int]:
    """Exponents killing central commutators: ``[b^n, d] = q^n = 1`` once ``ord(q) | n``.

    ``orders`` maps a pair of commuting-in-the-quotient generators to the order
    of their lifted commutator (a mapping ``(u, v) -> n`` or rows ``[u, v, n]``).
    Each generator gets the lcm of the orders it takes part in.
    """
    rows = orders.items() if isinstance(orders, Mapping) else ((tuple(r[:2]), r[2]) for r in orders)
    out = {str(v): 1 for v in generators}
    for (u, v), n in rows:
        if int(n) != n or n < 1:
            raise DomainError(f"commutator order must be a positive integer, got {n!r}")
        for x in (str(u), str(v)):
            out[x] = math.lcm(out.get(x, 1), int(n))
    return out


# ---------------------------------------------------------------------------
# diagnostics


def _reduced_words(gens: Sequence[str], radius: int):
    letters = [(g, e) for g in sorted(gens) for e in (1, -1)]
    for n in range(1, radius + 1):
        for combo in product(letters, repeat=n):
            if any(a[0] == b[0] and a[1] == -b[1] for a, b in zip(combo, combo[1:])):
                continue
            yield free_reduce(combo)


def holder_diagnostic(a: ActionAssignment, ball_radius: int = 2, cfg: RunConfig = DEFAULT) -> dict:
    """Finite-ball check of the free-action-implies-abelian principle.

    Reports whether some nontrivially acting word of length at most
    ``ball_radius`` has a fixed point (interior fixed point on the interval).
    """
    if ball_radius < 1:
        raise DomainError("ball_radius must be >= 1")
    gens = a.presentation.generators
    with_fixed = []
    for w in _reduced_words(gens, ball_radius):
        f = evaluate_word(a, w)
        if sup_displacement(f, cfg).status == "identity":
            continue
        fs = fixed_set(f, cfg)
        pts = [x for x in fs.points if not (a.manifold is Manifold.INTERVAL and x in (0.0, 1.0))]
        if pts or fs.intervals:
            with_fixed.append(format_word(w))
    report = {"radius": ball_radius, "words_with_fixed_points": with_fixed[:20],
              "count_with_fixed_points": len(with_fixed)}
    if with_fixed:
        report["prediction"] = "not applicable"
        report["reason"] = "grounded elements present"
        return report
    comm = {f"{u},{v}": sup_displacement(commutator(a[u], a[v]), cfg).status
            for i, u in enumerate(gens) for v in gens[i + 1:]}
    report["prediction"] = "abelian"
    report["commutators"] = comm
    report["abelian_verified"] = all(s == "identity" for s in comm.values())
    report["finding"] = None if report["abelian_verified"] else "free action in the ball but a commutator is nontrivial"
    return report


def rationality_diagnostic(a: ActionAssignment, cfg: RunConfig = DEFAULT) -> dict:
    """Rotation numbers of the generators of a nonabelian action with connected commutation graph.

    A connected, nonabelian configuration of infinite-order circle
    diffeomorphisms forces rational rotation numbers; irrational ones are
    flagged.  Finite order can only be excluded up to ``period_cap``.
    """
    if a.manifold is not Manifold.CIRCLE:
        raise DomainError("rotation numbers need the circle")
    gens = a.presentation.generators
    status = {}
    for i, u in enumerate(gens):
        for v in gens[i + 1:]:
            status[(u, v)] = sup_displacement(commutator(a[u], a[v]), cfg).status
    edges = frozenset(frozenset(k) for k, s in status.items() if s == "identity")
    numeric = SimplicialGraph(gens, edges)
    caveat = (f"the rationality conclusion needs infinite-order generators, and finite order is "
              f"only excluded up to period {cfg.period_cap}; a finite-order generator such as a "
              "half-turn can link an irrational rotation to a grounded map")
    if len(numeric.components()) > 1:
        return {"applicable": False, "reason": "commutation graph disconnected", "caveat": caveat}
    if all(s == "identity" for s in status.values()):
        return {"applicable": False, "reason": "action looks abelian", "caveat": caveat}
    rows = {}
    flagged = []
    for v in gens:
        r = rotation_number(a[v], cfg)
        rows[v] = r.to_json()
        if not r.rational:
            flagged.append(v)
    return {"applicable": True, "rotation_numbers": rows, "flagged": flagged,
            "pass": not flagged, "caveat": caveat}
