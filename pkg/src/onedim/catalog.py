"""Concrete maps and candidate actions used by the tests and the CLI.

Interval constructions are built from monotone splines that are the identity
outside a list of blocks and push one chosen point inside each block.
"""
from __future__ import annotations

import math

import numpy as np

from .diffeo import Compose, Diffeo, Inverse, Rotation, SinePerturb, Spline
from .errors import DomainError
from .graphs import SimplicialGraph, path_graph
from .intervals import Manifold
from .raag import ActionAssignment, RaagPresentation

P4_EDGES = (("b", "d"), ("d", "a"), ("a", "c"))


def p4_presentation() -> RaagPresentation:
    return RaagPresentation(SimplicialGraph.build("abcd", P4_EDGES))


# ---------------------------------------------------------------------------
# circle triple with two commuting pairs


def circle_triple() -> dict[str, Diffeo]:
    """``a`` an irrational rotation, ``b`` the half turn, ``c`` a sine perturbation with period 1/2."""
    m = Manifold.CIRCLE
    return {"a": Diffeo(m, Rotation(math.pi / 3)),
            "b": Diffeo(m, Rotation(0.5)),
            "c": Diffeo(m, SinePerturb(2, 1 / (8 * math.pi)))}


def circle_triple_action() -> ActionAssignment:
    g = path_graph(["a", "b", "c"])
    return ActionAssignment.build(g, circle_triple())


# ---------------------------------------------------------------------------
# push splines


MIN_SECANT = 0.35


def block_secants(P, Q, src, dst):
    return (dst - P) / (src - P), (Q - dst) / (Q - src)


def push_spline(blocks, manifold=Manifold.INTERVAL) -> Diffeo:
    """Identity outside the blocks; inside block ``(P, Q)`` the point ``src`` goes to ``dst``.

    ``blocks`` is a list of ``(P, Q, src, dst)`` with ``0 <= P < src, dst < Q <= 1``
    and disjoint, increasing blocks.  Slopes are 1 at the block ends and the
    slope at ``src`` averages the two secants, capped so that monotone clamping
    never touches the slope-1 ends (that needs both secants above 1/3).
    """
    knots, values, derivs = [0.0], [0.0], [1.0]
    for P, Q, src, dst in sorted(blocks):
        if not (0.0 <= P < src < Q <= 1.0 and P < dst < Q):
            raise DomainError(f"bad push block {(P, Q, src, dst)}")
        if P > knots[-1]:
            knots.append(P); values.append(P); derivs.append(1.0)
        elif P < knots[-1]:
            raise DomainError("push blocks overlap")
        lo_sec = min(block_secants(P, Q, src, dst))
        if lo_sec <= MIN_SECANT:
            raise DomainError(f"push block {(P, Q, src, dst)} is too steep for a slope-1 spline")
        sigma = 0.5 * ((dst - P) / (src - P) + (Q - dst) / (Q - src))
        sigma = min(sigma, 0.98 * math.sqrt(9 * lo_sec ** 2 - 1))
        knots += [src, Q]; values += [dst, Q]; derivs += [sigma, 1.0]
    if knots[-1] < 1.0:
        knots.append(1.0); values.append(1.0); derivs.append(1.0)
    return Diffeo(manifold, Spline(tuple(knots), tuple(values), tuple(derivs)))


def rotate(f: Diffeo, r: float) -> Diffeo:
    """``R_r ∘ f ∘ R_-r`` on the circle, for ``f`` an interval push spline."""
    inner = Diffeo(Manifold.CIRCLE, f.expr)
    rot = Rotation(r)
    return Diffeo(Manifold.CIRCLE, Compose((rot, inner.expr, Inverse(rot))))


# ---------------------------------------------------------------------------
# chain blocks

# local coordinates of one chain block: (support, src, dst) per role
CHAIN_LOCAL = {
    "a": ((0.0, 2.0), 0.5, 1.2),
    "b": ((1.0, 5.0), 1.5, 3.6),
    "c": ((3.3, 7.0), 3.6, 5.6),
    "d": ((5.3, 9.0), 6.0, 7.0),
}
NESTED_LOCAL = {
    "a": ((0.0, 2.0), 0.5, 1.2),
    "b": ((1.0, 5.0), 1.5, 3.6),
    "c": ((3.3, 9.0), 3.6, 7.0),
    "d": ((6.0, 8.0), 6.5, 7.2),
}
LOCAL_SPAN = 9.0


def _scale(local, lo, hi, margin=0.05):
    span = (hi - lo) * (1 - 2 * margin)
    base = lo + (hi - lo) * margin
    return lambda u: base + span * u / LOCAL_SPAN


def chain_blocks(windows, layout=CHAIN_LOCAL) -> dict[str, list]:
    """Per role, the push blocks of ``layout`` scaled into each window ``(lo, hi)``."""
    out = {r: [] for r in layout}
    for lo, hi in windows:
        s = _scale(layout, lo, hi)
        for r, ((P, Q), src, dst) in layout.items():
            out[r].append((s(P), s(Q), s(src), s(dst)))
    return out


def chain_action(windows=((0.0, 1.0),), layout=CHAIN_LOCAL, manifold=Manifold.INTERVAL,
                 rotation: float = 0.0) -> ActionAssignment:
    blocks = chain_blocks(windows, layout)
    maps = {r: push_spline(bl) for r, bl in blocks.items()}
    if manifold is Manifold.CIRCLE:
        maps = {r: rotate(f, rotation) for r, f in maps.items()}
    return ActionAssignment(p4_presentation(), maps, manifold)


def dyadic_windows(count: int = 8) -> list[tuple]:
    """``(2^-(j+1), 2^-j)`` for ``j = 1 .. count``, largest first."""
    return [(2.0 ** -(j + 1), 2.0 ** -j) for j in range(1, count + 1)]


def shrinking_candidate(count: int = 8) -> ActionAssignment:
    """One chain block in each dyadic window; the configurations shrink towards 0."""
    return chain_action(dyadic_windows(count))


def two_configuration_action() -> ActionAssignment:
    return chain_action([(0.0, 0.5), (0.5, 1.0)])


def nested_action() -> ActionAssignment:
    """A chain whose ``I_d`` sits inside ``I_c``."""
    return chain_action(layout=NESTED_LOCAL)


def shared_abelian_action() -> ActionAssignment:
    """``a`` is a power of ``d`` on the same support, so ``cb(I_a)`` never reaches another component of ``supp d``."""
    base = chain_blocks([(0.0, 1.0)])
    d = push_spline(base["d"])
    maps = {"a": d.power(2), "b": push_spline(base["b"]), "c": push_spline(base["c"]), "d": d}
    return ActionAssignment(p4_presentation(), maps, Manifold.INTERVAL)


def broken_relation_action() -> ActionAssignment:
    """Chain layout with ``supp d`` pushed left so that it overlaps ``supp b``."""
    layout = dict(CHAIN_LOCAL)
    layout["d"] = ((4.5, 9.0), 6.0, 7.0)
    return chain_action(layout=layout)


def abelian_action(manifold=Manifold.INTERVAL) -> ActionAssignment:
    """Four maps with pairwise disjoint supports (all relations hold, nothing interacts)."""
    if manifold is Manifold.CIRCLE:
        rots = {"a": 0.1, "b": 0.2, "c": 0.3, "d": 0.4}
        maps = {k: Diffeo(Manifold.CIRCLE, Rotation(v)) for k, v in rots.items()}
        return ActionAssignment(p4_presentation(), maps, Manifold.CIRCLE)
    maps = {}
    for i, r in enumerate("abcd"):
        lo = 0.25 * i
        maps[r] = push_spline([(lo + 0.02, lo + 0.23, lo + 0.1, lo + 0.15)])
    return ActionAssignment(p4_presentation(), maps, Manifold.INTERVAL)


def _steep(block) -> bool:
    (P, Q), src, dst = block
    return min(block_secants(P, Q, src, dst)) <= MIN_SECANT + 0.05


def random_chain_layout(rng: np.random.Generator) -> dict:
    """A perturbed chain layout that keeps the chain pattern and the orbit ``x, bx, cbx``.

    Draws are repeated until every push is gentle enough for :func:`push_spline`.
    """
    while True:
        a1 = rng.uniform(1.6, 2.4)              # right end of I_a
        b0 = rng.uniform(0.6, 1.3)              # left end of I_b, inside I_a
        x = rng.uniform(b0 + 0.1, a1 - 0.1)     # x in I_a ∩ I_b
        c0 = rng.uniform(a1 + 0.4, a1 + 1.2)    # I_c starts after I_a
        b1 = rng.uniform(c0 + 0.8, c0 + 1.6)    # I_b ends inside I_c
        bx = rng.uniform(c0 + 0.1, b1 - 0.1)
        d0 = rng.uniform(b1 + 0.2, b1 + 0.8)    # I_d starts after I_b
        c1 = rng.uniform(d0 + 0.8, d0 + 1.5)
        cbx = rng.uniform(d0 + 0.1, c1 - 0.1)
        d1 = c1 + rng.uniform(0.5, 1.5)
        ax = rng.uniform(0.3, 0.7) * a1
        dx = d0 + rng.uniform(0.3, 0.7) * (d1 - d0)
        lay = {"a": ((0.0, a1), ax, _target(rng, 0.0, a1, ax)),
               "b": ((b0, b1), x, bx), "c": ((c0, c1), bx, cbx),
               "d": ((d0, d1), dx, _target(rng, d0, d1, dx))}
        if not any(_steep(v) for v in lay.values()):
            break
    scale = LOCAL_SPAN / d1
    return {r: ((P * scale, Q * scale), s * scale, t * scale) for r, ((P, Q), s, t) in lay.items()}


def random_candidate(rng: np.random.Generator, manifold=Manifold.INTERVAL) -> ActionAssignment:
    """One to three perturbed chain blocks in random disjoint windows."""
    k = int(rng.integers(1, 4))
    cuts = np.sort(rng.uniform(0.0, 1.0, size=k - 1))
    edges = [0.0, *cuts.tolist(), 1.0]
    windows = [(lo, hi) for lo, hi in zip(edges, edges[1:]) if hi - lo > 0.05] or [(0.0, 1.0)]
    layout = random_chain_layout(rng)
    rot = float(rng.uniform(0.0, 1.0)) if manifold is Manifold.CIRCLE else 0.0
    return chain_action(windows, layout, manifold, rot)


def _target(rng, P, Q, src, gentle=0.5):
    """A destination for ``src`` keeping both block secants at least ``gentle``."""
    lo, hi = P + gentle * (src - P), Q - gentle * (Q - src)
    dst = rng.uniform(lo, hi)
    if abs(dst - src) < 0.05 * (Q - P):
        dst = lo if src - lo > hi - src else hi
    return dst


def random_push(rng: np.random.Generator, windows) -> Diffeo:
    blocks = []
    for lo, hi in windows:
        P, Q = sorted(rng.uniform(lo, hi, size=2))
        if Q - P < 0.02:
            continue
        src = rng.uniform(P + 0.2 * (Q - P), Q - 0.2 * (Q - P))
        blocks.append((P, Q, src, _target(rng, P, Q, src)))
    if not blocks:
        return Diffeo.identity(Manifold.INTERVAL)
    return push_spline(blocks)


def random_pair(rng: np.random.Generator) -> tuple[Diffeo, Diffeo]:
    """Two push maps over a shared random partition; some blocks are shared exactly."""
    n = int(rng.integers(1, 5))
    edges = np.linspace(0.0, 1.0, n + 1)
    windows = list(zip(edges, edges[1:]))
    f = random_push(rng, windows)
    mode = rng.integers(0, 3)
    if mode == 0:
        g = random_push(rng, windows)
    elif mode == 1:
        g = f.power(int(rng.choice([-2, -1, 2, 3])))
    else:
        # g shares f's support components but pushes differently on half of them
        blocks = []
        leaf = f.atoms[0][0] if f.atoms else None
        if leaf is None:
            return f, random_push(rng, windows)
        kn, vs = leaf.knots, leaf.values
        for i in range(1, len(kn) - 2):
            if vs[i] == kn[i] and vs[i + 1] != kn[i + 1] and vs[i + 2] == kn[i + 2]:
                P, Q, src = kn[i], kn[i + 2], kn[i + 1]
                dst = vs[i + 1] if rng.random() < 0.5 else src + 0.5 * (vs[i + 1] - src)
                blocks.append((P, Q, src, dst))
        g = push_spline(blocks) if blocks else random_push(rng, windows)
    return f, g


# ---------------------------------------------------------------------------
# two-jumps families


def two_jumps_pair(h: float, ratio: float = 1.0, y: float | None = None) -> tuple[Diffeo, Diffeo, float]:
    """``(f, g, y)`` with ``f(y) = y - h``, ``g(y) = y + ratio h``, ``f`` fixing ``y + ratio h`` and ``g`` fixing ``y - h``."""
    if y is None:
        y = 0.5 if ratio == 1.0 else 0.25
    k = ratio * h
    if not (0 < h < y and y + k < 1):
        raise DomainError("two-jumps family parameters leave [0, 1]")
    m = Manifold.INTERVAL
    g = Diffeo(m, Spline((0.0, y - h, y, 1.0), (0.0, y - h, y + k, 1.0), (1.0, 2.0, 2.0, 1.0)))
    f = Diffeo(m, Spline((0.0, y, y + k, 1.0), (0.0, y - h, y + k, 1.0), (1.0, 2.0, 2.0, 1.0)))
    return f, g, y


def symmetric_family(levels=range(3, 11)):
    """``(h, f, g, y)`` for ``h = 2^-3 .. 2^-10``."""
    for j in levels:
        h = 2.0 ** -j
        f, g, y = two_jumps_pair(h)
        yield h, f, g, y


def asymmetric_family(ratio: float, levels=range(4, 11)):
    for j in levels:
        h = 2.0 ** -j
        f, g, y = two_jumps_pair(h, ratio)
        yield h, f, g, y
