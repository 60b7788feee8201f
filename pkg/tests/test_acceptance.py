"""Acceptance suite: eight criteria, each with its tolerance and time limit.

Every criterion prints one ``PASS``/``FAIL`` line.  Run standalone with
``python3 tests/test_acceptance.py`` or as part of pytest.
"""
import itertools
import math
import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import brute_force_p4, graph_from_mask  # noqa: E402
from onedim import catalog  # noqa: E402
from onedim.config import RunConfig  # noqa: E402
from onedim.diffeo import BumpPush, Compose, Diffeo, Rotation, SinePerturb, commutator, conjugate  # noqa: E402
from onedim.dynamics import is_grounded, rotation_number, sup_displacement  # noqa: E402
from onedim.graphs import P4Witness, SimplicialGraph, build_cotree, cotree_to_graph  # noqa: E402
from onedim.intervals import Manifold  # noqa: E402
from onedim.obstruction import (analyze_p4_action, commutator_region, compute_envelopes,  # noqa: E402
                                envelope_invariance, two_jumps)
from onedim.verdict import (OBSTRUCTED, POSSIBLE, UNKNOWN, SurfaceSignature, braid_verdict,  # noqa: E402
                            complexity, group_catalog_verdict, mod_verdict)

CFG = RunConfig()
C = Manifold.CIRCLE


def _circ(d: float) -> float:
    d %= 1.0
    return min(d, 1.0 - d)


# ---------------------------------------------------------------------------
# criteria; each returns (ok, detail)


def ac1():
    maps = catalog.circle_triple()
    a, b, c = maps["a"], maps["b"], maps["c"]
    ab = sup_displacement(commutator(a, b), CFG).value
    bc = sup_displacement(commutator(b, c), CFG).value
    ac = sup_displacement(commutator(a, c), CFG).value
    ra, rb = rotation_number(a, CFG), rotation_number(b, CFG)
    ok = (ab < 1e-8 and bc < 1e-8 and ac > 1e-3
          and abs(ra.value - 0.0471975512) <= 1e-6 and not ra.rational
          and abs(rb.value - 0.5) <= 1e-6 and rb.rational)
    return ok, f"[a,b]={ab:.2e} [b,c]={bc:.2e} [a,c]={ac:.3g} rot(a)={ra.value:.10f} rot(b)={rb.value}"


def ac2():
    worst_sym, worst_asym = math.inf, math.inf
    ok = True
    for h, f, g, y in catalog.symmetric_family(range(3, 11)):
        (w,) = two_jumps(f, g, [y], CFG).witnesses
        worst_sym = min(worst_sym, w.product - 4)
        ok &= w.product >= 4 - 1e-6 and abs(w.bound - 4) < 1e-12
    for ratio in (2.0, 5.0):
        for h, f, g, y in catalog.asymmetric_family(ratio):
            (w,) = two_jumps(f, g, [y], CFG).witnesses
            la, lb = w.A[1] - w.A[0], w.B[1] - w.B[0]
            ok &= abs(lb / la - ratio) < 1e-9
            worst_asym = min(worst_asym, w.product - w.bound)
            ok &= w.product >= w.bound - 1e-6
    return ok, f"min(product-4) symmetric={worst_sym:.3g}, min(product-bound) asymmetric={worst_asym:.3g}"


def _cograph_agrees(g: SimplicialGraph) -> bool:
    res = build_cotree(g)
    has = brute_force_p4(g)
    if isinstance(res, P4Witness):
        return has and res.is_valid_for(g)
    back = cotree_to_graph(res)
    return not has and back.edges == g.edges and set(back.vertices) == set(g.vertices)


def ac3():
    import networkx as nx
    n_lab = n_atlas = n_rand = 0
    bad = 0
    for k in range(1, 7):
        for mask in range(2 ** (k * (k - 1) // 2)):
            bad += not _cograph_agrees(graph_from_mask(k, mask))
            n_lab += 1
    for h in nx.graph_atlas_g():
        if h.number_of_nodes() != 7:
            continue
        g = SimplicialGraph(tuple(str(v) for v in h.nodes), frozenset(frozenset(map(str, e)) for e in h.edges))
        bad += not _cograph_agrees(g)
        n_atlas += 1
    rng = random.Random(2024)
    for _ in range(500):
        k = rng.randint(1, 10)
        bad += not _cograph_agrees(graph_from_mask(k, rng.getrandbits(k * (k - 1) // 2)))
        n_rand += 1
    return bad == 0, (f"{n_lab} labeled graphs on <=6 vertices, {n_atlas} unlabeled 7-vertex graphs, "
                      f"{n_rand} random graphs on <=10 vertices; disagreements={bad}")


def ac4():
    ok = True
    for g, n, b in itertools.product(range(11), repeat=3):
        s = SurfaceSignature(g, n, b)
        c = complexity(s)
        ok &= c == 3 * g - 3 + n + b
        ok &= (mod_verdict(s).outcome == POSSIBLE) == (c <= 1)
    ok &= braid_verdict(3).outcome == POSSIBLE and braid_verdict(4).outcome == OBSTRUCTED
    for n in range(1, 11):
        for fam in ("autfn", "outfn"):
            ok &= group_catalog_verdict(fam, n=n).outcome == (OBSTRUCTED if n >= 3 else UNKNOWN)
    for genus in range(11):
        ok &= group_catalog_verdict("torelli", genus=genus).outcome == (OBSTRUCTED if genus >= 3 else UNKNOWN)
        ok &= group_catalog_verdict("johnson", k=3, genus=genus).outcome == (OBSTRUCTED if genus >= 3 else UNKNOWN)
        for k in range(4, 11):
            ok &= group_catalog_verdict("johnson", k=k, genus=genus).outcome == (OBSTRUCTED if genus >= 5 else UNKNOWN)
    return ok, "surfaces g,n,b<=10, braid boundary 3/4, catalog ranges"


def circle_catalog():
    """Circle maps used across the library: named ones plus seeded random candidates."""
    maps = list(catalog.circle_triple().values())
    maps += list(catalog.abelian_action(C).maps.values())
    maps += [Diffeo(C, Compose((Rotation(0.21), SinePerturb(3, 0.02)))),
             Diffeo(C, Compose((Rotation(0.5), SinePerturb(2, 0.03)))),
             Diffeo(C, Compose((Rotation(0.4), BumpPush(0.1, 0.3, 0.6)))),
             Diffeo(C, BumpPush(0.7, 1.2, 0.5))]
    rng = np.random.default_rng(17)
    maps += [catalog.random_candidate(rng, C)[r] for r in "ad"]
    return maps


def ac5():
    maps = circle_catalog()
    rng = np.random.default_rng(5)
    hs = [Diffeo(C, SinePerturb(int(rng.integers(1, 4)), float(rng.uniform(-0.04, 0.04)))) for _ in range(2)]
    hs.append(Diffeo(C, BumpPush(float(rng.uniform(0, 1)), float(rng.uniform(1, 1.5)), 0.4)))
    worst_pow = worst_conj = 0.0
    ground_ok = True
    for f in maps:
        r = rotation_number(f, CFG).value
        for n in (2, 3, 5):
            worst_pow = max(worst_pow, _circ(rotation_number(f.power(n), CFG).value - n * r))
        for h in hs:
            worst_conj = max(worst_conj, _circ(rotation_number(conjugate(h, f), CFG).value - r))
        ground_ok &= is_grounded(f, CFG) == (_circ(r) < CFG.tol.tol_rot)
    ok = worst_pow < 1e-6 and worst_conj < 1e-6 and ground_ok
    return ok, f"{len(maps)} maps: power err={worst_pow:.2e}, conjugacy err={worst_conj:.2e}, grounded iff rot=0: {ground_ok}"


def ac6():
    rng = np.random.default_rng(6)
    bad = 0
    for _ in range(100):
        f, g = catalog.random_pair(rng)
        bad += not commutator_region(f, g, CFG).containment_ok
    return bad == 0, f"100 random pairs, containment failures={bad}"


def ac7():
    rng = np.random.default_rng(7)
    bad = []
    for i in range(20):
        m = C if i % 4 == 3 else Manifold.INTERVAL
        a = catalog.random_candidate(rng, m)
        rep = compute_envelopes(a, cfg=CFG)
        inv = envelope_invariance(a, rep, cfg=CFG)
        if not (rep.disjoint and inv["all_preserved"] and inv["support_contained"]):
            bad.append(i)
    return not bad, f"20 candidates (5 on the circle), failures={bad}"


def ac8():
    v_ab = analyze_p4_action(catalog.abelian_action(), CFG).verdict
    v_abc = analyze_p4_action(catalog.abelian_action(C), CFG).verdict
    v_br = analyze_p4_action(catalog.broken_relation_action(), CFG).verdict
    v = analyze_p4_action(catalog.shrinking_candidate(), CFG)
    prods = [w.product for w in v.witnesses]
    ok = (v_ab == v_abc == "CONFIG-EXHAUSTED" and v_br == "RELATIONS-FAIL"
          and v.verdict == "BLOWUP-WITNESS" and prods and min(prods) >= 4 - 1e-6)
    return ok, (f"abelian={v_ab}/{v_abc}, broken={v_br}, shrinking={v.verdict} "
                f"({len(prods)} witnesses, min product {min(prods, default=float('nan')):.6g})")


CRITERIA = [
    ("AC1", "circle triple relations and rotation numbers", ac1, 5),
    ("AC2", "two-jumps product bound", ac2, 10),
    ("AC3", "cograph recognition vs brute force", ac3, 60),
    ("AC4", "verdict tables", ac4, 1),
    ("AC5", "rotation-number suite", ac5, 30),
    ("AC6", "commutator-region containment", ac6, 30),
    ("AC7", "envelope suite", ac7, 60),
    ("AC8", "end-to-end pipeline", ac8, 60),
]


def run_criterion(name, title, fn, limit):
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure of the criterion
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    ok = bool(ok) and dt < limit
    line = f"{name} {'PASS' if ok else 'FAIL'} {title}: {detail} [{dt:.2f}s < {limit}s]"
    return ok, line


@pytest.mark.parametrize("name,title,fn,limit", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_acceptance(name, title, fn, limit, capsys):
    ok, line = run_criterion(name, title, fn, limit)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
