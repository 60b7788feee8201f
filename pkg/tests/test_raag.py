import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from onedim import catalog
from onedim.diffeo import BumpPush, Diffeo, Rotation, Spline, compose
from onedim.dynamics import sup_displacement
from onedim.errors import DomainError, PreconditionError
from onedim.graphs import SimplicialGraph
from onedim.intervals import Manifold
from onedim.raag import (ActionAssignment, RaagPresentation, central_split_exponents, check_action,
                         choose_conjugation_signs, commutator_word, concat, evaluate_word, exponent_sum,
                         free_reduce, holder_diagnostic, inverse, length, letter, nested_conjugation_lemma,
                         parse_word, power_subgroup, rationality_diagnostic, reduce_in_raag,
                         successive_conjugation)

from conftest import graph_from_mask

C, I = Manifold.CIRCLE, Manifold.INTERVAL
P4 = catalog.p4_presentation()


def random_word(rng, gens, n):
    return free_reduce((rng.choice(gens), rng.choice((1, -1))) for _ in range(n))


def test_reduce_examples():
    assert reduce_in_raag(commutator_word(letter("b"), letter("d")), P4).trivial
    r = reduce_in_raag(commutator_word(letter("a"), letter("b")), P4)
    assert not r.trivial and r.length == 4
    rng = random.Random(3)
    for _ in range(200):
        w = random_word(rng, list("abcd"), rng.randint(0, 12))
        assert reduce_in_raag(concat(w, inverse(w)), P4).trivial
    with pytest.raises(DomainError):
        reduce_in_raag(parse_word("z"), P4)


def test_parse_and_format():
    assert parse_word("a b^-1 a^2") == (("a", 1), ("b", -1), ("a", 2))
    assert parse_word("a a^-1") == ()
    assert parse_word([["a", 2], ["a", -1]]) == (("a", 1),)
    with pytest.raises(DomainError):
        parse_word("a^x")


def test_reduce_properties_on_random_graphs():
    rng = random.Random(11)
    for _ in range(1000):
        n = rng.randint(1, 6)
        g = graph_from_mask(n, rng.getrandbits(n * (n - 1) // 2))
        p = RaagPresentation(g)
        w = random_word(rng, list(g.vertices), rng.randint(0, 10))
        r = reduce_in_raag(w, p)
        assert reduce_in_raag(r.word, p).word == r.word
        assert r.length <= length(w)
        for v in g.vertices:
            assert exponent_sum(r.word, v) == exponent_sum(w, v)
        # swapping an adjacent commuting pair of letters leaves the normal form unchanged
        letters = [(x, 1 if e > 0 else -1) for x, e in w for _ in range(abs(e))]
        for i in range(len(letters) - 1):
            (x, _), (y, _) = letters[i], letters[i + 1]
            if x != y and g.adjacent(x, y):
                sw = letters[:i] + [letters[i + 1], letters[i]] + letters[i + 2:]
                assert reduce_in_raag(free_reduce(sw), p).word == r.word
                break


def test_reduce_matches_free_and_abelian_extremes():
    rng = random.Random(5)
    gens = list("abcd")
    free = RaagPresentation(SimplicialGraph(tuple(gens)))
    full = RaagPresentation(SimplicialGraph.build(gens, [(u, v) for i, u in enumerate(gens) for v in gens[i + 1:]]))
    for _ in range(300):
        w = random_word(rng, gens, rng.randint(0, 14))
        # no relations: free reduction is already the normal form up to reordering nothing
        assert reduce_in_raag(w, free).word == w
        # all relations: trivial exactly when every exponent sum vanishes
        assert reduce_in_raag(w, full).trivial == all(exponent_sum(w, v) == 0 for v in gens)


def test_power_subgroup():
    assert power_subgroup(P4, 1, parse_word("a b^-1")) == parse_word("a b^-1")
    assert power_subgroup(P4, 3, parse_word("a b^-1")) == parse_word("a^3 b^-3")
    with pytest.raises(DomainError):
        power_subgroup(P4, 0, parse_word("a"))
    rng = random.Random(2)
    for _ in range(40):
        n = rng.randint(2, 6)
        g = graph_from_mask(n, rng.getrandbits(n * (n - 1) // 2))
        p = RaagPresentation(g)
        N = rng.randint(1, 5)
        for u in g.vertices:
            for v in g.vertices:
                if u >= v:
                    continue
                cw = commutator_word(power_subgroup(p, N, letter(u)), power_subgroup(p, N, letter(v)))
                assert reduce_in_raag(cw, p).trivial == g.adjacent(u, v)


def test_evaluate_word_examples(cfg):
    a = catalog.circle_triple_action()
    assert sup_displacement(evaluate_word(a, ()), cfg).value == 0.0
    x = np.linspace(0, 1, 33)
    assert np.allclose(evaluate_word(a, "c").lift(x), a["c"].lift(x))
    assert sup_displacement(evaluate_word(a, commutator_word(letter("a"), letter("c"))), cfg).value > 1e-3


def test_evaluate_is_homomorphism():
    a = catalog.circle_triple_action()
    rng = random.Random(4)
    x = np.linspace(0, 1, 257)
    for _ in range(30):
        u = random_word(rng, list("abc"), rng.randint(0, 6))
        v = random_word(rng, list("abc"), rng.randint(0, 6))
        lhs = evaluate_word(a, concat(u, v)).lift(x)
        rhs = compose(evaluate_word(a, u), evaluate_word(a, v)).lift(x)
        assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_check_action(cfg):
    rep = check_action(catalog.circle_triple_action(), cfg)
    assert rep["relations_hold"] and rep["non_edges_nontrivial"]
    assert [e["pair"] for e in rep["non_edges"]] == [["a", "c"]]
    rots = ActionAssignment.build(P4.graph,
                                  {v: Diffeo(C, Rotation(r)) for v, r in zip("abcd", (0.1, 0.2, 0.3, 0.4))})
    rep = check_action(rots, cfg)
    assert rep["relations_hold"] and not rep["non_edges_nontrivial"]
    rep = check_action(catalog.broken_relation_action(), cfg)
    assert not rep["relations_hold"]
    assert any(e["pair"] == ["b", "d"] and e["result"] == "fail" for e in rep["edges"])


def test_action_validation():
    with pytest.raises(DomainError):
        ActionAssignment.build(P4.graph, {"a": Diffeo(C, Rotation(0.1))})
    with pytest.raises(DomainError):
        ActionAssignment.build(SimplicialGraph(("a", "b")),
                               {"a": Diffeo(C, Rotation(0.1)), "b": Diffeo(I, BumpPush(0.1, 0.2, 0.1))})


def test_action_json_roundtrip():
    a = catalog.chain_action(catalog.dyadic_windows(2))
    b = ActionAssignment.from_json(a.to_json())
    x = np.linspace(0, 1, 65)
    for v in "abcd":
        assert np.allclose(a[v].lift(x), b[v].lift(x))


def test_successive_conjugation():
    assert successive_conjugation([1]) == parse_word("y x y^-1")
    assert length(successive_conjugation([1, 1])) == 7
    for n in range(1, 11):
        assert length(successive_conjugation([1] * n)) == 2 ** (n + 1) - 1


@settings(max_examples=60)
@given(st.lists(st.sampled_from([1, -1]), min_size=1, max_size=8))
def test_successive_conjugation_is_conjugate_of_x(signs):
    w = successive_conjugation(signs)
    assert exponent_sum(w, "x") in (1, -1)
    assert exponent_sum(w, "y") == 0


def _sign_case(gl, gr):
    f = catalog.push_spline([(0.41, 0.59, 0.47, 0.53)])
    k = (gr - gl) / 0.18
    g = Diffeo(I, Spline((0, .41, .59, 1), (0, gl, gr, 1), (1, k, k, 1)))
    return f, g


@pytest.mark.parametrize("gl,gr,case,t", [(0.405, 0.595, 1, 1), (0.3, 0.7, 2, -1), (0.2, 0.8, 3, 1)])
def test_sign_choice_cases(cfg, gl, gr, case, t):
    f, g = _sign_case(gl, gr)
    ch = choose_conjugation_signs(f, g, (0.4, 0.6), (0, 1), cfg)
    assert (ch.case, ch.s, ch.t) == (case, 1, t)
    assert ch.contained
    if case == 3:
        assert ch.image == pytest.approx((0.4, 0.6), abs=cfg.tol.tol_geom)


def test_sign_choice_reverse_push(cfg):
    f = catalog.push_spline([(0.41, 0.59, 0.53, 0.47)])
    _, g = _sign_case(0.3, 0.7)
    ch = choose_conjugation_signs(f, g, (0.4, 0.6), (0, 1), cfg)
    assert ch.s == -1 and ch.contained


def test_sign_choice_identity_g(cfg):
    f = catalog.push_spline([(0.45, 0.55, 0.49, 0.51)])
    ch = choose_conjugation_signs(f, Diffeo.identity(I), (0.4, 0.6), (0.3, 0.7), cfg)
    assert (ch.s, ch.t, ch.case) == (1, 1, 1) and ch.contained


def test_sign_choice_preconditions(cfg):
    f, g = _sign_case(0.3, 0.7)
    with pytest.raises(PreconditionError):
        choose_conjugation_signs(f, g, (0.45, 0.5), (0, 1), cfg)
    with pytest.raises(PreconditionError):
        choose_conjugation_signs(f, g, (0.4, 0.6), (0.35, 0.65), cfg)


def test_nested_lemma(cfg):
    f = catalog.push_spline([(0.21, 0.29, 0.24, 0.26), (0.71, 0.79, 0.74, 0.76)])
    g = catalog.push_spline([(0.05, 0.45, 0.2, 0.3), (0.55, 0.95, 0.7, 0.8)])
    Ys, Zs = [(0.2, 0.3), (0.7, 0.8)], [(0, 0.5), (0.5, 1)]
    r0 = nested_conjugation_lemma(f, g, Ys, Zs, 0, cfg)
    assert r0.passed and r0.word == parse_word("y x y^-1") and r0.y_contained == []
    r1 = nested_conjugation_lemma(f, g, Ys, Zs, 1, cfg)
    assert r1.passed and r1.y_contained == [True]
    r2 = nested_conjugation_lemma(f, g, Ys, Zs, 2, cfg)
    assert r2.passed and r2.y_contained == [True, True] and len(r2.signs) == 4
    with pytest.raises(DomainError):
        nested_conjugation_lemma(f, g, Ys, Zs, 3, cfg)


def test_central_split():
    assert central_split_exponents({}, "abcd") == dict.fromkeys("abcd", 1)
    assert central_split_exponents({("beta", "delta"): 2})["beta"] == 2
    out = central_split_exponents([["beta", "delta", 2], ["beta", "gamma", 3]])
    assert out["beta"] == 6
    with pytest.raises(DomainError):
        central_split_exponents({("a", "b"): 0})
    rng = random.Random(8)
    for _ in range(50):
        rows = {(rng.choice("abcd"), rng.choice("efg")): rng.randint(1, 12) for _ in range(4)}
        out = central_split_exponents(rows)
        for (u, v), n in rows.items():
            assert out[u] % n == 0 and out[v] % n == 0


def test_holder_diagnostic(cfg):
    g = SimplicialGraph.build("ab", [("a", "b")])
    g = SimplicialGraph.build("ab", [("a", "b")])
    rots = ActionAssignment.build(g, {"a": Diffeo(C, Rotation(0.3)), "b": Diffeo(C, Rotation(0.41))})
    rep = holder_diagnostic(rots, 2, cfg)
    assert rep["prediction"] == "abelian" and rep["abelian_verified"]
    rep = holder_diagnostic(catalog.circle_triple_action(), 1, cfg)
    assert rep["prediction"] == "not applicable" and rep["reason"] == "grounded elements present"
    single = ActionAssignment.build(SimplicialGraph(("a",)), {"a": Diffeo(C, Rotation(0.3))})
    assert holder_diagnostic(single, 2, cfg)["abelian_verified"]
    with pytest.raises(DomainError):
        holder_diagnostic(single, 0, cfg)


def test_rationality_diagnostic(cfg):
    rep = rationality_diagnostic(catalog.circle_triple_action(), cfg)
    assert rep["applicable"] and rep["flagged"] == ["a"] and "half-turn" in rep["caveat"]
    path = SimplicialGraph.build("abc", [("a", "b"), ("b", "c")])
    grounded = ActionAssignment.build(path, {"a": Diffeo(C, BumpPush(0.1, 0.3, 0.5)),
                                             "b": Diffeo(C, BumpPush(0.5, 0.7, 0.5)),
                                             "c": Diffeo(C, BumpPush(0.2, 0.4, 0.5))})
    rep = rationality_diagnostic(grounded, cfg)
    assert rep["applicable"] and rep["pass"]
    g = SimplicialGraph.build("ab", [("a", "b")])
    rots = ActionAssignment.build(g, {"a": Diffeo(C, Rotation(0.3)), "b": Diffeo(C, Rotation(math.pi / 7))})
    assert not rationality_diagnostic(rots, cfg)["applicable"]
