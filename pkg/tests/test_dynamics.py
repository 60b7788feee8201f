import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from onedim import catalog
from onedim.diffeo import BumpPush, Compose, Diffeo, Inverse, Rotation, SinePerturb, commutator, conjugate
from onedim.dynamics import (derivative_variation, fixed_set, is_grounded, periodic_points,
                             rotation_number, sup_displacement, support)
from onedim.errors import DomainError
from onedim.intervals import IntervalSet, Manifold

C, I = Manifold.CIRCLE, Manifold.INTERVAL
EPS = 1 / (8 * math.pi)
SINE = Diffeo(C, SinePerturb(2, EPS))


def circle_catalog():
    return [
        Diffeo(C, Rotation(0.3)),
        Diffeo(C, Rotation(math.pi / 3)),
        SINE,
        Diffeo(C, BumpPush(0.7, 1.2, 0.5)),
        Diffeo(C, Compose((Rotation(0.21), SinePerturb(3, 0.02)))),
        Diffeo(C, Compose((Rotation(0.4), BumpPush(0.1, 0.3, 0.6)))),
        Diffeo(C, Compose((Rotation(0.5), SinePerturb(2, 0.03)))),
    ]


def test_fixed_set_examples(cfg):
    fs = fixed_set(SINE, cfg)
    assert not fs.intervals
    assert np.allclose(sorted(fs.points), [0, 0.25, 0.5, 0.75], atol=1e-11)
    assert fixed_set(Diffeo(C, Rotation(0.3)), cfg).is_empty()
    assert fixed_set(Diffeo.identity(C), cfg).whole
    ends = fixed_set(Diffeo(I, BumpPush(0.2, 0.6, 0.5)), cfg)
    for e in (0.0, 1.0):
        assert e in ends.points or any(a <= e <= b for a, b in ends.intervals)
    assert np.allclose(ends.intervals, [(0, 0.2), (0.6, 1)], atol=1e-11)


def test_support_examples(cfg):
    s = support(SINE, cfg)
    comps = sorted(s.components())
    assert len(comps) == 4
    assert np.allclose(comps, [(0, .25), (.25, .5), (.5, .75), (.75, 1)], atol=1e-11)
    assert support(Diffeo.identity(C), cfg).is_empty()
    assert support(Diffeo.identity(I), cfg).is_empty()


def test_support_of_inverse_is_identical(cfg):
    for f in circle_catalog() + [catalog.push_spline([(0.1, 0.5, 0.3, 0.4)])]:
        assert support(f, cfg).components() == support(f.inverse(), cfg).components()


def test_rotation_examples(cfg):
    r = rotation_number(Diffeo(C, Rotation(0.5)), cfg)
    assert r.rational and r.value == pytest.approx(0.5)
    r = rotation_number(Diffeo(C, Rotation(math.pi / 3)), cfg)
    assert not r.rational
    assert r.value == pytest.approx(math.pi / 3 - 1, abs=1e-7)
    r = rotation_number(SINE, cfg)
    assert r.rational and r.grounded and r.value == 0.0
    with pytest.raises(DomainError):
        rotation_number(Diffeo(I, BumpPush(0.1, 0.2, 0.3)), cfg)


def test_rotation_number_of_perturbed_rotation_is_rational(cfg):
    # rotation by 1/2 composed with a sine perturbation still has period-2 orbits
    r = rotation_number(Diffeo(C, Compose((Rotation(0.5), SinePerturb(2, 0.03)))), cfg)
    assert r.rational and r.fraction == (1, 2)


def test_grounded(cfg):
    assert is_grounded(Diffeo(I, BumpPush(0.1, 0.9, 0.9)), cfg)
    assert is_grounded(Diffeo.identity(I), cfg)
    assert not is_grounded(Diffeo(C, Rotation(0.3)), cfg)
    assert is_grounded(SINE, cfg)


def test_periodic_points(cfg):
    per = periodic_points(Diffeo(C, Rotation(1 / 3)), 3, cfg)
    assert len(per) == 1 and per[0]["period"] == 3 and "interval" in per[0]
    assert periodic_points(Diffeo(C, Rotation(math.pi / 3)), 32, cfg) == []
    per = periodic_points(SINE, 5, cfg)
    assert sorted(round(p["point"], 9) for p in per) == [0, 0.25, 0.5, 0.75]
    assert all(p["period"] == 1 for p in per)
    with pytest.raises(DomainError):
        periodic_points(SINE, 0, cfg)


def test_variation(cfg):
    assert derivative_variation(Diffeo(C, Rotation(0.2)), cfg).value == 0.0
    v = derivative_variation(SINE, cfg)
    assert v.converged and v.value == pytest.approx(4.0, abs=1e-4)
    assert list(v.history) == sorted(v.history)
    s = derivative_variation(catalog.push_spline([(0.1, 0.5, 0.3, 0.4)]), cfg)
    assert s.converged and math.isfinite(s.value)


def test_sup_displacement(cfg):
    assert sup_displacement(Diffeo.identity(C), cfg).value == 0.0
    d = sup_displacement(Diffeo(C, Rotation(0.5)), cfg)
    assert d.value == pytest.approx(0.5) and d.status == "nontrivial"
    a = Diffeo(C, Rotation(math.pi / 3))
    assert sup_displacement(commutator(a, SINE), cfg).value > 1e-3
    tiny = Diffeo(C, Rotation(1e-5))
    assert sup_displacement(tiny, cfg).indeterminate


@pytest.mark.parametrize("n", [2, 3, 5])
def test_rotation_of_powers(cfg, n):
    for f in circle_catalog():
        r = rotation_number(f, cfg).value
        rn = rotation_number(f.power(n), cfg).value
        d = (rn - n * r) % 1.0
        assert min(d, 1 - d) < 1e-6


def test_conjugacy_invariance(cfg):
    hs = [SINE, Diffeo(C, BumpPush(0.3, 0.9, -0.4)), Diffeo(C, Compose((Rotation(0.17), SinePerturb(1, 0.1))))]
    for f in circle_catalog():
        r = rotation_number(f, cfg).value
        for h in hs:
            d = (rotation_number(conjugate(h, f), cfg).value - r) % 1.0
            assert min(d, 1 - d) < 1e-6


def test_grounded_iff_zero_rotation(cfg):
    for f in circle_catalog():
        r = rotation_number(f, cfg).value
        assert is_grounded(f, cfg) == (min(r, 1 - r) < cfg.tol.tol_rot)


def test_fixed_set_of_conjugate(cfg):
    f = SINE
    g = Diffeo(C, Compose((Rotation(0.13), BumpPush(0.2, 0.7, 0.5))))
    want = sorted(float(g.lift(np.array([p]))[0] % 1.0) for p in fixed_set(f, cfg).points)
    got = sorted(fixed_set(conjugate(g, f), cfg).points)
    assert np.allclose(got, want, atol=cfg.tol.tol_geom)


def test_conjugate_support_is_image(cfg):
    f = Diffeo(I, BumpPush(0.2, 0.5, 0.6))
    g = catalog.push_spline([(0.1, 0.8, 0.3, 0.6)])
    got = support(conjugate(g, f), cfg)
    want = support(f, cfg).image(lambda x: float(g.lift(np.array([x]))[0]))
    assert got.hausdorff(want) < cfg.tol.tol_geom


def test_derivative_one_at_accumulation_of_fixed_points():
    # pushes on (1/2 + 2^-k-1, 1/2 + 2^-k) with strengths tending to 0: a C^1 map whose
    # fixed points accumulate at 1/2
    parts = tuple(BumpPush(0.5 + 2.0 ** -(k + 1), 0.5 + 2.0 ** -k, 0.8 / k) for k in range(2, 30))
    f = Diffeo(I, Compose(parts))
    assert f.derivative(np.array([0.5]))[0] == pytest.approx(1.0, abs=1e-4)
    near = 0.5 + np.linspace(1e-9, 2.0 ** -25, 200)
    assert np.max(np.abs(f.derivative(near) - 1)) < 0.05


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 0.8), st.floats(0.05, 0.2), st.floats(-0.9, 0.9).filter(lambda s: abs(s) > 0.05),
       st.floats(0.0, 1.0))
def test_bump_support_is_its_interval(p, w, s, r):
    sup = support(Diffeo(I, BumpPush(p, p + w, s)))
    assert sup.hausdorff(IntervalSet(I, ((p, p + w),))) < 1e-8
    g = Diffeo(C, Compose((Rotation(r), BumpPush(p, p + w, s), Inverse(Rotation(r)))))
    assert len(support(g).components()) == 1
