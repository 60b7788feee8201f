import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from onedim import catalog
from onedim.diffeo import (BumpPush, Compose, Diffeo, Inverse, Rotation, SinePerturb, Spline,
                           commutator, compose, conjugate, derivative, diffeo_from_json, evaluate)
from onedim.errors import DomainError, InvariantViolation
from onedim.intervals import Manifold

C, I = Manifold.CIRCLE, Manifold.INTERVAL
EPS = 1 / (8 * math.pi)


def catalog_maps():
    """A spread of circle and interval maps used by several property tests."""
    return {
        "rot": Diffeo(C, Rotation(0.3)),
        "sine": Diffeo(C, SinePerturb(2, EPS)),
        "bump": Diffeo(C, BumpPush(0.7, 1.2, 0.5)),
        "mixed": Diffeo(C, Compose((Rotation(0.21), SinePerturb(3, 0.02), BumpPush(0.1, 0.4, -0.3)))),
        "spline": catalog.push_spline([(0.1, 0.5, 0.3, 0.4), (0.6, 0.9, 0.7, 0.65)]),
        "ibump": Diffeo(I, BumpPush(0.2, 0.6, 0.7)),
        "inv": Diffeo(I, Inverse(Compose((BumpPush(0.2, 0.6, 0.7), BumpPush(0.5, 0.8, -0.4))))),
    }


def test_evaluate_examples():
    assert evaluate(Diffeo(C, Rotation(0.5)), 0.75) == pytest.approx(0.25)
    assert evaluate(Diffeo(C, SinePerturb(2, EPS)), 0.0) == 0.0
    f = Diffeo(C, SinePerturb(2, EPS))
    h = Diffeo(C, Compose((f.expr, Inverse(f.expr))))
    xs = np.linspace(0, 1, 101)
    assert np.max(np.abs(h.lift(xs) - xs)) < 1e-10


def test_derivative_examples():
    assert derivative(Diffeo(C, Rotation(0.2)), 0.4) == 1.0
    assert derivative(Diffeo(C, SinePerturb(2, EPS)), 0.0) == pytest.approx(1.5)


@pytest.mark.parametrize("name", list(catalog_maps()))
def test_derivative_matches_finite_differences(name):
    f = catalog_maps()[name]
    rng = np.random.default_rng(1)
    xs = rng.uniform(0.01, 0.99, 100)
    h = 1e-6
    fd = (f.lift(xs + h) - f.lift(xs - h)) / (2 * h)
    d = f.derivative(xs)
    assert np.all(np.abs(fd - d) / d < 1e-5)


def test_chain_rule():
    f, g = catalog_maps()["sine"], catalog_maps()["bump"]
    fg = compose(f, g)
    xs = np.linspace(0, 1, 50)
    assert np.allclose(fg.derivative(xs), f.derivative(g.lift(xs)) * g.derivative(xs))


@pytest.mark.parametrize("name", list(catalog_maps()))
def test_inverse_roundtrip(name):
    f = catalog_maps()[name]
    xs = np.linspace(0, 1, 257)
    assert np.max(np.abs(f.inverse().lift(f.lift(xs)) - xs)) < 1e-11


def test_circle_lift_commutes_with_deck():
    for name in ("rot", "sine", "bump", "mixed"):
        f = catalog_maps()[name]
        xs = np.linspace(0, 1, 33)
        assert np.allclose(f.lift(xs + 1), f.lift(xs) + 1)


def test_validation():
    with pytest.raises(DomainError):
        Diffeo(I, Rotation(0.1))
    with pytest.raises(DomainError):
        SinePerturb(1, 0.2)
    with pytest.raises(DomainError):
        BumpPush(0.2, 0.4, 1.0)
    with pytest.raises(DomainError):
        Diffeo(I, Spline((0, 0.5, 1), (0, 0.5, 0.9), (1, 1, 1)))
    with pytest.raises(DomainError):
        Diffeo(C, Spline((0, 0.5, 1), (0, 0.6, 1), (1, 1, 2)))


def test_spline_monotone_clamping():
    s = Spline((0, 0.5, 1), (0, 0.1, 1), (5, 5, 5))
    assert s.clamped
    xs = np.linspace(0, 1, 2001)
    assert np.all(np.diff(s.lift(xs)) > 0)
    assert np.all(s.dlift(xs) > 0)


def test_commutator_and_conjugate():
    f = catalog_maps()["sine"]
    e = commutator(f, Diffeo.identity(C))
    xs = np.linspace(0, 1, 50)
    assert np.max(np.abs(e.lift(xs) - xs)) < 1e-9
    r = commutator(Diffeo(C, Rotation(0.1)), Diffeo(C, Rotation(0.37)))
    assert np.max(np.abs(r.lift(xs) - xs)) < 1e-12
    with pytest.raises(DomainError):
        commutator(f, catalog_maps()["ibump"])
    g = catalog_maps()["bump"]
    h = conjugate(g, f)
    assert np.allclose(h.lift(g.lift(xs)), g.lift(f.lift(xs)))


def test_nonpositive_derivative_detected():
    # an invalid leaf slipped past validation must still be caught at evaluation
    bad = Diffeo(C, Compose((SinePerturb(1, 0.1),)), check=False)
    object.__setattr__(bad.atoms[0][0], "eps", 0.2)
    with pytest.raises(InvariantViolation):
        bad.derivative(np.array([0.5]))


def test_json_roundtrip():
    for f in catalog_maps().values():
        g = diffeo_from_json(f.to_json())
        xs = np.linspace(0, 1, 41)
        assert np.allclose(g.lift(xs), f.lift(xs))
        assert g.manifold is f.manifold


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(0.0, 0.9), st.floats(0.05, 0.3), st.floats(-0.9, 0.9)),
                min_size=1, max_size=4), st.floats(0, 1))
def test_random_bump_compositions_invert(blocks, x):
    parts = tuple(BumpPush(p, min(p + w, 1.0), s) for p, w, s in blocks if min(p + w, 1.0) > p)
    f = Diffeo(I, Compose(parts))
    y = f.lift(np.array([x]))
    assert abs(f.inverse().lift(y)[0] - x) < 1e-10
    assert f.derivative(np.array([x]))[0] > 0
