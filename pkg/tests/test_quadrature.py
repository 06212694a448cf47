from __future__ import annotations

import itertools
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loggas.errors import DomainError, QuadratureError, ResourceError
from loggas.quadrature import (
    CompositeGrid, Measure, QuadratureSpec, cumulative_matrix, integrate_1d, integrate_ordered_pair,
    integrate_simplex, profile, support,
)

GAUSS = Measure.line()
UNIT = Measure.interval(0.0, 1.0)
SPEC = QuadratureSpec()
one = lambda x: np.ones_like(x)


def poly(coeffs):
    return lambda x: np.polynomial.polynomial.polyval(x, coeffs)


def test_gaussian_normalisation():
    est = integrate_1d(one, GAUSS, SPEC)
    assert est.value == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    assert est.error <= 1e-10
    assert math.erf(1.0) * math.sqrt(math.pi) == pytest.approx(integrate_1d(one, Measure.interval(-1, 1, lambda x: np.exp(-x * x))).value)


def test_circle_length():
    assert integrate_1d(one, Measure.circle(), SPEC).value == pytest.approx(2 * math.pi, rel=1e-14)


def test_circle_weight_is_unit_modulus():
    mu = Measure.circle(1.5)
    xs = np.linspace(0, 2 * math.pi, 17)
    assert np.allclose(np.abs(mu(xs)), 1.0)
    # (-i e^{-ix})^2 = -e^{-2ix} integrates to zero over the circle
    assert abs(integrate_1d(one, Measure.circle(2), SPEC).value) < 1e-12


def test_odd_integrand_vanishes():
    assert abs(integrate_1d(poly((0, 1, 0, 3)), GAUSS, SPEC).value) < 1e-12


def test_vector_integrand():
    est = integrate_1d(lambda x: np.stack([one(x), x ** 2]), GAUSS, SPEC)
    assert est.value == pytest.approx([math.sqrt(math.pi), math.sqrt(math.pi) / 2], rel=1e-12)


def test_ordered_pair_examples():
    assert integrate_ordered_pair(one, one, UNIT, UNIT, SPEC).value == pytest.approx(0.5, abs=1e-14)
    assert integrate_ordered_pair(one, lambda y: y, UNIT, UNIT, SPEC).value == pytest.approx(1 / 3, abs=1e-14)
    full = integrate_1d(one, GAUSS, SPEC).value
    assert integrate_ordered_pair(one, one, GAUSS, GAUSS, SPEC).value == pytest.approx(full ** 2 / 2, rel=1e-12)


def test_ordered_pair_matrix():
    f = lambda x: np.stack([one(x), x])
    g = lambda y: np.stack([one(y), y, y * y])
    est = integrate_ordered_pair(f, g, UNIT, UNIT, SPEC)
    # integral of x^i y^j over x < y on the unit square is 1 / ((i + 1)(i + j + 2))
    want = [[1 / ((i + 1) * (i + j + 2)) for j in range(3)] for i in range(2)]
    assert est.value.shape == (2, 3)
    assert np.allclose(est.value, want, atol=1e-14)


def test_simplex_examples():
    assert integrate_simplex([], UNIT, SPEC).value == 1.0
    f = poly((1, 0, 2))
    assert integrate_simplex([f], GAUSS, SPEC).value == pytest.approx(integrate_1d(f, GAUSS, SPEC).value)
    assert integrate_simplex([one] * 3, UNIT, SPEC).value == pytest.approx(1 / 6, abs=1e-14)
    with pytest.raises(ResourceError):
        integrate_simplex([one] * 7, UNIT, SPEC)


def test_simplex_orderings_sum_to_product():
    fs = [poly((1, 1)), poly((0.5, 0, 1)), poly((2, -1, 0, 0.3))]
    product = math.prod(integrate_1d(f, GAUSS, SPEC).value for f in fs)
    total = sum(integrate_simplex([fs[i] for i in p], GAUSS, SPEC).value for p in itertools.permutations(range(3)))
    assert total == pytest.approx(product, rel=6 * SPEC.tol_rel)


def test_cumulative_matrix_exact_on_polynomials():
    n = 8
    x = np.polynomial.legendre.leggauss(n)[0]
    c = cumulative_matrix(n)
    # antiderivative of x^5 from -1 is (x^6 - 1) / 6
    assert np.allclose(c @ x ** 5, (x ** 6 - 1) / 6, atol=1e-14)


def test_composite_grid_cumulative():
    grid = CompositeGrid(0.0, 2.0, 3, 6)
    vals = np.cos(grid.x)
    assert np.allclose(grid.cumulative(vals), np.sin(grid.x), atol=1e-6)
    assert grid.integral(vals) == pytest.approx(math.sin(2.0), abs=1e-6)


def test_spectral_accuracy_is_tight():
    grid = CompositeGrid(0.0, 2.0, 4, 16)
    assert np.max(np.abs(grid.cumulative(np.cos(grid.x)) - np.sin(grid.x))) < 1e-14


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=5), st.lists(st.floats(-2, 2), min_size=1, max_size=5),
       st.floats(0.5, 3.0))
def test_fubini_split(fc, gc, scale):
    mu = Measure.line(scale=scale)
    f, g = poly(fc), poly(gc)
    fg = integrate_ordered_pair(f, g, mu, mu, SPEC)
    gf = integrate_ordered_pair(g, f, mu, mu, SPEC)
    If, Ig = integrate_1d(f, mu, SPEC), integrate_1d(g, mu, SPEC)
    prod = If.value * Ig.value
    bound = fg.error + gf.error + abs(If.value) * Ig.error + abs(Ig.value) * If.error
    tol = 2 * (bound + SPEC.tolerance(prod))
    assert abs(fg.value + gf.value - prod) <= tol


@pytest.mark.parametrize("degree", [0, 4, 8, 12])
def test_truncation_doubling(degree):
    f = lambda x: x ** degree
    est = integrate_1d(f, GAUSS, SPEC)
    a, b, _ = support([GAUSS], SPEC)
    wider = integrate_1d(f, GAUSS, replace(SPEC, t_cut=2 * b))
    assert abs(est.value - wider.value) <= est.error + wider.error
    exact = math.gamma((degree + 1) / 2)
    assert est.value == pytest.approx(exact, rel=1e-10)


def test_support_scales_with_weight():
    a1, b1, _ = support([Measure.line(scale=1.0)], SPEC)
    a4, b4, _ = support([Measure.line(scale=4.0)], SPEC)
    assert b4 < b1 and a1 == -b1
    assert support([Measure.circle()], SPEC)[:2] == (0.0, 2 * math.pi)
    with pytest.raises(DomainError):
        support([GAUSS, UNIT], SPEC)


def test_measure_validation():
    for bad in [(0, 1), (0, 0, -1), (0, 0, 0, 1)]:
        with pytest.raises(DomainError):
            Measure.line(bad)
    Measure.line((1, 0, -1, 0, 1))
    with pytest.raises(DomainError):
        Measure.interval(1.0, 0.0)
    with pytest.raises(DomainError):
        QuadratureSpec(tol_abs=0)
    with pytest.raises(DomainError):
        QuadratureSpec(nodes=1)


def test_non_convergence_carries_estimate():
    spec = QuadratureSpec(nodes=2, max_depth=2, tol_abs=1e-14, tol_rel=1e-14)
    with pytest.raises(QuadratureError) as info:
        integrate_1d(lambda x: np.sqrt(np.abs(x)), Measure.interval(-1, 1), spec)
    assert info.value.estimate == pytest.approx(4 / 3, rel=1e-2)
    assert info.value.error > 0


def test_profiles(monkeypatch):
    assert profile("fast").tol_rel > profile("paranoid").tol_rel
    monkeypatch.setenv("LOGGAS_QUAD_PROFILE", "paranoid")
    assert profile() == profile("paranoid")
    with pytest.raises(DomainError):
        profile("sloppy")
