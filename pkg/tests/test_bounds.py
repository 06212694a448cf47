from __future__ import annotations

import itertools

import numpy as np
from hypothesis import given, settings, strategies as st

from loggas.bounds import Bounded, FormEstimate, attach, power
from loggas.exterior import Multivector, volume_tail


def two_form(rng, dim):
    masks = [(1 << i) | (1 << j) for i, j in itertools.combinations(range(dim), 2)]
    return Multivector(dim, {m: float(rng.standard_normal()) for m in masks})


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_volume_error_encloses_perturbation(seed):
    # perturb every coefficient within its stated error; the result stays inside the bound
    rng = np.random.default_rng(seed)
    dim = 6
    w = two_form(rng, dim)
    err = w.map(lambda c: 1e-3 * abs(c) + 1e-4)
    est = power(Bounded.of(FormEstimate(w, err)), 3).volume()
    for _ in range(10):
        shaken = Multivector(dim, {m: c + rng.uniform(-1, 1) * err.terms[m] for m, c in w.terms.items()})
        moved = power(Bounded.of(FormEstimate(shaken, err)), 3).value.terms.get((1 << dim) - 1, 0.0)
        assert abs(moved - est.value) <= est.error


def test_exact_inputs_give_rounding_only():
    w = Multivector.basis((1, 2), 2, 3.0)
    est = Bounded.of(FormEstimate(w, Multivector(2))).volume()
    assert est.value == 3.0
    assert est.error <= 1e-13


def test_exp_matches_power_sum():
    rng = np.random.default_rng(0)
    w = two_form(rng, 4)
    b = Bounded.of(FormEstimate(w, w.map(lambda c: 1e-6)))
    total = Bounded.unit(4) + power(b, 1) + power(b, 2)
    assert np.isclose(b.exp().volume().value, total.volume().value)
    assert np.isclose(b.exp().volume().error, total.volume().error)


def test_attach_keeps_errors_unsigned():
    g = Multivector.basis((2,), 3, 2.0) + Multivector.basis((1,), 3, -1.0)
    err = g.map(lambda c: 0.1)
    est = attach(FormEstimate(g.embed(4), err.embed(4)), volume_tail(3, 1))
    assert all(v > 0 for v in est.error.terms.values())
    assert est.form.coefficient((2, 4)) == 2.0
