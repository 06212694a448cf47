from __future__ import annotations

import math

import numpy as np
import pytest

from loggas.combinatorics import Partition, distinct_arrangements, enumerate_subset
from loggas.ensemble import (
    EnsembleSpec, canonical_partition, eta_form, feasible_populations, gamma_form, grand_partition,
    pairing_tallies, single_species_pfaffian,
)
from loggas.errors import DomainError
from loggas.quadrature import QuadratureSpec
from loggas.wronskian import hermite_family

SQRT_PI = math.sqrt(math.pi)


def selberg_line(gamma: float, a: float, m: int) -> float:
    """Integral of prod |x_i - x_j|^(2 gamma) prod exp(-a x^2) over R^m."""
    out = (2 * a) ** (-m / 2 - gamma * m * (m - 1) / 2) * (2 * math.pi) ** (m / 2)
    for j in range(1, m + 1):
        out *= math.gamma(1 + j * gamma) / math.gamma(1 + gamma)
    return out


def line_closed_form(charge: int, m: int) -> float:
    # single species with U = x^2: |Delta|^(L^2) and weight exp(-L x^2)
    return selberg_line(charge ** 2 / 2, charge, m) / math.factorial(m)


def circle_closed_form(charge: int, m: int) -> float:
    g = charge ** 2 / 2
    return (2 * math.pi) ** m * math.gamma(1 + g * m) / (math.gamma(1 + g) ** m * math.factorial(m))


def close(est, want, rel=1e-9):
    return abs(est.value - want) <= max(rel * abs(want), est.error)


def test_gamma_examples():
    g = gamma_form(EnsembleSpec((1,), (1,)), 0)
    assert g.form.grades() == {1}
    assert g.form.coefficient((1,)) == pytest.approx(SQRT_PI, rel=1e-12)
    g2 = gamma_form(EnsembleSpec((1,), (2,)), 0)
    assert abs(g2.form.coefficient((2,))) < 1e-13
    assert g2.form.coefficient((1,)) == pytest.approx(SQRT_PI, rel=1e-12)


def test_eta_example():
    eta = eta_form(EnsembleSpec((1,), (2,)), 0, 0)
    assert eta.form.grades() == {2}
    assert eta.form.coefficient((1, 2)) == pytest.approx(math.sqrt(2 * math.pi) / 2, rel=1e-11)
    mixed = eta_form(EnsembleSpec((1, 2), (1, 1)), 0, 0)
    assert mixed.form.grades() == {2}


def test_canonical_examples():
    assert canonical_partition(EnsembleSpec((1, 2), (0, 0))).value == 1.0
    assert canonical_partition(EnsembleSpec((1,), (1,))).value == pytest.approx(SQRT_PI, rel=1e-12)
    assert canonical_partition(EnsembleSpec((1,), (2,))).value == pytest.approx(math.sqrt(2 * math.pi) / 2, rel=1e-11)


@pytest.mark.parametrize("charge,m", [(1, 2), (1, 3), (1, 4), (1, 5), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_single_species_line_closed_form(charge, m):
    spec = EnsembleSpec((charge,), (m,))
    want = line_closed_form(charge, m)
    assert close(canonical_partition(spec), want)
    assert close(single_species_pfaffian(spec), want)


def test_known_three_particle_value():
    assert line_closed_form(1, 3) == pytest.approx(0.5553603672697959, rel=1e-14)
    assert canonical_partition(EnsembleSpec((1,), (3,))).value == pytest.approx(0.5553603672697959, rel=1e-10)


def test_beta_normalisation():
    # beta = 4 with unit charge is charge 2 at potential 2 x^2; weight exp(-4 x^2), |Delta|^4
    spec = EnsembleSpec((1,), (2,), beta=4.0)
    want = selberg_line(2.0, 4.0, 2) / 2
    assert close(canonical_partition(spec), want)
    with pytest.raises(DomainError):
        canonical_partition(EnsembleSpec((1,), (2,), beta=2.0))


@pytest.mark.parametrize("charge,m", [(1, 2), (1, 3), (2, 2), (3, 2)])
def test_circle_closed_form(charge, m):
    est = canonical_partition(EnsembleSpec((charge,), (m,), domain="circle"))
    want = circle_closed_form(charge, m)
    assert abs(est.value.imag) <= 1e-9
    assert est.value.real > 0
    assert abs(est.value.real - want) <= 1e-8 * want


def test_circle_two_particles_is_8pi():
    est = canonical_partition(EnsembleSpec((1,), (2,), domain="circle"))
    assert abs(est.value - 8 * math.pi) <= 1e-9 * 8 * math.pi


def test_grand_examples():
    assert grand_partition(EnsembleSpec((1, 2), total_charge=0)).value == 1.0
    z2 = grand_partition(EnsembleSpec((1,), total_charge=2)).value
    assert z2 == pytest.approx(canonical_partition(EnsembleSpec((1,), (2,))).value, rel=1e-13)
    mixed = grand_partition(EnsembleSpec((1, 2), total_charge=2, fugacities=(1, 1))).value
    want = line_closed_form(1, 2) + math.sqrt(math.pi / 2)
    assert mixed == pytest.approx(want, rel=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_grand_is_generating_function(n):
    charges = (1, 2)
    z = (0.7, 1.9)
    total = sum(z[0] ** m1 * z[1] ** m2 * canonical_partition(EnsembleSpec(charges, (m1, m2))).value
                for m1, m2 in feasible_populations(charges, n))
    got = grand_partition(EnsembleSpec(charges, total_charge=n, fugacities=z)).value
    assert got == pytest.approx(total, rel=1e-11)


def test_interpolation_recovers_canonical_values():
    charges = (1, 2)
    ts = np.array([0.5, 0.8, 1.0, 1.3, 1.7])
    zs = [grand_partition(EnsembleSpec(charges, total_charge=4, fugacities=(t, 1.0))).value for t in ts]
    coeffs = np.linalg.solve(np.vander(ts, 5, increasing=True), zs)
    for m1, m2 in feasible_populations(charges, 4):
        assert coeffs[m1] == pytest.approx(canonical_partition(EnsembleSpec(charges, (m1, m2))).value, rel=1e-7)
    assert abs(coeffs[1]) < 1e-7 and abs(coeffs[3]) < 1e-7


@pytest.mark.parametrize("charge,n", [(1, 3), (1, 5), (3, 3), (3, 9)])
def test_odd_extension_conventions_agree(charge, n):
    grand = grand_partition(EnsembleSpec((charge,), total_charge=n))
    pf = single_species_pfaffian(EnsembleSpec((charge,), (n // charge,)))
    assert abs(grand.value - pf.value) <= grand.error + pf.error + 1e-10 * abs(pf.value)


@pytest.mark.parametrize("charges,pops", [((1, 3), (2, 1)), ((1, 3), (1, 2)), ((1, 5), (2, 1)),
                                          ((1, 2, 3), (1, 1, 1)), ((1, 3), (3, 1))])
def test_routes_agree(charges, pops):
    spec = EnsembleSpec(charges, pops)
    a = canonical_partition(spec, route="words")
    b = canonical_partition(spec, route="pairings")
    assert a.value == pytest.approx(b.value, rel=1e-12)
    assert a.value > 0


@pytest.mark.parametrize("charges,pops", [((1, 2), (2, 1)), ((2, 3), (1, 1)), ((1, 2, 3), (1, 1, 1)),
                                          ((2, 4), (1, 1))])
def test_family_invariance(charges, pops):
    spec = EnsembleSpec(charges, pops)
    n = spec.total_charge
    a = canonical_partition(spec)
    b = canonical_partition(spec, family=hermite_family(n))
    assert abs(a.value - b.value) <= 1e-8 * abs(a.value) + a.error + b.error


def test_species_order_does_not_matter():
    a = canonical_partition(EnsembleSpec((1, 2, 3), (1, 1, 1))).value
    b = canonical_partition(EnsembleSpec((3, 1, 2), (1, 1, 1))).value
    assert a == pytest.approx(b, rel=1e-12)


def test_words_match_shuffle_enumeration():
    # distinct words with counts M_j are exactly the shuffles of the partition M
    for counts in [(2, 1), (1, 2, 1), (3, 2), (1, 1, 1)]:
        lam = Partition(counts)
        from_shuffles = set()
        for sigma in enumerate_subset(lam, "shuffle"):
            word = [0] * lam.total
            for j, block in enumerate(lam.blocks()):
                for i in block:
                    word[sigma(i) - 1] = j
            from_shuffles.add(tuple(word))
        assert from_shuffles == set(distinct_arrangements(counts))


def test_pairing_tallies_totals():
    for tally in pairing_tallies({0: 3, 1: 1}):
        used = {0: 0, 1: 0}
        for (a, b), c in tally.counts.items():
            used[a] += c
            used[b] += c
        assert used == {0: 3, 1: 1}
        assert tally.pairs == 2
    assert sum(1 for _ in pairing_tallies({0: 2, 1: 2})) == 4


def test_validation():
    with pytest.raises(DomainError):
        EnsembleSpec((1, 1), (1, 1))
    with pytest.raises(DomainError):
        EnsembleSpec((1, 2), (1, 1), total_charge=4)
    with pytest.raises(DomainError):
        EnsembleSpec((1,))
    with pytest.raises(DomainError):
        EnsembleSpec((1,), (1,), fugacities=(-1,))
    with pytest.raises(DomainError):
        canonical_partition(EnsembleSpec((1,), total_charge=2))
    with pytest.raises(DomainError):
        single_species_pfaffian(EnsembleSpec((1, 2), (1, 1)))
    with pytest.raises(DomainError):
        canonical_partition(EnsembleSpec((1,), (2,), potential=(0, 0, 0, 1)))


def test_quartic_potential_matches_direct_integral():
    spec = EnsembleSpec((2,), (1,), potential=(0, 0, 0.5, 0, 1))
    xs = np.linspace(-6, 6, 20001)
    direct = np.trapezoid(np.exp(-2 * (0.5 * xs ** 2 + xs ** 4)), xs)
    assert canonical_partition(spec, quad=QuadratureSpec()).value == pytest.approx(direct, rel=1e-9)
