"""Partition functions of multicomponent log-gases as Berezin integrals.

All integrals are pushed into a small number of forms:

* gamma_j, the L_j-form of one-particle integrals of Wronskians,
* eta_{j,k}, the (L_j + L_k)-form of ordered two-particle integrals,

after which everything is exterior algebra.  Every entry point returns an
``Estimate``; bounds are propagated by evaluating the same wedge expression
on coefficient magnitudes with all signs set to +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .combinatorics import distinct_arrangements, increasing_functions
from .errors import DomainError
from .exterior import Multivector, volume_tail, wedge
from .quadrature import (Estimate, Measure, QuadratureSpec, integrate_1d, integrate_ordered_pair,
                         with_degree)
from .bounds import Bounded, FormEstimate, attach, power
from .wronskian import MonicFamily, monomial_family, wronskian_table

DOMAINS = ("line", "circle")


@dataclass(frozen=True)
class EnsembleSpec:
    """Charges, populations or total charge, fugacities, potential and beta.

    ``potential`` lists the coefficients of U in increasing powers (line
    only).  Species indices are 0-based positions in ``charges``.
    """

    charges: tuple
    populations: tuple | None = None
    total_charge: int | None = None
    fugacities: tuple | None = None
    potential: tuple = (0.0, 0.0, 1.0)
    beta: float = 1.0
    domain: str = "line"

    def __post_init__(self):
        ch = tuple(int(c) for c in self.charges)
        object.__setattr__(self, "charges", ch)
        if not ch:
            raise DomainError("at least one species is required")
        if any(c < 1 for c in ch) or len(set(ch)) != len(ch):
            raise DomainError(f"charges must be distinct positive integers, got {ch}")
        if self.populations is not None:
            po = tuple(int(m) for m in self.populations)
            object.__setattr__(self, "populations", po)
            if len(po) != len(ch) or any(m < 0 for m in po):
                raise DomainError(f"populations {po} do not fit charges {ch}")
            n = sum(c * m for c, m in zip(ch, po))
            if self.total_charge is not None and int(self.total_charge) != n:
                raise DomainError(f"populations give total charge {n}, not {self.total_charge}")
            object.__setattr__(self, "total_charge", n)
        elif self.total_charge is None:
            raise DomainError("give populations or a total charge")
        else:
            object.__setattr__(self, "total_charge", int(self.total_charge))
            if self.total_charge < 0:
                raise DomainError("total charge must be non-negative")
        if self.fugacities is not None:
            z = tuple(float(v) for v in self.fugacities)
            object.__setattr__(self, "fugacities", z)
            if len(z) != len(ch) or any(not v > 0 for v in z):
                raise DomainError(f"fugacities must be {len(ch)} positive reals, got {z}")
        if self.domain not in DOMAINS:
            raise DomainError(f"domain must be one of {DOMAINS}, got {self.domain!r}")
        if not self.beta > 0:
            raise DomainError("beta must be positive")
        object.__setattr__(self, "potential", tuple(float(c) for c in self.potential))

    @property
    def species(self) -> int:
        return len(self.charges)

    def normalized(self) -> "EnsembleSpec":
        """Equivalent spec with beta = 1: charges and potential scaled by sqrt(beta)."""
        if self.beta == 1:
            return self
        b = math.sqrt(self.beta)
        scaled = []
        for c in self.charges:
            v = b * c
            if abs(v - round(v)) > 1e-9 * max(1.0, v):
                raise DomainError(f"sqrt(beta) * charge = {v} is not an integer; beta={self.beta} unsupported")
            scaled.append(int(round(v)))
        total = None if self.populations is not None else int(round(b * self.total_charge))
        if self.populations is None and abs(b * self.total_charge - total) > 1e-9 * max(1, total):
            raise DomainError("sqrt(beta) * total charge is not an integer")
        return replace(self, charges=tuple(scaled), total_charge=total,
                       potential=tuple(b * c for c in self.potential), beta=1.0)

    def measure(self, j: int) -> Measure:
        """Measure of species j in a normalized spec."""
        if self.domain == "line":
            return Measure.line(self.potential, scale=float(self.charges[j]))
        t = self.total_charge - self.charges[j]
        return Measure.circle(exponent=self.charges[j] * t / 2)


@dataclass
class _Context:
    spec: EnsembleSpec
    family: MonicFamily
    quad: QuadratureSpec
    cache: dict = field(default_factory=dict)


def _prepare(spec: EnsembleSpec, family: MonicFamily | None, quad: QuadratureSpec | None) -> _Context:
    spec = spec.normalized()
    n = spec.total_charge
    family = family or monomial_family(n)
    if family.size != n:
        raise DomainError(f"family has {family.size} members but the total charge is {n}")
    quad = with_degree(quad or QuadratureSpec(), 2 * n + 2)
    return _Context(spec, family, quad)


def _wronskians(ctx: _Context, order: int):
    ts = increasing_functions(order, ctx.family.size)
    circle = ctx.spec.domain == "circle"

    def table(x):
        pts = np.exp(1j * x) if circle else x
        return wronskian_table(ctx.family, order, pts)[1]

    return ts, table


def _gamma(ctx: _Context, j: int, ambient: int) -> FormEstimate:
    key = ("gamma", j)
    if key not in ctx.cache:
        order = ctx.spec.charges[j]
        ts, table = _wronskians(ctx, order)
        est = integrate_1d(table, ctx.spec.measure(j), ctx.quad)
        ctx.cache[key] = (ts, np.atleast_1d(est.value), np.atleast_1d(est.error))
    ts, vals, errs = ctx.cache[key]
    form = Multivector(ambient, {t.mask: v for t, v in zip(ts, vals)})
    err = Multivector(ambient, {t.mask: e for t, e in zip(ts, errs)})
    return FormEstimate(form, err)


def _eta(ctx: _Context, j: int, k: int, ambient: int) -> FormEstimate:
    key = ("eta", j, k)
    if key not in ctx.cache:
        ts, f = _wronskians(ctx, ctx.spec.charges[j])
        ss, g = _wronskians(ctx, ctx.spec.charges[k])
        est = integrate_ordered_pair(f, g, ctx.spec.measure(j), ctx.spec.measure(k), ctx.quad)
        vals = np.asarray(est.value).reshape(len(ts), len(ss))
        errs = np.asarray(est.error).reshape(len(ts), len(ss))
        form = Multivector(ctx.family.size)
        err = Multivector(ctx.family.size)
        n = ctx.family.size
        for a, t in enumerate(ts):
            for b, s in enumerate(ss):
                if t.mask & s.mask:
                    continue
                et = Multivector(n, {t.mask: 1})
                es = Multivector(n, {s.mask: 1})
                form = form + wedge(et, es) * vals[a, b]
                err = err + Multivector(n, {t.mask | s.mask: errs[a, b]})
        ctx.cache[key] = (form, err)
    form, err = ctx.cache[key]
    return FormEstimate(form.embed(ambient), err.embed(ambient))


def gamma_form(spec: EnsembleSpec, j: int, family: MonicFamily | None = None,
               quad: QuadratureSpec | None = None, ambient: int | None = None) -> FormEstimate:
    """gamma_j = sum over t of (integral of Wr(p_t, x) dmu_j) eps_t, with per-coefficient errors."""
    ctx = _prepare(spec, family, quad)
    ambient = ctx.spec.total_charge if ambient is None else ambient
    if ctx.spec.charges[j] > ctx.spec.total_charge:
        raise DomainError(f"charge {ctx.spec.charges[j]} exceeds total charge {ctx.spec.total_charge}")
    return _gamma(ctx, j, ambient)


def eta_form(spec: EnsembleSpec, j: int, k: int, family: MonicFamily | None = None,
             quad: QuadratureSpec | None = None, ambient: int | None = None) -> FormEstimate:
    """eta_{j,k}: ordered pair integrals of Wronskian products, wedged as eps_t ^ eps_s."""
    ctx = _prepare(spec, family, quad)
    ambient = ctx.spec.total_charge if ambient is None else ambient
    if ctx.spec.charges[j] + ctx.spec.charges[k] > ctx.spec.total_charge:
        raise DomainError("charges of the pair exceed the total charge")
    return _eta(ctx, j, k, ambient)


# error-carrying evaluation ----------------------------------------------------

def _split(spec: EnsembleSpec) -> tuple[list[int], list[int]]:
    even = [j for j, c in enumerate(spec.charges) if c % 2 == 0]
    odd = [j for j, c in enumerate(spec.charges) if c % 2]
    return even, odd


class PairingTally(NamedTuple):
    """How often each ordered species pair (j, k) is paired; ``pairs`` = total."""

    counts: dict
    pairs: int


def pairing_tallies(multiplicities: dict[int, int]) -> Iterator[PairingTally]:
    """All arrays of ordered-pair counts using species j exactly multiplicities[j] times."""
    keys = sorted(multiplicities)
    cells = [(a, b) for a in keys for b in keys]

    def rec(i: int, left: dict, acc: dict):
        if i == len(cells):
            if all(v == 0 for v in left.values()):
                yield PairingTally(dict(acc), sum(acc.values()))
            return
        a, b = cells[i]
        top = left[a] // 2 if a == b else min(left[a], left[b])
        for c in range(top + 1):
            left[a] -= c
            left[b] -= c
            if c:
                acc[(a, b)] = c
            yield from rec(i + 1, left, acc)
            acc.pop((a, b), None)
            left[a] += c
            left[b] += c

    yield from rec(0, dict(multiplicities), {})


def _odd_words(ctx: _Context, odd_pops: dict[int, int], ambient: int, odd_total: bool) -> Bounded:
    """Sum over distinct words of odd-species letters of the paired eta wedge.

    Consecutive letters (w1, w2), (w3, w4), ... contribute eta_{w1, w2}, ...;
    with an odd number of odd particles the last letter contributes
    gamma_last ^ eps_{N+1}.  Each word is weighted by 1 / (number of pairs)!.
    """
    species = sorted(odd_pops)
    counts = [odd_pops[j] for j in species]
    total = sum(counts)
    pairs = total // 2
    n = ctx.spec.total_charge
    extra = volume_tail(n, 1).embed(ambient) if odd_total else None
    etas = {}
    out = None
    for word in distinct_arrangements(counts):
        letters = [species[i] for i in word]
        acc = Bounded.unit(ambient)
        for p in range(pairs):
            key = (letters[2 * p], letters[2 * p + 1])
            if key not in etas:
                etas[key] = Bounded.of(_eta(ctx, key[0], key[1], ambient))
            acc = acc ^ etas[key]
        if odd_total:
            g = _gamma(ctx, letters[-1], ambient)
            acc = acc ^ Bounded.of(attach(g, extra))
        out = acc if out is None else out + acc
    return out.scaled(1.0 / math.factorial(pairs))


def _odd_pairings(ctx: _Context, odd_pops: dict[int, int], ambient: int, odd_total: bool) -> Bounded:
    """Same quantity grouped by pair-count patterns, each weighted by prod 1 / count!."""
    n = ctx.spec.total_charge
    lasts = [j for j in sorted(odd_pops) if odd_pops[j] > 0] if odd_total else [None]
    out = None
    for last in lasts:
        pops = dict(odd_pops)
        head = Bounded.unit(ambient)
        if last is not None:
            pops[last] -= 1
            g = _gamma(ctx, last, ambient)
            extra = volume_tail(n, 1).embed(ambient)
            head = Bounded.of(attach(g, extra))
        for tally in pairing_tallies(pops):
            acc = head
            for (a, b), c in sorted(tally.counts.items()):
                acc = acc ^ power(Bounded.of(_eta(ctx, a, b, ambient)), c)
            out = acc if out is None else out + acc
    return out


def canonical_partition(spec: EnsembleSpec, family: MonicFamily | None = None,
                        quad: QuadratureSpec | None = None, route: str = "words") -> Estimate:
    """Z_M from the wedge expression; ``route`` is "words" or "pairings" (equal by construction)."""
    if spec.populations is None:
        raise DomainError("canonical partition needs populations")
    if route not in ("words", "pairings"):
        raise DomainError(f"unknown route {route!r}")
    ctx = _prepare(spec, family, quad)
    s = ctx.spec
    n = s.total_charge
    if n == 0:
        return Estimate(1.0, 0.0)
    even, odd = _split(s)
    odd_pops = {j: s.populations[j] for j in odd if s.populations[j] > 0}
    k_odd = sum(odd_pops.values())
    odd_total = n % 2 == 1
    if odd_total != (k_odd % 2 == 1):
        raise DomainError("parity of odd-charge particles inconsistent with total charge")
    ambient = n + 1 if odd_total else n
    acc = Bounded.unit(ambient)
    for j in even:
        if s.populations[j]:
            acc = acc ^ power(Bounded.of(_gamma(ctx, j, ambient)), s.populations[j])
    if odd_pops:
        builder = _odd_words if route == "words" else _odd_pairings
        acc = acc ^ builder(ctx, odd_pops, ambient, odd_total)
    return acc.volume()


def grand_partition(spec: EnsembleSpec, family: MonicFamily | None = None,
                    quad: QuadratureSpec | None = None) -> Estimate:
    """Isocharge Z_N as the Berezin integral of exp(omega).

    omega = sum_even z_j gamma_j + sum_{odd j, k} z_j z_k eta_{j,k}, plus
    sum_odd z_j gamma_j ^ eps_{N+1} in dimension N + 1 when N is odd.
    """
    ctx = _prepare(spec, family, quad)
    s = ctx.spec
    n = s.total_charge
    if n == 0:
        return Estimate(1.0, 0.0)
    z = s.fugacities or (1.0,) * s.species
    even, odd = _split(s)
    odd_total = n % 2 == 1
    ambient = n + 1 if odd_total else n
    omega = Bounded.zero(ambient)
    for j in even:
        if s.charges[j] <= n:
            omega = omega + Bounded.of(_gamma(ctx, j, ambient), z[j])
    for j in odd:
        for k in odd:
            if s.charges[j] + s.charges[k] <= n:
                omega = omega + Bounded.of(_eta(ctx, j, k, ambient), z[j] * z[k])
    if odd_total:
        extra = volume_tail(n, 1).embed(ambient)
        for j in odd:
            if s.charges[j] <= n:
                g = _gamma(ctx, j, ambient)
                tail = attach(g, extra)
                omega = omega + Bounded.of(tail, z[j])
    return omega.exp().volume()


def single_species_pfaffian(spec: EnsembleSpec, family: MonicFamily | None = None,
                            quad: QuadratureSpec | None = None) -> Estimate:
    """One species: PF(gamma) for L even, PF(eta) for L odd and N even,
    PF(eta + gamma ^ xi_L) in dimension N + L for L and N odd."""
    if spec.species != 1:
        raise DomainError("single-species formula needs exactly one species")
    if spec.populations is None:
        raise DomainError("single-species formula needs the population")
    ctx = _prepare(spec, family, quad)
    s = ctx.spec
    (charge,) = s.charges
    n = s.total_charge
    if n == 0:
        return Estimate(1.0, 0.0)
    if charge % 2 == 0:
        omega = Bounded.of(_gamma(ctx, 0, n))
        count = n // charge
    elif n % 2 == 0:
        omega = Bounded.of(_eta(ctx, 0, 0, n))
        count = n // (2 * charge)
    else:
        ambient = n + charge
        xi = volume_tail(n, charge)
        g = _gamma(ctx, 0, ambient)
        omega = Bounded.of(attach(g, xi))
        if n >= 2 * charge:
            omega = Bounded.of(_eta(ctx, 0, 0, ambient)) + omega
        count = ambient // (2 * charge)
    return power(omega, count).volume()


def feasible_populations(charges: Sequence[int], total: int) -> list[tuple[int, ...]]:
    """All M with L . M = total."""
    out: list[tuple[int, ...]] = []

    def rec(i: int, left: int, acc: list[int]):
        if i == len(charges):
            if left == 0:
                out.append(tuple(acc))
            return
        for m in range(left // charges[i] + 1):
            acc.append(m)
            rec(i + 1, left - m * charges[i], acc)
            acc.pop()

    rec(0, total, [])
    return out
