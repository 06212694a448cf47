"""Weighted Gauss-Legendre quadrature on the line, the circle and finite intervals.

Three entry points:

* ``integrate_1d``: adaptive panels, each estimated with n and 2n nodes.
* ``integrate_ordered_pair``: the region x < y as an outer integral of an
  inner cumulative integral.
* ``integrate_simplex``: a < x_1 < ... < x_k < b by repeated cumulative
  integration on a composite grid.

Every result is an ``Estimate`` (value, error).  The error includes the
truncation tail for the line.
"""

from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np
from numpy.polynomial import legendre

from .errors import DomainError, QuadratureError, ResourceError

SIMPLEX_CAP = 6
TWO_PI = 2.0 * math.pi


class Estimate(NamedTuple):
    value: object
    error: object


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy targets and discretisation knobs.

    ``degree`` is the polynomial degree assumed when choosing the line
    truncation; callers integrating higher-degree integrands raise it.
    """

    tol_abs: float = 1e-12
    tol_rel: float = 1e-11
    nodes: int = 16
    max_depth: int = 12
    t_cut: float | None = None
    degree: int = 12

    def __post_init__(self):
        if not (self.tol_abs > 0 and self.tol_rel > 0):
            raise DomainError("tolerances must be positive")
        if self.nodes < 2:
            raise DomainError("need at least 2 nodes per panel")
        if self.max_depth < 1:
            raise DomainError("max_depth must be at least 1")
        if self.t_cut is not None and not self.t_cut > 0:
            raise DomainError("t_cut must be positive")

    def tolerance(self, value) -> np.ndarray:
        return np.maximum(self.tol_abs, self.tol_rel * np.abs(value))


PROFILES = {
    "fast": QuadratureSpec(tol_abs=1e-9, tol_rel=1e-9, nodes=12, max_depth=9),
    "default": QuadratureSpec(),
    "paranoid": QuadratureSpec(tol_abs=1e-14, tol_rel=1e-13, nodes=24, max_depth=14),
}

PROFILE_ENV = "LOGGAS_QUAD_PROFILE"


def profile(name: str | None = None) -> QuadratureSpec:
    """Named preset; without a name, read LOGGAS_QUAD_PROFILE (default "default")."""
    name = name or os.environ.get(PROFILE_ENV) or "default"
    if name not in PROFILES:
        raise DomainError(f"unknown quadrature profile {name!r}; choose from {sorted(PROFILES)}")
    return PROFILES[name]


def _check_potential(coeffs: tuple) -> None:
    deg = len(coeffs) - 1
    while deg >= 0 and coeffs[deg] == 0:
        deg -= 1
    if deg < 2 or deg % 2 or coeffs[deg] <= 0:
        raise DomainError(
            f"potential {coeffs} must be a polynomial of even degree >= 2 with positive leading coefficient")


@dataclass(frozen=True)
class Measure:
    """A weight on the real line, the circle [0, 2pi) or a finite interval.

    Line: w(x) = exp(-scale * U(x)) with U a polynomial (increasing
    coefficients).  Circle: w(x) = (-i e^{-ix})^exponent taken with the
    continuous phase exp(-i * exponent * (x + pi/2)).  Interval: an optional
    callable weight on [a, b], default 1.
    """

    domain: str
    potential: tuple = ()
    scale: float = 1.0
    exponent: float = 0.0
    bounds: tuple = (0.0, 1.0)
    weight: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.domain == "line":
            object.__setattr__(self, "potential", tuple(float(c) for c in self.potential))
            _check_potential(self.potential)
            if not self.scale > 0:
                raise DomainError("line weight scale must be positive")
        elif self.domain == "interval":
            a, b = self.bounds
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise DomainError(f"bad interval {self.bounds}")
        elif self.domain != "circle":
            raise DomainError(f"unknown domain {self.domain!r}")

    @classmethod
    def line(cls, potential=(0.0, 0.0, 1.0), scale: float = 1.0) -> "Measure":
        return cls("line", potential=tuple(potential), scale=scale)

    @classmethod
    def circle(cls, exponent: float = 0.0) -> "Measure":
        return cls("circle", exponent=exponent)

    @classmethod
    def interval(cls, a: float = 0.0, b: float = 1.0, weight: Callable | None = None) -> "Measure":
        return cls("interval", bounds=(float(a), float(b)), weight=weight)

    @property
    def is_complex(self) -> bool:
        return self.domain == "circle" and self.exponent != 0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.domain == "line":
            u = np.polynomial.polynomial.polyval(x, self.potential)
            return np.exp(-self.scale * u)
        if self.domain == "circle":
            if self.exponent == 0:
                return np.ones_like(x)
            return np.exp(-1j * self.exponent * (x + math.pi / 2))
        if self.weight is None:
            return np.ones_like(x)
        return np.asarray(self.weight(x)) * np.ones_like(x)

    def envelope(self, x, degree: int):
        return np.abs(self(x)) * (1.0 + np.abs(x)) ** degree


def support(measures: Sequence[Measure], spec: QuadratureSpec) -> tuple[float, float, float]:
    """Common integration interval (a, b) and a bound on the discarded tails.

    For the line the half-width is the first T (scanning outward) beyond
    which weight * (1 + |x|)^degree stays below tol_abs / 10 at both ends.
    """
    domains = {m.domain for m in measures}
    if len(domains) != 1:
        raise DomainError(f"measures mix domains {sorted(domains)}")
    (domain,) = domains
    if domain == "circle":
        return 0.0, TWO_PI, 0.0
    if domain == "interval":
        bounds = {m.bounds for m in measures}
        if len(bounds) != 1:
            raise DomainError("interval measures with different bounds")
        a, b = bounds.pop()
        return a, b, 0.0
    target = spec.tol_abs / 10
    if spec.t_cut is not None:
        t = spec.t_cut
    else:
        t = 1.0
        grid = np.linspace(0.0, 1.0, 33)
        while True:
            # check the envelope on [t, 2t] so a bump just beyond t is not missed
            xs = t * (1.0 + grid)
            env = max(float(np.max(m.envelope(s * xs, spec.degree))) for m in measures for s in (-1, 1))
            if env < target:
                break
            t *= 1.25
            if t > 1e4:
                raise QuadratureError("weight does not decay fast enough to truncate", None, math.inf)
    edge = max(float(m.envelope(s * t, spec.degree)) for m in measures for s in (-1, 1))
    # tails beyond t: the envelope decays at least exponentially there, so unit length is a fair bound
    return -t, t, 2.0 * edge * max(1.0, t / max(spec.degree, 1))


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return legendre.leggauss(n)


@lru_cache(maxsize=None)
def cumulative_matrix(n: int) -> np.ndarray:
    """C with (C @ f)[i] = integral over [-1, x_i] of the degree n-1 interpolant of f."""
    x, _ = gauss_legendre(n)
    vander = legendre.legvander(x, n - 1)
    integ = np.empty((n, n))
    for k in range(n):
        unit = np.zeros(n)
        unit[k] = 1.0
        integ[:, k] = legendre.legval(x, legendre.legint(unit, lbnd=-1))
    return integ @ np.linalg.inv(vander)


def _col_shape(values: np.ndarray, nx: int) -> np.ndarray:
    values = np.asarray(values)
    if values.shape == ():
        values = np.full(nx, values)
    if values.shape[-1] != nx:
        values = np.broadcast_to(values, values.shape[:-1] + (nx,))
    return values


# adaptive 1-D -----------------------------------------------------------------

def _panel(f, measure, a, b, n):
    x1, w1 = gauss_legendre(n)
    x2, w2 = gauss_legendre(2 * n)
    h = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    xs = np.concatenate([mid + h * x1, mid + h * x2])
    vals = _col_shape(f(xs), xs.size) * measure(xs)
    low = h * (vals[..., :n] @ w1)
    high = h * (vals[..., n:] @ w2)
    return high, np.abs(high - low)


def integrate_1d(f: Callable, measure: Measure, spec: QuadratureSpec | None = None) -> Estimate:
    """Integral of f against the measure; f may return an array of shape (m, len(x)).

    Panels are split where the n-node and 2n-node estimates disagree most,
    until every component meets max(tol_abs, tol_rel |I|).
    """
    spec = spec or QuadratureSpec()
    a, b, tail = support([measure], spec)
    initial = 4 if measure.domain != "interval" else 1
    edges = np.linspace(a, b, initial + 1)
    heap = []
    total = 0
    err = 0
    for i in range(initial):
        val, e = _panel(f, measure, edges[i], edges[i + 1], spec.nodes)
        heap.append((-float(np.max(e)), i, 0, edges[i], edges[i + 1], val, e))
        total = total + val
        err = err + e
    heapq.heapify(heap)
    counter = initial
    while True:
        if np.all(err + tail <= spec.tolerance(total)):
            return Estimate(total, err + tail)
        worst = heap[0]
        if worst[2] >= spec.max_depth:
            raise QuadratureError(
                f"integrate_1d did not converge within depth {spec.max_depth}", total, err + tail)
        heapq.heappop(heap)
        _, _, depth, lo, hi, val, e = worst
        total = total - val
        err = err - e
        mid = 0.5 * (lo + hi)
        for l, r in ((lo, mid), (mid, hi)):
            v, ee = _panel(f, measure, l, r, spec.nodes)
            counter += 1
            heapq.heappush(heap, (-float(np.max(ee)), counter, depth + 1, l, r, v, ee))
            total = total + v
            err = err + ee
        # re-accumulate occasionally to keep the running sums honest
        if counter % 64 == 0:
            total = sum(item[5] for item in heap)
            err = sum(item[6] for item in heap)


# composite grid ---------------------------------------------------------------

class CompositeGrid:
    """Equal panels on [a, b] with n Gauss-Legendre nodes each and a spectral antiderivative."""

    def __init__(self, a: float, b: float, panels: int, nodes: int):
        x, w = gauss_legendre(nodes)
        self.a, self.b = a, b
        self.panels, self.nodes = panels, nodes
        self.h = (b - a) / panels
        starts = a + self.h * np.arange(panels)
        self.x = (starts[:, None] + 0.5 * self.h * (x[None, :] + 1.0)).ravel()
        self.w = np.tile(0.5 * self.h * w, panels)
        self._cum = 0.5 * self.h * cumulative_matrix(nodes)

    @property
    def size(self) -> int:
        return self.x.size

    def integral(self, values: np.ndarray):
        return values @ self.w

    def cumulative(self, values: np.ndarray) -> np.ndarray:
        """Values of x -> integral from a to x, at every node; leading axes are batched."""
        values = np.asarray(values)
        lead = values.shape[:-1]
        v = values.reshape(lead + (self.panels, self.nodes))
        inside = v @ self._cum.T
        panel_totals = v @ self.w[: self.nodes]
        offsets = np.cumsum(panel_totals, axis=-1) - panel_totals
        return (inside + offsets[..., None]).reshape(values.shape)


def refine_composite(compute: Callable[[CompositeGrid], object], a: float, b: float, tail: float,
            spec: QuadratureSpec, start: int) -> Estimate:
    """Double the panel count until two successive grids agree."""
    nodes = spec.nodes
    prev = compute(CompositeGrid(a, b, start, nodes))
    panels = start
    for _ in range(spec.max_depth):
        panels *= 2
        cur = compute(CompositeGrid(a, b, panels, nodes))
        diff = np.abs(np.asarray(cur) - np.asarray(prev)) + tail
        if np.all(diff <= spec.tolerance(cur)):
            return Estimate(cur, diff)
        prev = cur
    raise QuadratureError(f"composite quadrature did not converge after {spec.max_depth} doublings", cur, diff)


def start_panels(a: float, b: float, domain: str) -> int:
    if domain == "interval":
        return 1
    return max(4, int(math.ceil((b - a) / 2.0)))


def integrate_ordered_pair(f: Callable, g: Callable, mu_x: Measure, mu_y: Measure,
                           spec: QuadratureSpec | None = None) -> Estimate:
    """Integral of f(x) g(y) over x < y.

    When f returns shape (m, nx) and g shape (q, nx) the result is the
    (m, q) matrix of all pairings.
    """
    spec = spec or QuadratureSpec()
    a, b, tail = support([mu_x, mu_y], spec)
    scalar = []

    def compute(grid: CompositeGrid):
        fx = _col_shape(f(grid.x), grid.size) * mu_x(grid.x)
        gy = _col_shape(g(grid.x), grid.size) * mu_y(grid.x) * grid.w
        scalar[:] = [fx.ndim == 1 and gy.ndim == 1]
        inner = grid.cumulative(np.atleast_2d(fx))
        return inner @ np.atleast_2d(gy).T

    est = refine_composite(compute, a, b, tail, spec, start_panels(a, b, mu_x.domain))
    if scalar[0]:
        return Estimate(est.value[0, 0], est.error[0, 0])
    return est


def integrate_simplex(fs: Sequence[Callable], measures: Sequence[Measure] | Measure,
                      spec: QuadratureSpec | None = None, cap: int = SIMPLEX_CAP) -> Estimate:
    """Integral of f_1(x_1)...f_k(x_k) over a < x_1 < ... < x_k < b."""
    spec = spec or QuadratureSpec()
    k = len(fs)
    if k > cap:
        raise ResourceError(f"simplex of dimension {k} exceeds cap {cap}")
    if k == 0:
        return Estimate(1.0, 0.0)
    if isinstance(measures, Measure):
        measures = [measures] * k
    if len(measures) != k:
        raise DomainError("need one measure per function")
    if k == 1:
        return integrate_1d(fs[0], measures[0], spec)
    a, b, tail = support(measures, spec)

    def compute(grid: CompositeGrid):
        acc = None
        for fn, mu in zip(fs, measures):
            vals = _col_shape(fn(grid.x), grid.size) * mu(grid.x)
            acc = vals if acc is None else grid.cumulative(acc) * vals
        return grid.integral(acc)

    return refine_composite(compute, a, b, k * tail, spec, start_panels(a, b, measures[0].domain))


def with_degree(spec: QuadratureSpec, degree: int) -> QuadratureSpec:
    return spec if degree <= spec.degree else replace(spec, degree=degree)
