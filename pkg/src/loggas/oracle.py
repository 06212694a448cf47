"""Brute-force reference values, with no exterior algebra involved.

``direct_canonical`` integrates |det H| over the whole (truncated) cube.
The cube is cut into the K! cells where the coordinates have a fixed order;
inside a cell |det H| is smooth, so each cell is mapped onto the unit cube
and integrated with a plain tensor Gauss-Legendre rule.  No adaptivity: the
error estimate is the change between two rules of different sizes.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable

import numpy as np

from .combinatorics import Permutation
from .ensemble import EnsembleSpec
from .errors import DomainError, ResourceError
from .quadrature import Estimate, QuadratureSpec, gauss_legendre, support, with_degree
from .wronskian import ConfluentShape, MonicFamily, batched_matrix, monomial_family, permuted_order

PARTICLE_CAP = 4
# per-axis nodes by particle count: cost grows like nodes^K * K!
DEFAULT_NODES = {1: 128, 2: 128, 3: 96, 4: 36}
_PANELS = 4
_CHUNK = 200_000


def unit_rule(nodes: int, panels: int = _PANELS) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [0, 1]."""
    per = max(2, nodes // panels)
    x, w = gauss_legendre(per)
    h = 1.0 / panels
    xs = (np.arange(panels)[:, None] * h + 0.5 * h * (x[None, :] + 1.0)).ravel()
    ws = np.tile(0.5 * h * w, panels)
    return xs, ws


def _simplex_map(u: np.ndarray, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit cube (npts, k) onto a < s_1 < ... < s_k < b, with the Jacobian."""
    s = np.empty_like(u)
    jac = np.ones(u.shape[0])
    lo = np.full(u.shape[0], a)
    for i in range(u.shape[1]):
        width = b - lo
        s[:, i] = lo + width * u[:, i]
        jac *= width
        lo = s[:, i]
    return s, jac


def ordered_tensor_integral(fn: Callable[[np.ndarray], np.ndarray], dims: tuple[int, ...],
                            a: float, b: float, nodes: int) -> complex | float:
    """Integral of fn over a product of ordered simplices, one per entry of ``dims``.

    ``fn`` receives points of shape (npts, sum(dims)), each group sorted
    increasingly, and returns (npts,) values.
    """
    k = sum(dims)
    if k == 0:
        return fn(np.zeros((1, 0)))[0]
    xs, ws = unit_rule(nodes)
    m = xs.size
    total = 0.0
    flat = np.arange(m ** k)
    for start in range(0, flat.size, _CHUNK):
        idx = np.array(np.unravel_index(flat[start:start + _CHUNK], (m,) * k)).T
        u = xs[idx]
        wt = np.prod(ws[idx], axis=1)
        pts = np.empty_like(u)
        col = 0
        for d in dims:
            if d:
                s, jac = _simplex_map(u[:, col:col + d], a, b)
                pts[:, col:col + d] = s
                wt = wt * jac
            col += d
        # pairwise summation through numpy keeps the result order-independent of chunking
        total = total + np.sum(fn(pts) * wt)
    return total


def _estimate(compute: Callable[[int], object], nodes: int) -> Estimate:
    fine = compute(nodes)
    coarse = compute(max(_PANELS * 2, (3 * nodes) // 4))
    return Estimate(fine, abs(fine - coarse))


def _setup(spec: EnsembleSpec, family: MonicFamily | None, quad: QuadratureSpec | None):
    if spec.populations is None:
        raise DomainError("the oracle needs populations")
    s = spec.normalized()
    k = sum(s.populations)
    if k > PARTICLE_CAP:
        raise ResourceError(f"{k} particles exceed the oracle cap of {PARTICLE_CAP}")
    shape = ConfluentShape(s.charges, s.populations)
    family = family or monomial_family(shape.total)
    if family.size != shape.total:
        raise DomainError("family size does not match the total charge")
    quad = with_degree(quad or QuadratureSpec(), 2 * shape.total + 2)
    measures = [s.measure(j) for j in range(s.species) if s.populations[j]]
    a, b, _ = support(measures, quad) if measures else (0.0, 1.0, 0.0)
    return s, shape, family, a, b


def _line_factors(s: EnsembleSpec, pts: np.ndarray) -> np.ndarray:
    u = np.polynomial.polynomial.polyval(pts, s.potential)
    return np.exp(-u)


def direct_canonical(spec: EnsembleSpec, family: MonicFamily | None = None,
                     quad: QuadratureSpec | None = None, nodes: int | None = None) -> Estimate:
    """(1 / prod M_j!) times the integral of |det H| over the truncated cube.

    On the circle the integrand is |det V(e^{ix})| over [0, 2pi)^K.
    """
    s, shape, family, a, b = _setup(spec, family, quad)
    k = sum(s.populations)
    if k == 0:
        return Estimate(1.0, 0.0)
    nodes = nodes or DEFAULT_NODES[k]
    norm = math.prod(math.factorial(m) for m in s.populations)
    circle = s.domain == "circle"

    def integrand(pts: np.ndarray) -> np.ndarray:
        if circle:
            mats = batched_matrix(shape, family, np.exp(1j * pts))
        else:
            mats = batched_matrix(shape, family, pts, factors=_line_factors(s, pts))
        return np.abs(np.linalg.det(mats))

    def compute(n: int):
        total = 0.0
        for cell in itertools.permutations(range(k)):
            inv = np.argsort(cell)

            def in_cell(sorted_pts, inv=inv):
                # particle cell[i] sits at the i-th smallest coordinate
                return integrand(sorted_pts[:, inv])

            total += ordered_tensor_integral(in_cell, (k,), a, b, n)
        return total / norm

    return _estimate(compute, nodes)


def direct_ordered_sector(spec: EnsembleSpec, sigma: Permutation | None, tau: Permutation | None,
                          family: MonicFamily | None = None, quad: QuadratureSpec | None = None,
                          nodes: int | None = None, check_sign: bool = True) -> Estimate:
    """Signed det of the column-permuted H over the sector Delta(sigma) x Delta(tau).

    In the sector y_{sigma^-1(1)} < ... and w_{tau^-1(1)} < ...; the even
    particles y and the odd particles w are numbered species by species.
    With ``check_sign`` a negative integrand value at any node raises.
    """
    s, shape, family, a, b = _setup(spec, family, quad)
    if s.domain != "line":
        raise DomainError("ordered sectors are evaluated on the line only")
    charges = shape.particle_charges
    even = [i for i, c in enumerate(charges) if c % 2 == 0]
    odd = [i for i, c in enumerate(charges) if c % 2]
    sigma = sigma or Permutation.identity(len(even))
    tau = tau or Permutation.identity(len(odd))
    order = permuted_order(shape, sigma, tau)
    k = len(charges)
    if k == 0:
        return Estimate(1.0, 0.0)
    nodes = nodes or DEFAULT_NODES[k]
    # sorted coordinate i of the even group belongs to particle even[sigma^-1(i)]
    slot = np.empty(k, dtype=int)
    si, ti = sigma.inverse(), tau.inverse()
    for i in range(len(even)):
        slot[even[si(i + 1) - 1]] = i
    for i in range(len(odd)):
        slot[odd[ti(i + 1) - 1]] = len(even) + i
    worst = [0.0]

    def integrand(sorted_pts: np.ndarray) -> np.ndarray:
        pts = sorted_pts[:, slot]
        mats = batched_matrix(shape, family, pts, order=order, factors=_line_factors(s, pts))
        vals = np.linalg.det(mats)
        scale = float(np.max(np.abs(vals))) if vals.size else 0.0
        low = float(np.min(vals)) if vals.size else 0.0
        worst[0] = min(worst[0], low / scale if scale else 0.0)
        return vals

    def compute(n: int):
        return ordered_tensor_integral(integrand, (len(even), len(odd)), a, b, n)

    est = _estimate(compute, nodes)
    if check_sign and worst[0] < -1e-9:
        raise ArithmeticError(f"sector integrand negative (relative {worst[0]:.3g})")
    return est


def sector_sum(spec: EnsembleSpec, family: MonicFamily | None = None, quad: QuadratureSpec | None = None,
               nodes: int | None = None) -> Estimate:
    """sum over (sigma, tau) of the ordered sectors, divided by prod M_j!."""
    s = spec.normalized()
    if s.populations is None:
        raise DomainError("the oracle needs populations")
    shape = ConfluentShape(s.charges, s.populations)
    charges = shape.particle_charges
    ke = sum(1 for c in charges if c % 2 == 0)
    ko = len(charges) - ke
    value = 0.0
    error = 0.0
    for se in itertools.permutations(range(1, ke + 1)):
        for so in itertools.permutations(range(1, ko + 1)):
            est = direct_ordered_sector(spec, Permutation(se), Permutation(so), family, quad, nodes)
            value += est.value
            error += est.error
    norm = math.prod(math.factorial(m) for m in s.populations)
    return Estimate(value / norm, error / norm)
