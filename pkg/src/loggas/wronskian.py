"""Modified derivatives, modified Wronskians and confluent Vandermonde matrices.

Polynomials are coefficient tuples in increasing powers.  Evaluation is plain
Horner arithmetic, so the same code accepts floats, complex numbers, numpy
arrays, ``Fraction`` and sympy symbols.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .combinatorics import IncreasingFunction, Permutation, increasing_functions
from .errors import DomainError

Poly = tuple


def poly_eval(p: Sequence, x):
    acc = 0 * x if isinstance(x, np.ndarray) else 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def modified_derivative(p: Sequence, order: int) -> Poly:
    """(1/l!) d^l p / dx^l, exactly: x^k maps to binom(k, l) x^(k-l)."""
    if order < 0:
        raise DomainError("derivative order must be non-negative")
    return tuple(c * math.comb(k, order) for k, c in enumerate(p) if k >= order)


def _degree(p: Sequence) -> int:
    d = len(p) - 1
    while d >= 0 and p[d] == 0:
        d -= 1
    return d


@dataclass(frozen=True)
class MonicFamily:
    """Complete N-family: p_n monic of degree n - 1 for n = 1..N."""

    polys: tuple[Poly, ...]
    kind: str = "custom"

    def __post_init__(self):
        polys = tuple(tuple(p) for p in self.polys)
        object.__setattr__(self, "polys", polys)
        for n, p in enumerate(polys, start=1):
            if _degree(p) != n - 1 or p[n - 1] != 1:
                raise DomainError(f"member {n} is not monic of degree {n - 1}: {p}")

    @property
    def size(self) -> int:
        return len(self.polys)

    @lru_cache(maxsize=None)
    def derivative_table(self, orders: int) -> tuple[tuple[Poly, ...], ...]:
        """table[l][n-1] = D^l p_n for l < orders."""
        return tuple(tuple(modified_derivative(p, l) for p in self.polys) for l in range(orders))

    def evaluate_table(self, x, orders: int) -> np.ndarray:
        """Array of shape (orders, N) + shape(x) holding D^l p_n(x)."""
        x = np.asarray(x)
        table = self.derivative_table(orders)
        out = np.empty((orders, self.size) + x.shape, dtype=np.result_type(x.dtype, float))
        for l, row in enumerate(table):
            for n, p in enumerate(row):
                out[l, n] = poly_eval(p, x) if p else 0
        return out


def monomial_family(n: int) -> MonicFamily:
    return MonicFamily(tuple(tuple([0] * k + [1]) for k in range(n)), kind="monomial")


def hermite_family(n: int) -> MonicFamily:
    """Monic probabilists' Hermite polynomials He_0 .. He_{n-1}."""
    polys: list[list[int]] = []
    for k in range(n):
        if k == 0:
            polys.append([1])
        elif k == 1:
            polys.append([0, 1])
        else:
            prev, prev2 = polys[k - 1], polys[k - 2]
            nxt = [0] + prev
            for i, c in enumerate(prev2):
                nxt[i] -= (k - 1) * c
            polys.append(nxt)
    return MonicFamily(tuple(tuple(p) for p in polys), kind="hermite")


def make_family(kind: str, n: int) -> MonicFamily:
    if kind == "monomial":
        return monomial_family(n)
    if kind == "hermite":
        return hermite_family(n)
    raise DomainError(f"unknown family {kind!r}")


def wronskian_of(polys: Sequence[Sequence], x):
    """det[D^(l-1) p_k(x)] for arbitrary polynomials, evaluated exactly by Bareiss."""
    rows = [[poly_eval(modified_derivative(p, l), x) for l in range(len(polys))] for p in polys]
    return determinant(rows, exact=True)


def wronskian_eval(family: MonicFamily, t: IncreasingFunction | Sequence[int], x):
    """det[D^(l-1) p_{t(k)}(x)] for k, l = 1..L."""
    rows = list(t)
    if rows and max(rows) > family.size:
        raise DomainError("increasing function selects beyond the family")
    size = len(rows)
    if size == 0:
        return np.ones_like(np.asarray(x, dtype=float)) if np.ndim(x) else 1.0
    table = family.evaluate_table(x, size)
    sel = table[:, [r - 1 for r in rows]]  # (l, k, ...)
    mats = np.moveaxis(sel, (0, 1), (-1, -2))  # (..., k, l)
    return np.linalg.det(mats)


def wronskian_table(family: MonicFamily, order: int, x) -> tuple[list[IncreasingFunction], np.ndarray]:
    """All Wronskians of size ``order`` at points x: (functions, array (n_t, len(x)))."""
    x = np.atleast_1d(np.asarray(x))
    ts = increasing_functions(order, family.size)
    if order == 0:
        return ts, np.ones((1, x.size), dtype=np.result_type(x.dtype, float))
    table = family.evaluate_table(x, order)  # (l, n, nx)
    idx = np.array([[r - 1 for r in t] for t in ts])  # (n_t, k)
    sel = table[:, idx]  # (l, n_t, k, nx)
    mats = np.transpose(sel, (1, 3, 2, 0))  # (n_t, nx, k, l)
    return ts, np.linalg.det(mats)


@dataclass(frozen=True)
class ConfluentShape:
    """Charges L_j (distinct, positive) with populations M_j (non-negative)."""

    charges: tuple[int, ...]
    populations: tuple[int, ...]

    def __post_init__(self):
        ch = tuple(int(c) for c in self.charges)
        po = tuple(int(m) for m in self.populations)
        object.__setattr__(self, "charges", ch)
        object.__setattr__(self, "populations", po)
        if len(ch) != len(po):
            raise DomainError("charges and populations differ in length")
        if any(c < 1 for c in ch) or len(set(ch)) != len(ch):
            raise DomainError(f"charges must be distinct positive integers, got {ch}")
        if any(m < 0 for m in po):
            raise DomainError(f"populations must be non-negative, got {po}")

    @property
    def total(self) -> int:
        return sum(c * m for c, m in zip(self.charges, self.populations))

    @property
    def particle_charges(self) -> tuple[int, ...]:
        """Charge of each particle, species by species."""
        return tuple(c for c, m in zip(self.charges, self.populations) for _ in range(m))

    @property
    def particle_species(self) -> tuple[int, ...]:
        return tuple(j for j, m in enumerate(self.populations) for _ in range(m))


def _flatten_locations(shape: ConfluentShape, locations) -> list:
    locs = [list(v) for v in locations]
    if len(locs) != len(shape.charges):
        raise DomainError(f"expected locations for {len(shape.charges)} species, got {len(locs)}")
    for j, (v, m) in enumerate(zip(locs, shape.populations)):
        if len(v) != m:
            raise DomainError(f"species {j + 1} needs {m} locations, got {len(v)}")
    return [x for v in locs for x in v]


def _columns(family: MonicFamily, charge: int, x, factor=1) -> list[list]:
    """The N x charge block [D^l p_n(x)] as a list of rows."""
    table = family.derivative_table(charge)
    return [[poly_eval(table[l][n], x) * factor if table[l][n] else 0 * factor for l in range(charge)]
            for n in range(family.size)]


def _weight_factor(potential, beta, x, exact: bool):
    if potential is None:
        return 1
    u = potential(x) if callable(potential) else poly_eval(potential, x)
    if exact:
        raise DomainError("weighted matrices are not available in exact mode")
    return np.exp(-beta * u)


def _assemble(blocks: list[list[list]], exact: bool) -> np.ndarray:
    rows = [sum((b[n] for b in blocks), []) for n in range(len(blocks[0]))] if blocks else []
    if exact:
        return np.array(rows, dtype=object).reshape(len(rows), len(rows))
    arr = np.array(rows)
    return arr.reshape(len(rows), len(rows))


def vandermonde_matrix(shape: ConfluentShape, family: MonicFamily, locations,
                       potential=None, beta: float = 1.0, exact: bool = False) -> np.ndarray:
    """Confluent Vandermonde matrix V, or the weighted H when ``potential`` is given.

    Each particle of charge L contributes L consecutive columns
    D^0 p(x), ..., D^(L-1) p(x).  With a potential U every one of those
    columns is scaled by exp(-beta U(x)), so the determinant picks up
    exp(-beta L U(x)) per particle.
    """
    if family.size != shape.total:
        raise DomainError(f"family of size {family.size} for total charge {shape.total}")
    xs = _flatten_locations(shape, locations)
    blocks = [_columns(family, c, x, _weight_factor(potential, beta, x, exact))
              for c, x in zip(shape.particle_charges, xs)]
    return _assemble(blocks, exact)


def vandermonde_product(shape: ConfluentShape, locations):
    """Closed form of det V: differences raised to charge products, later minus earlier."""
    xs = _flatten_locations(shape, locations)
    charges = shape.particle_charges
    out = 1
    for b in range(len(xs)):
        for a in range(b):
            out = out * (xs[b] - xs[a]) ** (charges[a] * charges[b])
    return out


def parity_split(shape: ConfluentShape) -> tuple[list[int], list[int]]:
    """Indices (into the flattened particle list) of even- and odd-charge particles."""
    charges = shape.particle_charges
    even = [i for i, c in enumerate(charges) if c % 2 == 0]
    odd = [i for i, c in enumerate(charges) if c % 2]
    return even, odd


def permuted_order(shape: ConfluentShape, sigma: Permutation | None, tau: Permutation | None) -> list[int]:
    """Particle order of the column-permuted matrix: even particles y by sigma^-1, then odd w by tau^-1."""
    even, odd = parity_split(shape)
    sigma = sigma or Permutation.identity(len(even))
    tau = tau or Permutation.identity(len(odd))
    if sigma.n != len(even) or tau.n != len(odd):
        raise DomainError(f"need permutations of sizes {len(even)} and {len(odd)}")
    si, ti = sigma.inverse(), tau.inverse()
    return [even[si(i) - 1] for i in range(1, len(even) + 1)] + [odd[ti(i) - 1] for i in range(1, len(odd) + 1)]


def permuted_matrix(shape: ConfluentShape, family: MonicFamily, locations,
                    sigma: Permutation | None = None, tau: Permutation | None = None,
                    potential=None, beta: float = 1.0, exact: bool = False) -> np.ndarray:
    """Columns regrouped in whole particle blocks: evens in sigma^-1 order, then odds in tau^-1 order.

    Moving an even block never changes the determinant, so
    det(permuted) = sgn(tau) det V.
    """
    if family.size != shape.total:
        raise DomainError(f"family of size {family.size} for total charge {shape.total}")
    xs = _flatten_locations(shape, locations)
    charges = shape.particle_charges
    blocks = [_columns(family, charges[i], xs[i], _weight_factor(potential, beta, xs[i], exact))
              for i in permuted_order(shape, sigma, tau)]
    return _assemble(blocks, exact)


def batched_matrix(shape: ConfluentShape, family: MonicFamily, points: np.ndarray,
                   order: Sequence[int] | None = None, factors: np.ndarray | None = None) -> np.ndarray:
    """Stack of matrices for many location vectors at once.

    ``points`` has shape (npts, K) with particles in species order; ``order``
    selects the particle order of the column blocks; ``factors`` (npts, K)
    scales every column of a particle's block.
    """
    points = np.asarray(points)
    npts, k = points.shape
    charges = shape.particle_charges
    order = list(range(k)) if order is None else list(order)
    top = max(charges) if charges else 0
    table = family.evaluate_table(points, top)  # (l, n, npts, K)
    dtype = table.dtype if factors is None else np.result_type(table.dtype, np.asarray(factors).dtype)
    out = np.empty((npts, family.size, family.size), dtype=dtype)
    col = 0
    for i in order:
        for l in range(charges[i]):
            c = table[l, :, :, i].T  # (npts, n)
            out[:, :, col] = c if factors is None else c * factors[:, i, None]
            col += 1
    return out


def _exact_div(num, den):
    """Bareiss divisions are exact; keep ints as ints and simplify symbolic quotients."""
    if den == 1:
        return num
    if isinstance(num, int) and isinstance(den, int):
        return num // den
    q = num / den
    cancel = getattr(q, "cancel", None)
    return cancel() if cancel else q


def determinant(matrix, exact: bool = False):
    """LU determinant in floating mode, fraction-free Bareiss in exact mode."""
    if not exact:
        return np.linalg.det(np.asarray(matrix))
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = _exact_div(num, prev)
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def potential_callable(potential) -> Callable:
    if callable(potential):
        return potential
    coeffs = tuple(potential)
    return lambda x: poly_eval(coeffs, x)
