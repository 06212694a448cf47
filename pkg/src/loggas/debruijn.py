"""Ordered integrals of block-structured determinants and their Berezin forms.

B is an N x N matrix whose columns come in J blocks; block j has L_j
columns, all functions of one variable x_j.  Two quantities are compared:

* the ordered integral of det B over x_1 < ... < x_J (``debruijn_lhs``),
* the Berezin integral of a wedge of block forms (``debruijn_rhs``)

    gamma_j = sum_t (integral of det B_t(x_j)) eps_t,
    eta_{j,k} = sum_{t,s} (ordered integral of det B_t(x_j) det B_s(x_k)) eps_t ^ eps_s,

where B_t(x_j) is the L_j x L_j minor on rows t of block j.  The wedge
expression is evaluated exactly as stated; ``identity_holds`` reports the
block families for which it equals the ordered integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import Bounded, FormEstimate, attach, power
from .combinatorics import increasing_functions
from .errors import DomainError
from .exterior import Multivector, merge_sign, volume_tail
from .oracle import ordered_tensor_integral
from .quadrature import (CompositeGrid, Estimate, Measure, QuadratureSpec, integrate_1d,
                         integrate_ordered_pair, refine_composite, start_panels, support, with_degree)
from .wronskian import poly_eval

Entry = object  # coefficient tuple or vectorized callable


def _evaluate(entry, x: np.ndarray) -> np.ndarray:
    if callable(entry):
        return np.asarray(entry(x)) * np.ones_like(x)
    return poly_eval(tuple(entry), x) + 0.0 * x


@dataclass(frozen=True)
class BlockMatrixSpec:
    """Blocks of columns; ``blocks[j][n][l]`` is row n, column l of block j.

    Entries are polynomial coefficient tuples (increasing powers) or
    vectorized callables.  Every variable is integrated against ``measure``.
    """

    blocks: tuple
    measure: Measure

    def __post_init__(self):
        blocks = tuple(tuple(tuple(row) for row in block) for block in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise DomainError("need at least one block")
        n = sum(len(block[0]) if block else 0 for block in blocks)
        for j, block in enumerate(blocks):
            if len(block) != n:
                raise DomainError(f"block {j + 1} has {len(block)} rows, expected N={n}")
            widths = {len(row) for row in block}
            if len(widths) != 1 or widths == {0}:
                raise DomainError(f"block {j + 1} rows have inconsistent or zero width")

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(block[0]) for block in self.blocks)

    @property
    def size(self) -> int:
        return sum(self.lengths)

    def block_values(self, j: int, x) -> np.ndarray:
        """Array (N, L_j) + shape(x) of block j's entries."""
        x = np.asarray(x, dtype=float)
        block = self.blocks[j]
        return np.array([[_evaluate(e, x) for e in row] for row in block])

    def minors(self, j: int, x) -> tuple[list, np.ndarray]:
        """All L_j x L_j row minors of block j: (increasing functions, array (n_t, len(x)))."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        vals = self.block_values(j, x)  # (N, L, nx)
        ts = increasing_functions(self.lengths[j], self.size)
        idx = np.array([[r - 1 for r in t] for t in ts])
        mats = np.transpose(vals[idx], (0, 3, 1, 2))  # (n_t, nx, L, L)
        return ts, np.linalg.det(mats)

    def matrix(self, xs: Sequence[float]) -> np.ndarray:
        """B at one point x = (x_1, ..., x_J)."""
        cols = [self.block_values(j, np.float64(x)) for j, x in enumerate(xs)]
        return np.concatenate(cols, axis=1)

    def reordered(self, order: Sequence[int]) -> "BlockMatrixSpec":
        return BlockMatrixSpec(tuple(self.blocks[j] for j in order), self.measure)


def _quad(spec: BlockMatrixSpec, quad: QuadratureSpec | None) -> QuadratureSpec:
    return with_degree(quad or QuadratureSpec(), 4 * spec.size + 4)


def _forms_gamma(spec: BlockMatrixSpec, j: int, ambient: int, quad: QuadratureSpec) -> FormEstimate:
    ts, _ = spec.minors(j, np.zeros(1))
    est = integrate_1d(lambda x: spec.minors(j, x)[1], spec.measure, quad)
    vals, errs = np.atleast_1d(est.value), np.atleast_1d(est.error)
    return FormEstimate(Multivector(ambient, {t.mask: v for t, v in zip(ts, vals)}),
                        Multivector(ambient, {t.mask: e for t, e in zip(ts, errs)}))


def _forms_eta(spec: BlockMatrixSpec, j: int, k: int, ambient: int, quad: QuadratureSpec) -> FormEstimate:
    ts, _ = spec.minors(j, np.zeros(1))
    ss, _ = spec.minors(k, np.zeros(1))
    est = integrate_ordered_pair(lambda x: spec.minors(j, x)[1], lambda y: spec.minors(k, y)[1],
                                 spec.measure, spec.measure, quad)
    vals = np.asarray(est.value).reshape(len(ts), len(ss))
    errs = np.asarray(est.error).reshape(len(ts), len(ss))
    form: dict[int, float] = {}
    err: dict[int, float] = {}
    for a, t in enumerate(ts):
        for b, s in enumerate(ss):
            if t.mask & s.mask:
                continue
            m = t.mask | s.mask
            form[m] = form.get(m, 0.0) + merge_sign(t.mask, s.mask) * vals[a, b]
            err[m] = err.get(m, 0.0) + errs[a, b]
    return FormEstimate(Multivector(ambient, form), Multivector(ambient, err))


def gamma_block(spec: BlockMatrixSpec, j: int, quad: QuadratureSpec | None = None,
                ambient: int | None = None) -> FormEstimate:
    return _forms_gamma(spec, j, ambient or spec.size, _quad(spec, quad))


def eta_block(spec: BlockMatrixSpec, j: int, k: int, quad: QuadratureSpec | None = None,
              ambient: int | None = None) -> FormEstimate:
    return _forms_eta(spec, j, k, ambient or spec.size, _quad(spec, quad))


# left-hand side -------------------------------------------------------------

def debruijn_lhs(spec: BlockMatrixSpec, quad: QuadratureSpec | None = None) -> Estimate:
    """Ordered integral of det B over x_1 < ... < x_J.

    det B is the volume coefficient of beta_1(x_1) ^ ... ^ beta_J(x_J) with
    beta_j = sum_t det B_t(x_j) eps_t (block Laplace expansion), so the
    ordered integral is built one variable at a time: the running
    multivector F_j(x) = integral over y < x of F_{j-1}(y) ^ beta_j(y).
    """
    quad = _quad(spec, quad)
    n = spec.size
    lengths = spec.lengths
    if len(lengths) == 1:
        est = integrate_1d(lambda x: spec.minors(0, x)[1], spec.measure, quad)
        return Estimate(float(np.atleast_1d(est.value)[0]), float(np.atleast_1d(est.error)[0]))
    a, b, tail = support([spec.measure], quad)
    full = (1 << n) - 1
    plans = []
    for j in range(len(lengths)):
        ts, _ = spec.minors(j, np.zeros(1))
        plans.append([t.mask for t in ts])

    def compute(grid: CompositeGrid):
        w = spec.measure(grid.x)
        state = {0: np.ones(grid.size)}
        for j, masks in enumerate(plans):
            _, minors = spec.minors(j, grid.x)
            minors = minors * w
            nxt: dict[int, np.ndarray] = {}
            for m, vals in state.items():
                if j:
                    vals = grid.cumulative(vals)
                for t, row in zip(masks, minors):
                    if m & t:
                        continue
                    term = vals * row if merge_sign(m, t) > 0 else -(vals * row)
                    key = m | t
                    nxt[key] = nxt[key] + term if key in nxt else term
            state = nxt
        return grid.integral(state[full]) if full in state else 0.0

    return refine_composite(compute, a, b, len(lengths) * tail, quad,
                            start_panels(a, b, spec.measure.domain))


# right-hand side ------------------------------------------------------------

def even_first(lengths: Sequence[int]) -> tuple[list[int], int]:
    """Stable even-length-first block order and the sign of the column permutation."""
    order = [j for j, l in enumerate(lengths) if l % 2 == 0] + [j for j, l in enumerate(lengths) if l % 2]
    inversions = 0
    for p in range(len(order)):
        for q in range(p + 1, len(order)):
            if order[p] > order[q]:
                inversions += lengths[order[p]] * lengths[order[q]]
    return order, -1 if inversions % 2 else 1


def debruijn_rhs(spec: BlockMatrixSpec, quad: QuadratureSpec | None = None,
                 pairing: Sequence[tuple[int, int]] | None = None) -> Estimate:
    """Berezin integral of the block wedge, mapped back to the original block order.

    Blocks are first put in even-first order (sign of the column move
    applied to the result).  With r even blocks among J:

    * N even: (1 / (r + (J - r)/2)!) gamma_1 ^ ... ^ gamma_r ^ eta_{r+1,r+2} ^ eta_{r+3,r+4} ^ ...
    * N odd: (1 / (r + 1 + (J - r - 1)/2)!) gamma_1 ^ ... ^ gamma_r ^ eta_{r+1,r+2} ^ ... ^ gamma_J,
      with gamma_J ^ eps_{N+1} integrated in dimension N + 1.

    ``pairing`` overrides the consecutive pairing of the odd blocks (0-based
    positions after reordering).
    """
    quad = _quad(spec, quad)
    order, sign = even_first(spec.lengths)
    s = spec.reordered(order)
    lengths = s.lengths
    n = s.size
    j_total = len(lengths)
    r = sum(1 for l in lengths if l % 2 == 0)
    odd = list(range(r, j_total))
    odd_total = n % 2 == 1
    if odd_total != (len(odd) % 2 == 1):
        raise ArithmeticError("parity bookkeeping failed: odd block count does not match N")
    ambient = n + 1 if odd_total else n
    paired = odd[:-1] if odd_total else odd
    if pairing is None:
        pairs = [(paired[2 * m], paired[2 * m + 1]) for m in range(len(paired) // 2)]
    else:
        pairs = [tuple(p) for p in pairing]
        used = sorted(v for p in pairs for v in p)
        if used != paired:
            raise DomainError(f"pairing {pairs} must cover the odd blocks {paired} exactly once")
    acc = Bounded.unit(ambient)
    for j in range(r):
        acc = acc ^ Bounded.of(_forms_gamma(s, j, ambient, quad))
    for j, k in pairs:
        acc = acc ^ Bounded.of(_forms_eta(s, j, k, ambient, quad))
    if odd_total:
        last = _forms_gamma(s, odd[-1], ambient, quad)
        acc = acc ^ Bounded.of(attach(last, volume_tail(n, 1)))
        count = r + 1 + (j_total - r - 1) // 2
    else:
        count = r + (j_total - r) // 2
    return acc.scaled(sign / math.factorial(count)).volume()


def identity_holds(spec: BlockMatrixSpec) -> bool:
    """Block families for which the wedge formula equals the ordered integral.

    A single block; two odd blocks; or identical blocks that are all even
    (where the prefactor is 1/J!) or all odd with J even.
    """
    lengths = spec.lengths
    if len(lengths) == 1:
        return True
    if len(lengths) == 2 and all(l % 2 for l in lengths):
        return True
    identical = len(set(spec.blocks)) == 1
    if identical and all(l % 2 == 0 for l in lengths):
        return True
    return identical and lengths[0] % 2 == 1 and len(lengths) % 2 == 0


def corollary_pfaffian(spec: BlockMatrixSpec, quad: QuadratureSpec | None = None) -> Estimate:
    """Identical blocks of length L, M of them: PF(gamma), PF(eta) or PF(eta + gamma ^ xi_L)."""
    if len(set(spec.blocks)) != 1:
        raise DomainError("the Pfaffian form needs identical blocks")
    quad = _quad(spec, quad)
    length = spec.lengths[0]
    m = len(spec.lengths)
    n = spec.size
    if length % 2 == 0:
        omega = Bounded.of(_forms_gamma(spec, 0, n, quad))
        count = m
    elif m % 2 == 0:
        omega = Bounded.of(_forms_eta(spec, 0, 0, n, quad))
        count = m // 2
    else:
        ambient = n + length
        omega = Bounded.of(attach(_forms_gamma(spec, 0, ambient, quad), volume_tail(n, length)))
        if m > 1:
            omega = Bounded.of(_forms_eta(spec, 0, 0, ambient, quad)) + omega
        count = (m + 1) // 2
    return power(omega, count).volume()


def random_block_spec(rng: np.random.Generator, lengths: Sequence[int], measure: Measure,
                      max_degree: int = 3, identical: bool = False, dense: bool = False) -> BlockMatrixSpec:
    """Entries c * x^d with d uniform in 0..max_degree and c standard normal.

    With ``dense`` every entry is instead a full polynomial of degree
    max_degree with standard normal coefficients.  With ``identical`` one
    block is drawn and repeated (all lengths must agree).
    """
    n = sum(lengths)
    if identical and len(set(lengths)) != 1:
        raise DomainError("identical blocks need equal lengths")

    def draw(l: int):
        block = []
        for _ in range(n):
            row = []
            for _ in range(l):
                if dense:
                    row.append(tuple(float(c) for c in rng.standard_normal(max_degree + 1)))
                else:
                    d = int(rng.integers(0, max_degree + 1))
                    row.append(tuple([0.0] * d + [float(rng.standard_normal())]))
            block.append(tuple(row))
        return tuple(block)

    if identical:
        return BlockMatrixSpec((draw(lengths[0]),) * len(lengths), measure)
    return BlockMatrixSpec(tuple(draw(l) for l in lengths), measure)


def identical_block_spec(block, count: int, measure: Measure) -> BlockMatrixSpec:
    return BlockMatrixSpec(tuple([tuple(tuple(r) for r in block)] * count), measure)


def vandermonde_blocks(n: int, measure: Measure) -> BlockMatrixSpec:
    """N blocks of one column x^(n-1): the ordered integral is a single-sector Vandermonde integral."""
    col = tuple((tuple([0.0] * k + [1.0]),) for k in range(n))
    return identical_block_spec(col, n, measure)


def lhs_bruteforce(spec: BlockMatrixSpec, nodes: int = 48, quad: QuadratureSpec | None = None) -> float:
    """Reference ordered integral by a tensor rule on the mapped simplex (small J only)."""
    quad = _quad(spec, quad)
    a, b, _ = support([spec.measure], quad)
    j_total = len(spec.lengths)

    def fn(pts: np.ndarray) -> np.ndarray:
        cols = [spec.block_values(j, pts[:, j]) for j in range(j_total)]  # (N, L_j, npts)
        mats = np.concatenate(cols, axis=1).transpose(2, 0, 1)
        w = np.prod(spec.measure(pts), axis=1)
        return np.linalg.det(mats) * w

    return float(ordered_tensor_integral(fn, (j_total,), a, b, nodes))


__all__ = [
    "BlockMatrixSpec", "debruijn_lhs", "debruijn_rhs", "corollary_pfaffian", "gamma_block", "eta_block",
    "even_first", "identity_holds", "random_block_spec", "identical_block_spec", "vandermonde_blocks",
    "lhs_bruteforce",
]
