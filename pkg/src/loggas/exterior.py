"""Sparse exterior algebra over R^M or C^M.

Basis monomials eps_S are keyed by bitmask (bit i-1 set when eps_i is a
factor), with the factors always in increasing order.  Coefficients can be
floats, complex numbers or ``fractions.Fraction`` for exact work; the
arithmetic never inspects the type.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

from .combinatorics import IncreasingFunction
from .errors import DomainError

MAX_DIMENSION = 64


def merge_sign(a: int, b: int) -> int:
    """Sign of eps_A ^ eps_B relative to eps_{A u B} for disjoint A, B.

    Counts pairs (i in A, j in B) with i > j: each such pair is one
    transposition needed to sort the concatenated factors.
    """
    count = 0
    while b:
        low = b & -b
        count += (a & ~((low << 1) - 1)).bit_count()
        b ^= low
    return -1 if count & 1 else 1


def _mask(indices: Iterable[int], dimension: int) -> int:
    m = 0
    for i in indices:
        if not 1 <= i <= dimension:
            raise DomainError(f"basis index {i} outside 1..{dimension}")
        if m >> (i - 1) & 1:
            raise DomainError(f"repeated basis index {i}")
        m |= 1 << (i - 1)
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


class Multivector:
    """Immutable sparse element of the exterior algebra of dimension M."""

    __slots__ = ("dimension", "terms")

    def __init__(self, dimension: int, terms: Mapping[int, object] | None = None, eps: float = 0.0):
        if not 0 <= dimension <= MAX_DIMENSION:
            raise DomainError(f"dimension {dimension} outside 0..{MAX_DIMENSION}")
        full = (1 << dimension) - 1
        clean = {}
        for m, c in (terms or {}).items():
            if m & ~full:
                raise DomainError(f"term {indices_of(m)} outside dimension {dimension}")
            if c == 0 or (eps and abs(c) <= eps):
                continue
            clean[m] = c
        self.dimension = dimension
        self.terms = clean

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, dimension: int) -> "Multivector":
        return cls(dimension)

    @classmethod
    def scalar(cls, value, dimension: int) -> "Multivector":
        return cls(dimension, {0: value})

    @classmethod
    def basis(cls, indices: Iterable[int], dimension: int, coeff=1) -> "Multivector":
        """coeff * eps_{i1} ^ eps_{i2} ^ ... in the order given (sign applied)."""
        idx = list(indices)
        m = _mask(idx, dimension)
        inv = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
        return cls(dimension, {m: -coeff if inv % 2 else coeff})

    @classmethod
    def from_increasing(cls, t: IncreasingFunction, dimension: int | None = None, coeff=1) -> "Multivector":
        return cls(dimension or t.codomain_size, {t.mask: coeff})

    # queries --------------------------------------------------------------

    def coefficient(self, indices: Iterable[int]):
        return self.terms.get(_mask(indices, self.dimension), 0)

    def grades(self) -> set[int]:
        return {m.bit_count() for m in self.terms}

    def is_homogeneous(self, grade: int | None = None) -> bool:
        g = self.grades()
        return len(g) <= 1 and (grade is None or not g or g == {grade})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.dimension == other.dimension and self.terms == other.terms

    def __repr__(self) -> str:
        return f"Multivector({self.dimension}, {{{', '.join(f'{indices_of(m)}: {c!r}' for m, c in sorted(self.terms.items()))}}})"

    # arithmetic -----------------------------------------------------------

    def _check(self, other: "Multivector"):
        if not isinstance(other, Multivector):
            raise TypeError(f"expected Multivector, got {type(other).__name__}")
        if other.dimension != self.dimension:
            raise DomainError(f"dimension mismatch: {self.dimension} vs {other.dimension}")

    def __add__(self, other: "Multivector") -> "Multivector":
        return add_scale(self, 1, other)

    def __sub__(self, other: "Multivector") -> "Multivector":
        return add_scale(self, -1, other)

    def __neg__(self) -> "Multivector":
        return Multivector(self.dimension, {m: -c for m, c in self.terms.items()})

    def __mul__(self, c) -> "Multivector":
        if isinstance(c, Multivector):
            return NotImplemented
        return Multivector(self.dimension, {m: v * c for m, v in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Multivector":
        return Multivector(self.dimension, {m: v / c for m, v in self.terms.items()})

    def __xor__(self, other: "Multivector") -> "Multivector":
        return wedge(self, other)

    def map(self, fn) -> "Multivector":
        """Apply ``fn`` to every coefficient."""
        return Multivector(self.dimension, {m: fn(c) for m, c in self.terms.items()})

    def embed(self, dimension: int) -> "Multivector":
        """The same element viewed inside a larger exterior algebra."""
        if dimension < self.dimension:
            raise DomainError("cannot embed into a smaller dimension")
        return Multivector(dimension, self.terms)

    def to_text(self) -> str:
        """Sorted ``{i,j,...}: coefficient`` lines, by grade then indices."""
        lines = []
        for m in sorted(self.terms, key=lambda m: (m.bit_count(), indices_of(m))):
            lines.append(f"{{{','.join(map(str, indices_of(m)))}}}: {self.terms[m]!r}\n")
        return "".join(lines)


def wedge(a: Multivector, b: Multivector, max_grade: int | None = None, signed: bool = True) -> Multivector:
    """Exterior product; terms above ``max_grade`` are dropped.

    With ``signed=False`` every merge sign is replaced by +1, which gives the
    majorant used for error propagation.
    """
    a._check(b)
    top = a.dimension if max_grade is None else max_grade
    out: dict[int, object] = {}
    for ma, ca in a.terms.items():
        ga = ma.bit_count()
        for mb, cb in b.terms.items():
            if ma & mb or ga + mb.bit_count() > top:
                continue
            m = ma | mb
            term = ca * cb
            if signed and merge_sign(ma, mb) < 0:
                term = -term
            out[m] = out[m] + term if m in out else term
    return Multivector(a.dimension, out)


def add_scale(a: Multivector, c, b: Multivector, eps: float = 0.0) -> Multivector:
    """a + c*b, pruning coefficients with |coeff| <= eps (exact zeros always)."""
    a._check(b)
    out = dict(a.terms)
    for m, v in b.terms.items():
        out[m] = out[m] + c * v if m in out else c * v
    return Multivector(a.dimension, out, eps=eps)


def berezin_volume(a: Multivector, extension: int = 0):
    """Berezin integral against the volume form of the whole ambient space.

    ``a.dimension`` is the full dimension N + k, where ``extension`` = k counts
    the auxiliary basis vectors eps_{N+1}..eps_{N+k} appended to the physical
    ones.  Only the top-grade coefficient survives.
    """
    if not 0 <= extension <= a.dimension:
        raise DomainError(f"extension {extension} incompatible with dimension {a.dimension}")
    return a.terms.get((1 << a.dimension) - 1, 0)


def volume_tail(n: int, k: int, coeff=1) -> Multivector:
    """xi_k = eps_{n+1} ^ ... ^ eps_{n+k} inside dimension n + k."""
    return Multivector(n + k, {((1 << k) - 1) << n: coeff})


def exp_truncated(omega: Multivector, max_grade: int | None = None, signed: bool = True) -> Multivector:
    """sum_m omega^m / m!, keeping grades <= max_grade (default: dimension)."""
    if 0 in omega.terms:
        raise DomainError("exponential of a form with a scalar part is not nilpotent")
    top = omega.dimension if max_grade is None else max_grade
    if top > omega.dimension:
        raise DomainError(f"max_grade {top} exceeds dimension {omega.dimension}")
    one = Multivector.scalar(1, omega.dimension)
    result = one
    power = one
    m = 0
    while True:
        m += 1
        power = wedge(power, omega, max_grade=top, signed=signed) / m
        if not power:
            return result
        result = result + power


def berezin_exp(omega: Multivector, extension: int = 0, signed: bool = True):
    """Berezin integral of exp(omega) against the full volume form."""
    return berezin_volume(exp_truncated(omega, signed=signed), extension)


def hyperpfaffian(omega: Multivector):
    """Coefficient of the volume form in omega^M / M! for a homogeneous L-form, L*M = dim."""
    grades = omega.grades()
    if len(grades) > 1:
        raise DomainError("hyperpfaffian needs a homogeneous form")
    if not grades:
        return 0
    (grade,) = grades
    if grade == 0 or omega.dimension % grade:
        raise DomainError(f"grade {grade} does not divide dimension {omega.dimension}")
    count = omega.dimension // grade
    power = Multivector.scalar(1, omega.dimension)
    for _ in range(count):
        power = wedge(power, omega)
    return berezin_volume(power) / math.factorial(count)
