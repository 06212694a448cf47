"""Words, the shuffle product and the iterated-integral (Chen) functional."""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Callable, Hashable, Iterable, Iterator, Mapping, NamedTuple

from .combinatorics import all_permutations
from .errors import DomainError, ResourceError
from .quadrature import Estimate, Measure, QuadratureSpec, integrate_simplex

Word = tuple
ANTISYMMETRIZE_CAP = 6


class Letter(NamedTuple):
    """A letter carrying a label (e.g. a species) and an index tuple."""

    label: Hashable
    indices: tuple


class AlgebraElement:
    """Finite rational combination of words; zero coefficients are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, object] | None = None):
        clean = {}
        for w, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[tuple(w)] = c
        self.terms = clean

    @classmethod
    def word(cls, *letters, coeff=1) -> "AlgebraElement":
        return cls({tuple(letters): coeff})

    @classmethod
    def unit(cls) -> "AlgebraElement":
        return cls({(): 1})

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraElement) and self.terms == other.terms

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*{w}" for w, c in sorted(self.terms.items(), key=lambda kv: repr(kv[0])))
        return f"AlgebraElement({body or '0'})"

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return AlgebraElement(out)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + other * -1

    def __mul__(self, c) -> "AlgebraElement":
        return AlgebraElement({w: v * Fraction(c) for w, v in self.terms.items()})

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self.terms)

    def letters(self) -> set:
        return {a for w in self.terms for a in w}


def shuffle_words(u: Word, v: Word) -> Iterator[Word]:
    """All binom(|u|+|v|, |u|) interleavings, with repetition."""
    n = len(u) + len(v)
    for slots in combinations(range(n), len(u)):
        out = [None] * n
        chosen = set(slots)
        iu = iter(u)
        iv = iter(v)
        for i in range(n):
            out[i] = next(iu) if i in chosen else next(iv)
        yield tuple(out)


def shuffle_product(u: AlgebraElement, v: AlgebraElement) -> AlgebraElement:
    out: dict[Word, Fraction] = {}
    for wu, cu in u.terms.items():
        for wv, cv in v.terms.items():
            c = cu * cv
            for w in shuffle_words(wu, wv):
                out[w] = out.get(w, 0) + c
    return AlgebraElement(out)


def chen_eval(u: AlgebraElement, binding: Mapping[Hashable, Callable] | Callable,
              measure: Measure, spec: QuadratureSpec | None = None) -> Estimate:
    """Linear extension of word -> integral of f_1(x_1)...f_k(x_k) over x_1 < ... < x_k."""
    lookup = binding if callable(binding) else None
    value = 0.0
    error = 0.0
    for w, c in sorted(u.terms.items(), key=lambda kv: repr(kv[0])):
        fs = []
        for a in w:
            if lookup is not None:
                fn = lookup(a)
            elif a in binding:
                fn = binding[a]
            else:
                raise DomainError(f"letter {a!r} is not bound to a function")
            fs.append(fn)
        est = integrate_simplex(fs, measure, spec)
        value = value + float(c) * est.value
        error = error + abs(float(c)) * est.error
    return Estimate(value, error)


def antisymmetrize(template: Iterable[int], label: Hashable = None,
                   cap: int = ANTISYMMETRIZE_CAP) -> AlgebraElement:
    """sum over tau in S_L of sgn(tau) * Letter(label, template o tau)."""
    t = tuple(template)
    if len(t) > cap:
        raise ResourceError(f"antisymmetrization over S_{len(t)} exceeds cap S_{cap}")
    out: dict[Word, Fraction] = {}
    for tau in all_permutations(len(t), cap=cap):
        letter = Letter(label, tuple(t[tau(i) - 1] for i in range(1, len(t) + 1)))
        out[(letter,)] = out.get((letter,), 0) + tau.sign()
    return AlgebraElement(out)


def antisymmetrized_term_count(length: int) -> int:
    return math.factorial(length)
