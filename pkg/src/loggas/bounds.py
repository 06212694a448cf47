"""Forms carried together with error majorants.

A ``Bounded`` holds the signed form, the form of coefficient magnitudes and
the magnitudes inflated by their quadrature errors.  Products and powers
of the last two are taken with every merge sign replaced by +1, so the top
coefficient of ``high - low`` bounds how far the signed result can move.
"""

from __future__ import annotations

from typing import NamedTuple

from .exterior import Multivector, exp_truncated, wedge
from .quadrature import Estimate


class FormEstimate(NamedTuple):
    form: Multivector
    error: Multivector


class Bounded:
    __slots__ = ("value", "low", "high")

    def __init__(self, value: Multivector, low: Multivector, high: Multivector):
        self.value, self.low, self.high = value, low, high

    @classmethod
    def of(cls, est: FormEstimate, scale=1.0) -> "Bounded":
        mag = est.form.map(abs) * abs(scale)
        err = est.error.map(abs) * abs(scale)
        return cls(est.form * scale, mag, mag + err)

    @classmethod
    def unit(cls, dim: int) -> "Bounded":
        one = Multivector.scalar(1.0, dim)
        return cls(one, one, one)

    @classmethod
    def zero(cls, dim: int) -> "Bounded":
        z = Multivector(dim)
        return cls(z, z, z)

    def __xor__(self, other: "Bounded") -> "Bounded":
        return Bounded(wedge(self.value, other.value),
                       wedge(self.low, other.low, signed=False),
                       wedge(self.high, other.high, signed=False))

    def __add__(self, other: "Bounded") -> "Bounded":
        return Bounded(self.value + other.value, self.low + other.low, self.high + other.high)

    def scaled(self, c) -> "Bounded":
        return Bounded(self.value * c, self.low * abs(c), self.high * abs(c))

    def exp(self) -> "Bounded":
        return Bounded(exp_truncated(self.value), exp_truncated(self.low, signed=False),
                       exp_truncated(self.high, signed=False))

    def volume(self) -> Estimate:
        full = (1 << self.value.dimension) - 1
        value = self.value.terms.get(full, 0.0)
        low = self.low.terms.get(full, 0.0)
        high = self.high.terms.get(full, 0.0)
        # majorant difference bounds the propagated quadrature error; add rounding
        return Estimate(value, (high - low) + 1e-14 * high)


def power(x: Bounded, m: int) -> Bounded:
    """x^m / m!."""
    out = Bounded.unit(x.value.dimension)
    for i in range(1, m + 1):
        out = (out ^ x).scaled(1.0 / i)
    return out


def attach(est: FormEstimate, tail: Multivector) -> FormEstimate:
    """est ^ tail, with the error form carried along unsigned."""
    return FormEstimate(wedge(est.form, tail), wedge(est.error, tail, signed=False))
