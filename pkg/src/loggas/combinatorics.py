"""Permutation structures: increasing functions, shuffles, block permutations,
Young subgroups, and the shuffle/block/Young factorisation of S_N.

Everything is 1-indexed at the interface.  Internally the images are kept as
0-indexed tuples where that avoids repeated offset arithmetic, but nothing
0-indexed is ever returned.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from .errors import DomainError, ResourceError

DEFAULT_ENUMERATION_CAP = 10

SUBSET_KINDS = ("young", "shuffle", "ordered_shuffle", "block")


@dataclass(frozen=True)
class IncreasingFunction:
    """Strictly increasing map {1..K} -> {1..N}, stored by its values."""

    values: tuple[int, ...]
    codomain_size: int

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) > self.codomain_size:
            raise DomainError(f"{len(vals)} values cannot inject into {self.codomain_size}")
        for a, b in zip(vals, vals[1:]):
            if a >= b:
                raise DomainError(f"values {vals} are not strictly increasing")
        if vals and (vals[0] < 1 or vals[-1] > self.codomain_size):
            raise DomainError(f"values {vals} outside 1..{self.codomain_size}")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __call__(self, k: int) -> int:
        return self.values[k - 1]

    def complement(self) -> "IncreasingFunction":
        used = set(self.values)
        rest = tuple(n for n in range(1, self.codomain_size + 1) if n not in used)
        return IncreasingFunction(rest, self.codomain_size)

    @property
    def mask(self) -> int:
        """Bitmask with bit (v-1) set for every value v."""
        m = 0
        for v in self.values:
            m |= 1 << (v - 1)
        return m


@dataclass(frozen=True)
class Partition:
    """Ordered sequence of positive block sizes (a composition of ``total``)."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if any(p < 1 for p in parts):
            raise DomainError(f"partition parts must be positive, got {parts}")

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def partial_sums(self) -> tuple[int, ...]:
        """s_j = sum of the parts strictly before block j (so s_1 = 0)."""
        out, acc = [], 0
        for p in self.parts:
            out.append(acc)
            acc += p
        return tuple(out)

    def __len__(self) -> int:
        return len(self.parts)

    def blocks(self) -> list[range]:
        """1-indexed position ranges of each block."""
        return [range(s + 1, s + p + 1) for s, p in zip(self.partial_sums, self.parts)]

    def reordered(self, theta: "Permutation") -> "Partition":
        """Parts reordered by a block action: new part theta(k) is old part k."""
        inv = theta.inverse()
        return Partition(tuple(self.parts[inv(k) - 1] for k in range(1, len(self) + 1)))


@dataclass(frozen=True)
class Permutation:
    """Bijection of {1..N} in one-line notation: ``images[i-1] = sigma(i)``."""

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(v) for v in self.images)
        object.__setattr__(self, "images", imgs)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise DomainError(f"{imgs} is not a permutation of 1..{len(imgs)}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def _from0(cls, imgs0: Sequence[int]) -> "Permutation":
        obj = object.__new__(cls)
        object.__setattr__(obj, "images", tuple(v + 1 for v in imgs0))
        return obj

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition ``(self * other)(i) = self(other(i))``."""
        if self.n != other.n:
            raise DomainError("cannot compose permutations of different sizes")
        return Permutation._from0([self.images[j - 1] - 1 for j in other.images])

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.images):
            inv[v - 1] = i
        return Permutation._from0(inv)

    def sign(self) -> int:
        return _sign0([v - 1 for v in self.images])

    def __str__(self) -> str:
        return " ".join(str(v) for v in self.images)


def _sign0(imgs0: Sequence[int]) -> int:
    seen = [False] * len(imgs0)
    parity = 0
    for start in range(len(imgs0)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = imgs0[j]
            length += 1
        parity ^= (length - 1) & 1
    return -1 if parity else 1


def inversion_sign(word: Sequence[int]) -> int:
    """Sign of a word by brute-force inversion counting."""
    inv = sum(1 for i in range(len(word)) for j in range(i + 1, len(word)) if word[i] > word[j])
    return -1 if inv % 2 else 1


def multinomial(parts: Sequence[int]) -> int:
    out = math.factorial(sum(parts))
    for p in parts:
        out //= math.factorial(p)
    return out


def compositions(n: int) -> Iterator[tuple[int, ...]]:
    """All ordered sequences of positive integers summing to n."""
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in compositions(n - first):
            yield (first,) + rest


def increasing_functions(k: int, n: int) -> list[IncreasingFunction]:
    """All strictly increasing maps {1..k} -> {1..n}, lexicographically."""
    if k < 0 or k > n:
        raise DomainError(f"no increasing functions from {k} to {n}")
    return [IncreasingFunction(c, n) for c in itertools.combinations(range(1, n + 1), k)]


def sign_of_increasing(t: IncreasingFunction) -> int:
    """Signature of the permutation listing t's values, then its complement.

    Each value t(i) is preceded in the complement by exactly t(i) - i smaller
    entries, so the inversion count is sum(t(i) - i).
    """
    inv = sum(v - i for i, v in enumerate(t.values, start=1))
    return -1 if inv % 2 else 1


def _as_partition(lam) -> Partition:
    return lam if isinstance(lam, Partition) else Partition(tuple(lam))


def belongs(kind: str, sigma: Permutation, lam) -> bool:
    """Membership test straight from the inequality definitions of each subset."""
    lam = _as_partition(lam)
    s = lam.partial_sums
    img = sigma.images
    if kind == "young":
        return all(s[k] < img[s[k] + j] <= s[k] + p
                   for k, p in enumerate(lam.parts) for j in range(p))
    if kind == "block":
        return all(img[s[k] + j] + 1 == img[s[k] + j + 1]
                   for k, p in enumerate(lam.parts) for j in range(p - 1))
    if kind in ("shuffle", "ordered_shuffle"):
        ok = all(img[s[k] + j] < img[s[k] + j + 1]
                 for k, p in enumerate(lam.parts) for j in range(p - 1))
        if kind == "ordered_shuffle":
            leaders = [img[sk] for sk in s]
            ok = ok and all(a < b for a, b in zip(leaders, leaders[1:]))
        return ok
    raise DomainError(f"unknown subset kind {kind!r}")


def _shuffles0(parts: Sequence[int]) -> Iterator[list[int]]:
    n = sum(parts)

    def rec(k: int, free: tuple[int, ...], acc: list[int]):
        if k == len(parts):
            yield list(acc)
            return
        for chosen in itertools.combinations(free, parts[k]):
            left = tuple(v for v in free if v not in chosen)
            yield from rec(k + 1, left, acc + list(chosen))

    yield from rec(0, tuple(range(n)), [])


def enumerate_subset(lam, kind: str, cap: int = DEFAULT_ENUMERATION_CAP) -> list[Permutation]:
    """Young subgroup H, shuffles Sh, ordered shuffles Sh°, or block permutations Bl.

    Returned in lexicographic order of one-line notation.
    """
    lam = _as_partition(lam)
    if kind not in SUBSET_KINDS:
        raise DomainError(f"unknown subset kind {kind!r}")
    if lam.total > cap:
        raise ResourceError(f"N={lam.total} exceeds enumeration cap {cap}")
    s = lam.partial_sums
    out: list[list[int]] = []
    if kind == "young":
        for choice in itertools.product(*(itertools.permutations(range(sk, sk + p))
                                          for sk, p in zip(s, lam.parts))):
            out.append([v for block in choice for v in block])
    elif kind in ("shuffle", "ordered_shuffle"):
        for imgs in _shuffles0(lam.parts):
            if kind == "ordered_shuffle":
                leaders = [imgs[sk] for sk in s]
                if any(a > b for a, b in zip(leaders, leaders[1:])):
                    continue
            out.append(imgs)
    else:
        for theta in itertools.permutations(range(len(lam))):
            out.append(_block0(lam.parts, s, theta))
    out.sort()
    return [Permutation._from0(o) for o in out]


def _block0(parts, s, theta0) -> list[int]:
    # block k lands at rank theta0[k] among the blocks
    mu = [0] * len(parts)
    for k, r in enumerate(theta0):
        mu[r] = parts[k]
    t = [0] * len(parts)
    for r in range(1, len(parts)):
        t[r] = t[r - 1] + mu[r - 1]
    imgs = [0] * sum(parts)
    for k, p in enumerate(parts):
        for j in range(p):
            imgs[s[k] + j] = t[theta0[k]] + j
    return imgs


def block_theta(pi: Permutation, lam) -> Permutation:
    """The block action theta_pi in S_K of a block permutation."""
    lam = _as_partition(lam)
    leaders = [pi.images[sk] for sk in lam.partial_sums]
    order = sorted(range(len(leaders)), key=leaders.__getitem__)
    theta = [0] * len(leaders)
    for rank, k in enumerate(order):
        theta[k] = rank
    return Permutation._from0(theta)


class Decomposition(NamedTuple):
    sigma: Permutation  # ordered shuffle for the reordered partition
    pi: Permutation  # block permutation
    tau: Permutation  # Young subgroup element
    theta: Permutation  # block action of pi, in S_K
    reordered: Partition  # partition with blocks reordered by theta


def decompose(phi: Permutation, lam) -> Decomposition:
    """Factor ``phi = sigma * pi * tau`` with tau in H(lam), pi in Bl(lam) and
    sigma an ordered shuffle of the reordered partition.

    Constructive: tau sorts the images inside each block (coset
    representative), then the block leaders are ranked to place whole blocks.
    """
    lam = _as_partition(lam)
    if phi.n != lam.total:
        raise DomainError(f"permutation of {phi.n} does not match partition of {lam.total}")
    img = [v - 1 for v in phi.images]
    s = lam.partial_sums
    n = phi.n

    tau0 = [0] * n  # tau0 = tau^{-1}
    rho = [0] * n
    for sk, p in zip(s, lam.parts):
        order = sorted(range(sk, sk + p), key=img.__getitem__)
        for j, pos in enumerate(order):
            tau0[sk + j] = pos
            rho[sk + j] = img[pos]
    tau = [0] * n
    for i, v in enumerate(tau0):
        tau[v] = i

    leaders = [rho[sk] for sk in s]
    ranked = sorted(range(len(s)), key=leaders.__getitem__)
    alpha = [0] * len(s)
    for rank, k in enumerate(ranked):
        alpha[k] = rank
    pi = _block0(lam.parts, s, alpha)
    sigma = [0] * n
    for i in range(n):
        sigma[pi[i]] = rho[i]

    theta = Permutation._from0(alpha)
    return Decomposition(
        sigma=Permutation._from0(sigma),
        pi=Permutation._from0(pi),
        tau=Permutation._from0(tau),
        theta=theta,
        reordered=lam.reordered(theta),
    )


def all_permutations(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Permutation]:
    if n > cap:
        raise ResourceError(f"N={n} exceeds enumeration cap {cap}")
    for p in itertools.permutations(range(n)):
        yield Permutation._from0(p)


def distinct_arrangements(counts: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Distinct words with ``counts[j]`` copies of letter j, lexicographically.

    These are in bijection with the shuffles of the partition ``counts``: the
    word records which block each position of the shuffle is drawn from.
    """
    remaining = list(counts)
    total = sum(remaining)
    word: list[int] = []

    def rec():
        if len(word) == total:
            yield tuple(word)
            return
        for j, c in enumerate(remaining):
            if c:
                remaining[j] -= 1
                word.append(j)
                yield from rec()
                word.pop()
                remaining[j] += 1

    yield from rec()


def dump_permutations(perms) -> str:
    """One permutation per line, one-line notation, space separated."""
    return "".join(f"{p}\n" for p in perms)
