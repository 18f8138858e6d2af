"""Multiplicative orders, primitive prime divisors, and good primes.

An integer d ≥ 1 is *admissible* for a group type at a prime power q when
some odd prime ℓ, good for the type and not dividing q, has multiplicative
order d at q.  Such primes witness that the d-series refine into actual
ℓ-block partitions, which is what the fusion engine consumes.

Primitive primes are located by factoring the cyclotomic value Φ_d(q),
which carries exactly the primes of order d (plus possibly the largest
prime factor of d, filtered out by an explicit order check).  Factoring is
plain trial division; powers beyond 63 bits are rejected rather than
silently promoted, which keeps the search at desk scale.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import BoundExceeded, DividesModulus

CLASSICAL_FAMILIES = ("A", "2A", "B", "C", "D", "2D")
EXCEPTIONAL_FAMILIES = ("G2", "F4", "3D4", "E6", "2E6", "E7", "E8")

_BAD_PRIMES = {
    "A": frozenset(), "2A": frozenset(),
    "B": frozenset({2}), "C": frozenset({2}),
    "D": frozenset({2}), "2D": frozenset({2}),
    "G2": frozenset({2, 3}), "F4": frozenset({2, 3}), "3D4": frozenset({2, 3}),
    "E6": frozenset({2, 3}), "2E6": frozenset({2, 3}), "E7": frozenset({2, 3}),
    "E8": frozenset({2, 3, 5}),
}

_POWER_LIMIT = 2**63 - 1  # largest accepted value of q**d


@dataclass(frozen=True, order=True)
class GroupTypeTag:
    """A family token plus a rank, e.g. B3 or 2A5."""

    family: str
    rank: int

    def __post_init__(self):
        if self.family not in CLASSICAL_FAMILIES + EXCEPTIONAL_FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.family in ("D", "2D") and self.rank < 2:
            raise ValueError(f"family {self.family} needs rank >= 2")

    @property
    def is_classical(self) -> bool:
        return self.family in CLASSICAL_FAMILIES

    def __str__(self) -> str:
        return f"{self.family}{self.rank}"


@dataclass(frozen=True)
class PrimePower:
    """q = p**r with p prime and r >= 1."""

    q: int
    p: int
    r: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.r < 1 or self.p ** self.r != self.q:
            raise ValueError(f"{self.q} != {self.p}**{self.r}")

    @classmethod
    def from_q(cls, q: int) -> "PrimePower":
        if q < 2:
            raise ValueError("q must be >= 2")
        n = q
        p = None
        for c in _candidate_divisors():
            if c * c > n:
                break
            if n % c == 0:
                p = c
                break
        if p is None:
            return cls(q, q, 1)
        r = 0
        while n % p == 0:
            n //= p
            r += 1
        if n != 1:
            raise ValueError(f"{q} is not a prime power")
        return cls(q, p, r)


@dataclass(frozen=True)
class GoodnessFilter:
    """Constraints a witnessing prime must satisfy."""

    group_type: Optional[GroupTypeTag] = None
    odd_only: bool = False
    min_ell: Optional[int] = None
    exclude_triality_3: bool = False

    def passes(self, ell: int) -> bool:
        if self.odd_only and ell == 2:
            return False
        if self.min_ell is not None and ell < self.min_ell:
            return False
        if self.exclude_triality_3 and ell == 3:
            return False
        if self.group_type is not None and not is_good(ell, self.group_type):
            return False
        return True


def _candidate_divisors() -> Iterator[int]:
    yield 2
    yield 3
    c = 5
    while True:
        yield c
        yield c + 2
        c += 6


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for c in _candidate_divisors():
        if c * c > n:
            return True
        if n % c == 0:
            return n == c


def prime_factors(n: int) -> Iterator[int]:
    """Distinct prime factors of n in increasing order."""
    for c in _candidate_divisors():
        if c * c > n:
            break
        if n % c == 0:
            yield c
            while n % c == 0:
                n //= c
    if n > 1:
        yield n


def divisors(n: int) -> list[int]:
    small, large = [], []
    c = 1
    while c * c <= n:
        if n % c == 0:
            small.append(c)
            if c != n // c:
                large.append(n // c)
        c += 1
    return small + large[::-1]


def is_good(ell: int, group_type: GroupTypeTag) -> bool:
    """True when ell avoids the bad primes of the family."""
    return ell not in _BAD_PRIMES[group_type.family]


def mult_order(q: int, ell: int) -> int:
    """Smallest d >= 1 with q**d = 1 mod ell (ell prime, ell not | q)."""
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    if q % ell == 0:
        raise DividesModulus(f"{ell} divides {q}")
    x, d = q % ell, 1
    while x != 1:
        x = x * q % ell
        d += 1
    return d


def _order_equals(q: int, ell: int, d: int) -> bool:
    # order is exactly d iff q^d = 1 and q^(d/p) != 1 for primes p | d
    if pow(q, d, ell) != 1:
        return False
    return all(pow(q, d // p, ell) != 1 for p in prime_factors(d))


def checked_power(q: int, d: int) -> int:
    """q**d, rejected when it exceeds the native 63-bit budget."""
    if q < 2 or d < 1:
        raise ValueError("need q >= 2 and d >= 1")
    value = q ** d
    if value > _POWER_LIMIT:
        raise BoundExceeded(f"{q}**{d} exceeds the supported range")
    return value


@functools.lru_cache(maxsize=None)
def _cyclotomic_value(q: int, d: int) -> int:
    # Phi_d(q) via q^d - 1 = prod over e | d of Phi_e(q)
    value = checked_power(q, d) - 1
    for e in divisors(d):
        if e != d:
            value //= _cyclotomic_value(q, e)
    return value


@functools.lru_cache(maxsize=None)
def primitive_prime(q: int, d: int,
                    constraint: Optional[GoodnessFilter] = None) -> Optional[int]:
    """Smallest prime of multiplicative order exactly d at q passing the
    filter, or None when no such prime exists."""
    target = _cyclotomic_value(q, d)
    fltr = constraint or GoodnessFilter()
    for ell in prime_factors(target):
        if _order_equals(q, ell, d) and fltr.passes(ell):
            return ell
    return None


def admissible_d(group_type: GroupTypeTag, q: PrimePower, d_max: int) -> dict[int, int]:
    """Map d -> smallest witnessing odd good prime, for 1 <= d <= d_max."""
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    fltr = GoodnessFilter(group_type=group_type, odd_only=True)
    out: dict[int, int] = {}
    for d in range(1, d_max + 1):
        ell = primitive_prime(q.q, d, fltr)
        if ell is not None:
            out[d] = ell
    return out
