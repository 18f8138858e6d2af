"""Integer partitions, beta-sets, d-cores, and the Ennola degree map.

A partition is a tuple of weakly decreasing positive integers; a beta-set of
length m encodes it as the m distinct values λ_i + (m − i).  Adding a part of
size 0 shifts every entry up by one and inserts a 0, which is why all
beta-set constructions below are insensitive to the chosen length.

The d-core is computed on the abacus: spread the beta entries over d runners
by residue, slide every bead down to the lowest free position on its runner,
and read the partition back off.  Sliding one step down a runner is exactly
the removal of one d-hook, so the abacus output is the common endpoint of
every removal order.
"""

from __future__ import annotations

from .errors import BoundExceeded, LengthTooShort
from .limits import partition_size_bound

Partition = tuple  # weakly decreasing tuple of positive ints
BetaSet = tuple    # strictly increasing tuple of non-negative ints


def as_partition(parts) -> Partition:
    """Validate and normalize (drop trailing zeros)."""
    lam = tuple(int(x) for x in parts)
    while lam and lam[-1] == 0:
        lam = lam[:-1]
    for a, b in zip(lam, lam[1:]):
        if a < b:
            raise ValueError(f"parts not weakly decreasing: {lam}")
    if lam and lam[-1] < 1:
        raise ValueError(f"parts must be positive: {lam}")
    return lam


def partitions_of(m: int) -> list[Partition]:
    """All partitions of m, largest-part-first lexicographic order."""
    if m < 0:
        raise ValueError("m must be >= 0")
    bound = partition_size_bound()
    if m > bound:
        raise BoundExceeded(f"partitions of {m} exceed the configured bound {bound}")
    out: list[Partition] = []

    def rec(remaining: int, max_part: int, prefix: list[int]) -> None:
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for k in range(min(max_part, remaining), 0, -1):
            prefix.append(k)
            rec(remaining - k, k, prefix)
            prefix.pop()

    rec(m, m, [])
    return out


def to_beta_set(lam: Partition, length: int) -> BetaSet:
    if length < len(lam):
        raise LengthTooShort(f"length {length} < {len(lam)} parts")
    padded = tuple(lam) + (0,) * (length - len(lam))
    return tuple(sorted(padded[i] + (length - 1 - i) for i in range(length)))


def from_beta_set(beta: BetaSet) -> Partition:
    desc = sorted(beta, reverse=True)
    m = len(desc)
    lam = tuple(desc[i] - (m - 1 - i) for i in range(m))
    return as_partition(lam)


def d_core(lam: Partition, d: int) -> Partition:
    if d < 1:
        raise ValueError("d must be >= 1")
    m = len(lam)
    if m == 0:
        return ()
    beta = to_beta_set(lam, m)
    counts = [0] * d
    for b in beta:
        counts[b % d] += 1
    packed = [r + d * i for r in range(d) for i in range(counts[r])]
    return from_beta_set(tuple(packed))


def ennola_dual(d: int) -> int:
    """The degree swap d ↦ 2d (d odd), d/2 (d ≡ 2 mod 4), d (4 | d)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d % 2 == 1:
        return 2 * d
    if d % 4 == 2:
        return d // 2
    return d


def staircase(k: int) -> Partition:
    """δ_k = (k, k−1, …, 1); δ_0 is empty."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return tuple(range(k, 0, -1))


def staircase_parameter(lam: Partition) -> int | None:
    """k with lam = δ_k, or None."""
    k = len(lam)
    return k if tuple(lam) == staircase(k) else None
