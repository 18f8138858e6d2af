"""Two-row symbols: rank, defect, the involution phi, hooks, cohooks, cores,
and bounded enumeration.

A symbol is a pair of strictly increasing rows of non-negative integers,
considered up to simultaneous shift (prepend 0 to both rows, bump everything
by one) and up to row swap.  Instances always store the shift-reduced form —
never 0 in both rows — but keep their row order as constructed; identity
questions at the class level go through `class_key`/`same_class`, and
`canonical` picks the distinguished representative (larger row first, ties by
lexicographically smaller row).

Moves:
  * d-hook at x: x and x−d in the same row, x−d absent there; replace.
    Rank drops by d, defect unchanged.
  * d-cohook at x: x in one row, x−d ≥ 0 absent from the *other* row; move it
    across.  Rank drops by d, defect moves by ±2.
Cores iterate moves to a fixed point; the order does not matter (the test
suite checks confluence exhaustively on small grids instead of assuming it).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import BoundExceeded
from .limits import symbol_rank_bound
from .partitions import partitions_of, to_beta_set

DEFECT_ODD = frozenset({1, 3})      # types B and C
DEFECT_MOD4_0 = frozenset({0})      # type D
DEFECT_MOD4_2 = frozenset({2})      # type 2D
DEFECT_ANY = frozenset({0, 1, 2, 3})


def _clean_row(row) -> tuple:
    out = tuple(sorted(int(x) for x in row))
    if any(x < 0 for x in out):
        raise ValueError(f"negative entry in row {out}")
    if len(set(out)) != len(out):
        raise ValueError(f"repeated entry in row {out}")
    return out


@dataclass(frozen=True)
class Symbol:
    row_s: tuple
    row_t: tuple

    def __post_init__(self):
        object.__setattr__(self, "row_s", _clean_row(self.row_s))
        object.__setattr__(self, "row_t", _clean_row(self.row_t))
        if self.row_s and self.row_t and self.row_s[0] == 0 and self.row_t[0] == 0:
            raise ValueError("not reduced: 0 in both rows (use make_symbol)")

    @property
    def rank(self) -> int:
        m = len(self.row_s) + len(self.row_t)
        return sum(self.row_s) + sum(self.row_t) - ((m - 1) ** 2) // 4

    @property
    def defect(self) -> int:
        return abs(len(self.row_s) - len(self.row_t))

    @property
    def is_degenerate(self) -> bool:
        return self.row_s == self.row_t

    def swap(self) -> "Symbol":
        return Symbol(self.row_t, self.row_s)

    def canonical(self) -> "Symbol":
        a, b = self.row_s, self.row_t
        if (len(b), a) > (len(a), b):  # larger row first; tie -> lex smaller
            a, b = b, a
        return Symbol(a, b)

    def class_key(self) -> tuple:
        c = self.canonical()
        return (c.row_s, c.row_t)

    def same_class(self, other: "Symbol") -> bool:
        return self.class_key() == other.class_key()

    def render(self) -> str:
        def row(r):
            return "{" + ",".join(str(x) for x in r) + "}"
        return f"({row(self.row_s)},{row(self.row_t)})"

    def __str__(self) -> str:
        return self.render()


def make_symbol(row_s, row_t) -> Symbol:
    """Construct with shift reduction applied."""
    s, t = _clean_row(row_s), _clean_row(row_t)
    while s and t and s[0] == 0 and t[0] == 0:
        s = tuple(x - 1 for x in s[1:])
        t = tuple(x - 1 for x in t[1:])
    return Symbol(s, t)


def phi(sym: Symbol) -> Symbol:
    """Regroup entries by parity: ({S_e ∪ T_o}, {T_e ∪ S_o}), re-reduced."""
    s_e = [x for x in sym.row_s if x % 2 == 0]
    s_o = [x for x in sym.row_s if x % 2 == 1]
    t_e = [x for x in sym.row_t if x % 2 == 0]
    t_o = [x for x in sym.row_t if x % 2 == 1]
    return make_symbol(s_e + t_o, t_e + s_o)


# ------------------------------------------------------------------- moves

def hook_removals(sym: Symbol, d: int) -> list[Symbol]:
    """Every symbol obtained by removing one d-hook."""
    if d < 1:
        raise ValueError("d must be >= 1")
    out = []
    for which, row in ((0, sym.row_s), (1, sym.row_t)):
        for x in row:
            if x >= d and (x - d) not in row:
                new = tuple(y for y in row if y != x) + (x - d,)
                if which == 0:
                    out.append(make_symbol(new, sym.row_t))
                else:
                    out.append(make_symbol(sym.row_s, new))
    return out


def cohook_removals(sym: Symbol, d: int) -> list[Symbol]:
    """Every symbol obtained by removing one d-cohook (cross-row move)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    out = []
    for x in sym.row_s:
        if x >= d and (x - d) not in sym.row_t:
            out.append(make_symbol(tuple(y for y in sym.row_s if y != x),
                                   sym.row_t + (x - d,)))
    for x in sym.row_t:
        if x >= d and (x - d) not in sym.row_s:
            out.append(make_symbol(sym.row_s + (x - d,),
                                   tuple(y for y in sym.row_t if y != x)))
    return out


@functools.lru_cache(maxsize=None)
def hook_core(sym: Symbol, d: int) -> Symbol:
    moves = hook_removals(sym, d)
    return sym if not moves else hook_core(moves[0], d)


@functools.lru_cache(maxsize=None)
def cohook_core(sym: Symbol, d: int) -> Symbol:
    moves = cohook_removals(sym, d)
    return sym if not moves else cohook_core(moves[0], d)


# ------------------------------------------------------------- enumeration

def _symbol_from_pair(alpha, beta, defect: int) -> Symbol:
    # beta-set pair construction; the reduction makes it length-independent
    length = max(len(beta), len(alpha) - defect)
    return make_symbol(to_beta_set(alpha, length + defect),
                       to_beta_set(beta, length))


def enumerate_symbols(n: int, defect_filter: frozenset | set) -> list[Symbol]:
    """All reduced symbols of rank n with defect ≡ r (mod 4) for some r in
    the filter, one canonical representative per swap class, sorted by
    (defect, rows)."""
    if n < 0:
        raise ValueError("rank must be >= 0")
    bound = symbol_rank_bound()
    if n > bound:
        raise BoundExceeded(f"rank {n} exceeds the configured bound {bound}")
    residues = {r % 4 for r in defect_filter}
    seen = {}
    defect = 0
    while defect ** 2 // 4 <= n:
        if defect % 4 in residues:
            weight = n - defect ** 2 // 4
            for wa in range(weight + 1):
                for alpha in partitions_of(wa):
                    for beta in partitions_of(weight - wa):
                        sym = _symbol_from_pair(alpha, beta, defect)
                        assert sym.rank == n and sym.defect == defect
                        seen.setdefault(sym.class_key(), sym.canonical())
        defect += 1
    return sorted(seen.values(), key=lambda s: (s.defect, s.row_s, s.row_t))
