"""Cross-prime closure of d-series, D-series joins, and defect bounds.

The closure engine merges the d-series partitions for every admissible d
(those witnessed by an odd good prime not dividing q) with a union-find,
recording one certificate event per effective merge.  Processing order is
fixed — d ascending, blocks by key, members in label order — so certificates
are byte-reproducible.  A result with more than one class is reported as
"inconclusive": the witnessed mechanism alone does not decide it, and the
engine never claims a refutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .arith import GroupTypeTag, PrimePower, admissible_d, is_good, mult_order
from .errors import InvariantViolation, NotSupported
from .partitions import d_core, staircase_parameter
from .symbols import hook_core
from .unipotent import UnipotentLabel, d_series, enumerate_labels, series_core_render


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True

    def classes(self, order) -> tuple:
        by_root: dict = {}
        for x in order:
            by_root.setdefault(self.find(x), []).append(x)
        return tuple(tuple(members) for members in
                     sorted(by_root.values(), key=lambda ms: ms[0]))


@dataclass(frozen=True)
class MergeEvent:
    label_a: str
    label_b: str
    d: int
    ell: int


@dataclass
class FusionResult:
    group_type: GroupTypeTag
    q: PrimePower
    d_max: int
    admissible: dict          # d -> witnessing ell
    classes: tuple            # tuple of tuples of label renders
    certificate: tuple        # MergeEvents in processing order
    verdict: str              # "single_class" | "inconclusive"
    touches_degenerate: bool = False
    plugin_type: Optional[str] = None

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def validate(self) -> None:
        labels = [lab for cls in self.classes for lab in cls]
        uf = _UnionFind(labels)
        for ev in self.certificate:
            if ev.d not in self.admissible or self.admissible[ev.d] != ev.ell:
                raise InvariantViolation(f"event {ev} not backed by a witness")
            if ev.ell % 2 == 0 or not is_good(ev.ell, self.group_type):
                raise InvariantViolation(f"witness {ev.ell} fails hypotheses")
            if self.q.q % ev.ell == 0 or mult_order(self.q.q, ev.ell) != ev.d:
                raise InvariantViolation(f"witness {ev.ell} has wrong order")
            if not uf.union(ev.label_a, ev.label_b):
                raise InvariantViolation(f"event {ev} merges nothing")
        replayed = {frozenset(cls) for cls in uf.classes(labels)}
        if replayed != {frozenset(cls) for cls in self.classes}:
            raise InvariantViolation("certificate replay does not reproduce classes")


def _series_blocks(group_type: GroupTypeTag, d: int, plugin) -> list[tuple]:
    """[(key, [label renders...]), ...] sorted, for classical or plugin data."""
    if plugin is not None and not group_type.is_classical:
        return plugin.series_blocks(group_type.family, d)
    part = d_series(group_type, d)
    return [(key, [lab.render() for lab in members]) for key, members in part.blocks]


def _label_renders(group_type: GroupTypeTag, plugin) -> tuple[list[str], bool]:
    if plugin is not None and not group_type.is_classical:
        return plugin.labels(group_type.family), False
    labs = enumerate_labels(group_type)
    return [lab.render() for lab in labs], any(lab.marker for lab in labs)


def fusion_closure(group_type: GroupTypeTag, q: PrimePower,
                   d_max: Optional[int] = None, plugin=None) -> FusionResult:
    """Union-find closure of the d-series over all admissible d ≤ d_max."""
    if d_max is None:
        d_max = 2 * (group_type.rank + 1)
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    if not group_type.is_classical and plugin is None:
        raise NotSupported(
            f"family {group_type.family} needs plugin data for fusion")
    names, degenerate = _label_renders(group_type, plugin)
    witnesses = admissible_d(group_type, q, d_max)
    uf = _UnionFind(names)
    events = []
    for d in sorted(witnesses):
        ell = witnesses[d]
        for _key, members in _series_blocks(group_type, d, plugin):
            anchor = members[0]
            for other in members[1:]:
                if uf.union(anchor, other):
                    events.append(MergeEvent(anchor, other, d, ell))
    result = FusionResult(
        group_type=group_type, q=q, d_max=d_max, admissible=witnesses,
        classes=uf.classes(names), certificate=tuple(events),
        verdict="single_class" if len(uf.classes(names)) == 1 else "inconclusive",
        touches_degenerate=degenerate,
        plugin_type=None if group_type.is_classical else group_type.family)
    result.validate()
    return result


@dataclass
class DSeriesJoin:
    group_type: GroupTypeTag
    D: tuple
    single: bool
    classes: tuple  # tuple of tuples of label renders

    def __bool__(self) -> bool:
        return self.single


def is_single_D_series(group_type: GroupTypeTag, D, plugin=None) -> DSeriesJoin:
    """Join (transitive common coarsening) of the d-series for d in D."""
    ds = tuple(sorted(set(int(d) for d in D)))
    if not ds or any(d < 1 for d in ds):
        raise ValueError("D must be a non-empty set of positive integers")
    if not group_type.is_classical and plugin is None:
        raise NotSupported(
            f"family {group_type.family} needs plugin data for D-series checks")
    names, _ = _label_renders(group_type, plugin)
    uf = _UnionFind(names)
    for d in ds:
        for _key, members in _series_blocks(group_type, d, plugin):
            for other in members[1:]:
                uf.union(members[0], other)
    classes = uf.classes(names)
    return DSeriesJoin(group_type, ds, len(classes) == 1, classes)


# ------------------------------------------------------------ defect bounds

@dataclass(frozen=True)
class DefectBoundRow:
    core: str
    defect: int
    lhs: int
    rhs: int
    satisfied: bool
    base_case: bool = False


@dataclass
class DefectBoundReport:
    group_type: GroupTypeTag
    kind: str  # "primary" | "derived"
    rows: tuple

    @property
    def all_ok(self) -> bool:
        return all(row.satisfied for row in self.rows)

    def __bool__(self) -> bool:
        return self.all_ok


def _occurring_1series(group_type: GroupTypeTag) -> dict[str, int]:
    """core render -> defect parameter k, over the type's label set."""
    family = group_type.family
    out: dict[str, int] = {}
    for lab in enumerate_labels(group_type):
        if family in ("A", "2A"):
            core = d_core(lab.payload, 2 if family == "2A" else 1)
            k = staircase_parameter(core)
            if k is None:
                raise InvariantViolation(f"non-staircase core {core} at d=1")
            out["(" + ",".join(str(x) for x in core) + ")"] = k
        else:
            core = hook_core(lab.payload, 1)
            out[core.canonical().render()] = core.defect
    return out


def defect_bound_report(group_type: GroupTypeTag) -> DefectBoundReport:
    """The family's defect bound, checked for every occurring 1-series."""
    if not group_type.is_classical:
        raise NotSupported("defect bounds are defined for classical families")
    n = group_type.rank
    rows = []
    for core, k in sorted(_occurring_1series(group_type).items()):
        if group_type.family in ("A", "2A"):
            lhs, rhs = k * (k + 1), 2 * (n + 1)      # k(k+1)/2 <= n+1
        elif group_type.family in ("B", "C"):
            lhs, rhs = k * k - 1, 4 * n              # (k^2-1)/4 <= n
        else:
            lhs, rhs = k * k, 4 * n                  # k^2/4 <= n
        rows.append(DefectBoundRow(core, k, lhs, rhs, lhs <= rhs))
    return DefectBoundReport(group_type, "primary", tuple(rows))


def derived_inequality_check(group_type: GroupTypeTag) -> DefectBoundReport:
    """The sharpened rank-(n−2) inequality; k ≤ 2 are base cases."""
    if not group_type.is_classical:
        raise NotSupported("defect bounds are defined for classical families")
    n = group_type.rank
    if n < 2:
        raise ValueError("derived inequality needs rank >= 2")
    rows = []
    for core, k in sorted(_occurring_1series(group_type).items()):
        if group_type.family in ("A", "2A"):
            lhs, rhs = k * k - 3 * k + 2, 2 * (n - 2)    # /2 <= n-2
        elif group_type.family in ("B", "C"):
            lhs, rhs = k * k - 4 * k + 3, 4 * (n - 2)    # /4 <= n-2
        else:
            lhs, rhs = k * k - 4 * k + 4, 4 * (n - 2)    # /4 <= n-2
        base = k <= 2
        rows.append(DefectBoundRow(core, k, lhs, rhs,
                                   True if base else lhs <= rhs, base))
    return DefectBoundReport(group_type, "derived", tuple(rows))
