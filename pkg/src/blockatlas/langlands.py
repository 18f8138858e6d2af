"""Comparison of the two p-torsor groups attached to a root datum.

For a datum with cocharacter lattice X, inertia action I, and Frobenius F,
the group side computes the p-torsion of (X_I)^F — the p-part of the
arithmetic fundamental group of the maximally split torus — and the dual
side computes the F-coinvariants of the p-torsion of X_I, the component
group of the Frobenius-twisted fixed points on the dual torus.  For a
finite module an automorphism has kernel and cokernel of equal size, so the
two sides always have the same cardinality; :func:`bijection_check` verifies
that and reports both structures.

:func:`cornqs_check` evaluates the triviality criterion for the p-part of
the arithmetic fundamental group of the group itself: p must not divide the
order of the fundamental group of the derived subgroup, and the wild action
on the abelianized cocharacter lattice must permute a basis.  Both
hypotheses, the exactness transfer they rely on, and the conclusion are
computed independently so the implication itself is observable.

:func:`component_lemma_checks` verifies the three mechanizable claims of
the component-group lemma: torsion created by the wild quotient is p-local,
the unramified H^1 computed through the wild quotient agrees with the one
computed directly from the inertia coinvariants, and p-torsion of the torus
quotient injects into p-torsion of the fundamental-group quotient, before
and after taking Frobenius fixed points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .abelian import (
    FGAbelianGroup,
    IntMatrix,
    SubquotientMap,
    coinvariants,
    fixed_points,
    h1_cyclic,
    lattice_contains,
)
from .errors import InvariantViolation
from .rootdata import (
    RootDatumWithAction,
    derived_and_abelianized,
    is_induced,
    kottwitz_target,
    pi1,
    tame_quotient_order,
)

REGIME_PROVED = "proved"
REGIME_CONJECTURAL = "conjectural"


def _check_prime(p: int) -> None:
    if p < 2 or any(p % k == 0 for k in range(2, p)):
        raise ValueError(f"p = {p} is not prime")


def _inertia_descent(datum: RootDatumWithAction) -> FGAbelianGroup:
    return coinvariants(FGAbelianGroup.free(datum.rank),
                        datum.inertia_matrices)


def group_side_torsor(datum: RootDatumWithAction, p: int) -> FGAbelianGroup:
    """p-torsion of the Frobenius fixed points of the inertia coinvariants
    of the cocharacter lattice."""
    _check_prime(p)
    arithmetic = fixed_points(_inertia_descent(datum), datum.frobenius_matrix)
    return arithmetic.p_torsion(p)


def dual_side_torsor(datum: RootDatumWithAction, p: int) -> FGAbelianGroup:
    """Frobenius coinvariants of the p-torsion of the inertia coinvariants
    of the cocharacter lattice."""
    _check_prime(p)
    components = _inertia_descent(datum).p_torsion(p)
    return coinvariants(components, [datum.frobenius_matrix])


def _group_dict(group: FGAbelianGroup) -> dict:
    return {
        "structure": group.describe(),
        "invariant_factors": list(group.invariant_factors),
        "order": group.order(),
    }


@dataclass(frozen=True)
class TorsorReport:
    """Both torsor groups at p, with the regime the comparison lives in."""

    p: int
    regime: str
    group_side: FGAbelianGroup
    dual_side: FGAbelianGroup

    @property
    def order(self) -> int:
        return self.group_side.order()

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "regime": self.regime,
            "group_side": _group_dict(self.group_side),
            "dual_side": _group_dict(self.dual_side),
            "equal_cardinality": True,
        }


def bijection_check(datum: RootDatumWithAction, p: int,
                    quasi_split: bool = True) -> TorsorReport:
    """Compute both torsors and verify they have the same cardinality.

    Frobenius acts invertibly on the finite torsion of X_I, so for a valid
    datum the two cardinalities cannot differ; a mismatch therefore raises
    InvariantViolation rather than being reported.  The regime records whether the datum is
    quasi-split, where the simply transitive actions on both sides are
    established, or an inner twist, where the comparison is conjectural.
    """
    group = group_side_torsor(datum, p)
    dual = dual_side_torsor(datum, p)
    if group.order() != dual.order():
        raise InvariantViolation(
            f"torsor cardinalities disagree at p={p}: "
            f"{group.describe()} vs {dual.describe()}")
    regime = REGIME_PROVED if quasi_split else REGIME_CONJECTURAL
    return TorsorReport(p, regime, group, dual)


# ------------------------------------------------------- triviality criterion


@dataclass(frozen=True)
class CriterionReport:
    """Both hypotheses of the triviality criterion, and its conclusion.

    ``hypothesis_a``: p does not divide the order of the fundamental group
    of the derived subgroup.  ``hypothesis_b``: the wild operators permute a
    basis of the abelianized cocharacter lattice, and (the consequence
    actually used) the inertia coinvariants of that lattice have no
    p-torsion.  ``conclusion``: the p-part of the arithmetic fundamental
    group vanishes.  The implication A and B => conclusion is a theorem in
    the proved regime; every field is computed independently so the report
    can also exhibit hypothesis failures.
    """

    p: int
    regime: str
    derived_pi1_order: int
    hypothesis_a: bool
    wild_ab_induced: bool
    ab_coinvariants_p_free: bool
    sequence_exact_on_p_part: bool
    pi1_coinvariants_p_free: bool
    conclusion: bool

    @property
    def hypothesis_b(self) -> bool:
        return self.wild_ab_induced and self.ab_coinvariants_p_free

    @property
    def implication_holds(self) -> bool:
        return not (self.hypothesis_a and self.hypothesis_b) or self.conclusion

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "regime": self.regime,
            "derived_pi1_order": self.derived_pi1_order,
            "hypothesis_a": self.hypothesis_a,
            "wild_ab_induced": self.wild_ab_induced,
            "ab_coinvariants_p_free": self.ab_coinvariants_p_free,
            "hypothesis_b": self.hypothesis_b,
            "sequence_exact_on_p_part": self.sequence_exact_on_p_part,
            "pi1_coinvariants_p_free": self.pi1_coinvariants_p_free,
            "conclusion": self.conclusion,
            "implication_holds": self.implication_holds,
        }


def _subgroups_equal(a: FGAbelianGroup, b: FGAbelianGroup) -> bool:
    return (lattice_contains(a.sub, b.sub) and lattice_contains(b.sub, a.sub))


def cornqs_check(datum: RootDatumWithAction, p: int,
                 ab_witness: Optional[IntMatrix] = None,
                 quasi_split: bool = True) -> CriterionReport:
    """Evaluate the triviality criterion for the p-part of the arithmetic
    fundamental group.

    ``ab_witness`` optionally names the basis of the abelianized lattice the
    wild operators are claimed to permute; the standard basis is tried when
    it is omitted.  A malformed witness raises InvalidWitness.
    """
    _check_prime(p)
    da = derived_and_abelianized(datum)
    der_order = da.pi1_der.order()
    if der_order is None:
        raise InvariantViolation("derived fundamental group must be finite")
    hypothesis_a = der_order % p != 0

    ab_ops = dict(da.ab_action)
    wild_ab = [ab_ops[label] for label in datum.wild]
    witness = ab_witness if ab_witness is not None \
        else IntMatrix.identity(da.ab_rank)
    wild_ab_induced = is_induced(wild_ab, witness)

    inert = datum.inertia_matrices
    ab_descent = coinvariants(da.cochar_ab, inert)
    ab_p_free = ab_descent.p_torsion(p).is_trivial

    pi1_descent = coinvariants(pi1(datum), inert)
    der_descent = coinvariants(da.pi1_der, inert)
    left = SubquotientMap(der_descent.p_torsion(p), pi1_descent.p_torsion(p))
    right = SubquotientMap(pi1_descent.p_torsion(p), ab_descent.p_torsion(p))
    sequence_exact = (left.well_defined() and right.well_defined()
                      and right.surjective()
                      and _subgroups_equal(left.image(), right.kernel()))

    pi1_p_free = pi1_descent.p_torsion(p).is_trivial
    conclusion = kottwitz_target(datum).p_torsion(p).is_trivial
    regime = REGIME_PROVED if quasi_split else REGIME_CONJECTURAL
    return CriterionReport(
        p=p, regime=regime, derived_pi1_order=der_order,
        hypothesis_a=hypothesis_a, wild_ab_induced=wild_ab_induced,
        ab_coinvariants_p_free=ab_p_free,
        sequence_exact_on_p_part=sequence_exact,
        pi1_coinvariants_p_free=pi1_p_free, conclusion=conclusion)


# --------------------------------------------------------- component lemma


@dataclass(frozen=True)
class ComponentLemmaReport:
    """Mechanized component-group lemma, one boolean per claim.

    ``wild_torsion_p_local``: torsion created by the wild coinvariants
    consists of p-groups.  ``h1_agree_cochar`` / ``h1_agree_pi1``: the
    unramified H^1 of the p-torsion components, computed directly from the
    inertia coinvariants and computed through the wild quotient, have the
    same invariant factors.  ``torsion_injects`` (and ``..._fixed``): the
    p-torsion of the torus-side quotient embeds in the p-torsion of the
    fundamental-group quotient, before (after) Frobenius fixed points.
    ``tame_order_coprime`` flags the sufficient condition for the H^1
    transfer: the tame quotient of the inertia image has order prime to p.
    """

    p: int
    tame_action_order: int
    tame_order_coprime: bool
    wild_torsion_p_local: bool
    h1_agree_cochar: bool
    h1_agree_pi1: bool
    torsion_injects: bool
    torsion_injects_fixed: bool

    @property
    def all_ok(self) -> bool:
        return (self.wild_torsion_p_local and self.h1_agree_cochar
                and self.h1_agree_pi1 and self.torsion_injects
                and self.torsion_injects_fixed)

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "tame_action_order": self.tame_action_order,
            "tame_order_coprime": self.tame_order_coprime,
            "wild_torsion_p_local": self.wild_torsion_p_local,
            "h1_agree_cochar": self.h1_agree_cochar,
            "h1_agree_pi1": self.h1_agree_pi1,
            "torsion_injects": self.torsion_injects,
            "torsion_injects_fixed": self.torsion_injects_fixed,
            "all_ok": self.all_ok,
        }


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def component_lemma_checks(datum: RootDatumWithAction,
                           p: int) -> ComponentLemmaReport:
    _check_prime(p)
    lattice = FGAbelianGroup.free(datum.rank)
    fundamental = pi1(datum)
    inert = datum.inertia_matrices
    wild = datum.wild_matrices
    frob = datum.frobenius_matrix

    wild_torsion = coinvariants(lattice, wild).torsion()
    p_local = all(_is_p_power(d, p) for d in wild_torsion.invariant_factors)

    def straight(module: FGAbelianGroup) -> tuple:
        return h1_cyclic(coinvariants(module, inert).p_torsion(p),
                         frob).invariant_factors

    def through_wild(module: FGAbelianGroup) -> tuple:
        staged = coinvariants(module, wild).p_torsion(p)
        return h1_cyclic(coinvariants(staged, inert), frob).invariant_factors

    h1_cochar = straight(lattice) == through_wild(lattice)
    h1_pi1 = straight(fundamental) == through_wild(fundamental)

    torus_part = coinvariants(lattice, inert).p_torsion(p)
    pi1_part = coinvariants(fundamental, inert).p_torsion(p)
    plain = SubquotientMap(torus_part, pi1_part)
    injects = plain.well_defined() and plain.injective()
    fixed = SubquotientMap(fixed_points(torus_part, frob),
                           fixed_points(pi1_part, frob))
    injects_fixed = fixed.well_defined() and fixed.injective()

    tame_order = tame_quotient_order(datum)
    return ComponentLemmaReport(
        p=p, tame_action_order=tame_order,
        tame_order_coprime=tame_order % p != 0,
        wild_torsion_p_local=p_local,
        h1_agree_cochar=h1_cochar, h1_agree_pi1=h1_pi1,
        torsion_injects=injects, torsion_injects_fixed=injects_fixed)
