"""Root-datum construction, validation, lattice functors, and the catalog."""

import json

import pytest

from blockatlas.abelian import IntMatrix
from blockatlas.errors import InvalidDatum, InvalidWitness, ParseError
from blockatlas.rootdata import (
    RootDatumWithAction,
    catalog,
    datum_from_dict,
    datum_to_dict,
    derived_and_abelianized,
    is_induced,
    kottwitz_target,
    load_datum,
    pi1,
)

SWAP = ((0, 1), (1, 0))


# ---------------------------------------------------------------- validation


def test_pairing_must_be_two():
    with pytest.raises(InvalidDatum, match="pairing"):
        RootDatumWithAction(1, coroots=((1,),), roots=((1,),),
                            galois=(("F", IntMatrix.identity(1)),))


def test_root_coroot_counts_must_match():
    with pytest.raises(InvalidDatum, match="matched pairs"):
        RootDatumWithAction(1, coroots=((1,), (-1,)), roots=((2,),),
                            galois=(("F", IntMatrix.identity(1)),))


def test_operator_must_permute_coroots():
    g = ((2, 1), (1, 1))  # unimodular, but sends (1,0) to (2,1)
    with pytest.raises(InvalidDatum, match="outside the coroot set"):
        RootDatumWithAction(
            2,
            coroots=((1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (-1, -1)),
            roots=((2, -1), (-1, 2), (1, 1), (-2, 1), (1, -2), (-1, -1)),
            galois=(("F", g),))


def test_operator_must_move_roots_compatibly():
    # reflection fixing the coroot line but twisting the paired roots
    g = ((-1, 0), (0, 1))
    with pytest.raises(InvalidDatum, match="compatibly"):
        RootDatumWithAction(2, coroots=((1, 0), (-1, 0)),
                            roots=((2, 1), (-2, -1)),
                            galois=(("F", g),))


def test_label_bookkeeping():
    eye = IntMatrix.identity(1)
    with pytest.raises(InvalidDatum, match="wild"):
        RootDatumWithAction(1, galois=(("s", eye), ("F", eye)),
                            wild=("s",), frobenius="F")
    with pytest.raises(InvalidDatum, match="frobenius"):
        RootDatumWithAction(1, galois=(("s", eye),), frobenius="F")
    with pytest.raises(InvalidDatum, match="duplicate"):
        RootDatumWithAction(1, galois=(("F", eye), ("F", eye)), frobenius="F")
    with pytest.raises(InvalidDatum, match="not declared"):
        RootDatumWithAction(1, galois=(("F", eye),), inertia=("s",),
                            frobenius="F")


def test_operators_must_be_unimodular():
    with pytest.raises(InvalidDatum, match="unimodular"):
        RootDatumWithAction(1, galois=(("F", ((2,),)),), frobenius="F")


def test_frobenius_must_normalize_inertia():
    rot = ((0, -1), (1, 0))          # order four
    swap = SWAP                      # conjugates rot to its inverse: fine
    RootDatumWithAction(2, galois=(("r", rot), ("F", swap)),
                        inertia=("r",), frobenius="F")
    sign = ((-1, 0), (0, 1))
    shear = ((1, 1), (0, 1))         # conjugate of sign leaves the group
    with pytest.raises(InvalidDatum, match="normalize"):
        RootDatumWithAction(2, galois=(("s", sign), ("F", shear)),
                            inertia=("s",), frobenius="F")


def test_wild_image_must_be_normal():
    sign = ((-1, 0), (0, 1))
    other = ((1, 0), (0, -1))
    # swap conjugates sign to other, which is outside the wild image
    with pytest.raises(InvalidDatum, match="normal"):
        RootDatumWithAction(
            2, galois=(("w", sign), ("s", SWAP), ("F", IntMatrix.identity(2))),
            inertia=("w", "s"), wild=("w",), frobenius="F")
    # declaring both reflections wild makes the image normal again
    RootDatumWithAction(
        2, galois=(("w", sign), ("v", other), ("s", SWAP),
                   ("F", IntMatrix.identity(2))),
        inertia=("w", "v", "s"), wild=("w", "v"), frobenius="F")


def test_tame_quotient_order():
    from blockatlas.rootdata import tame_quotient_order
    cat = catalog()
    assert tame_quotient_order(cat["norm_one_ramified"].datum) == 2
    assert tame_quotient_order(cat["norm_one_wild"].datum) == 1
    assert tame_quotient_order(cat["wild_plus_tame_rank2"].datum) == 3
    assert tame_quotient_order(cat["sl2_split"].datum) == 1


def test_infinite_inertia_image_is_rejected():
    shear = ((1, 1), (0, 1))
    with pytest.raises(InvalidDatum, match="too large"):
        RootDatumWithAction(2, galois=(("s", shear), ("F", IntMatrix.identity(2))),
                            inertia=("s",), frobenius="F")


def test_witness_shape_is_checked():
    bad = IntMatrix(((2, 0), (0, 1)))
    with pytest.raises(InvalidDatum, match="induced_witness"):
        RootDatumWithAction(2, galois=(("F", IntMatrix.identity(2)),),
                            frobenius="F", induced_witness=bad)


# ------------------------------------------------------------------ catalog


def test_catalog_names_are_stable():
    cat = catalog()
    assert set(cat) == {
        "split_torus_rank1", "split_torus_rank2", "unramified_induced_rank2",
        "tame_induced_rank2", "norm_one_ramified", "norm_one_unramified",
        "norm_one_wild", "wild_swap_rank2", "wild_induced_rank2",
        "wild_plus_tame_rank2", "sl2_split", "pgl2_split", "gl2_split",
        "sl3_split", "pgl3_split", "sp4_split", "su3_unramified",
        "gl2_inner_twist",
    }
    for name, entry in cat.items():
        assert entry.name == name
    assert not cat["gl2_inner_twist"].quasi_split
    assert cat["norm_one_wild"].residue_chars == (2,)


def test_catalog_pi1_structures():
    # classical fundamental groups: simply connected trivial, adjoint cyclic
    expected = {
        "split_torus_rank1": "Z",
        "split_torus_rank2": "Z + Z",
        "unramified_induced_rank2": "Z + Z",
        "tame_induced_rank2": "Z + Z",
        "norm_one_ramified": "Z",
        "norm_one_unramified": "Z",
        "norm_one_wild": "Z",
        "wild_swap_rank2": "Z + Z",
        "wild_induced_rank2": "Z + Z",
        "wild_plus_tame_rank2": "Z + Z",
        "sl2_split": "0",
        "pgl2_split": "Z/2",
        "gl2_split": "Z",
        "sl3_split": "0",
        "pgl3_split": "Z/3",
        "sp4_split": "0",
        "su3_unramified": "0",
        "gl2_inner_twist": "Z",
    }
    assert {n: pi1(e.datum).describe() for n, e in catalog().items()} == expected


def test_catalog_kottwitz_structures():
    # inertia coinvariants then Frobenius fixed points, by hand:
    # norm_one_ramified: Z/(2) fixed by identity; tame_induced: swap
    # coinvariants Z with Frobenius acting by -1; wild_plus_tame: the
    # negation and rotation relations already exhaust the lattice.
    expected = {
        "split_torus_rank1": "Z",
        "split_torus_rank2": "Z + Z",
        "unramified_induced_rank2": "Z",
        "tame_induced_rank2": "0",
        "norm_one_ramified": "Z/2",
        "norm_one_unramified": "0",
        "norm_one_wild": "Z/2",
        "wild_swap_rank2": "Z",
        "wild_induced_rank2": "0",
        "wild_plus_tame_rank2": "0",
        "sl2_split": "0",
        "pgl2_split": "Z/2",
        "gl2_split": "Z",
        "sl3_split": "0",
        "pgl3_split": "Z/3",
        "sp4_split": "0",
        "su3_unramified": "0",
        "gl2_inner_twist": "Z",
    }
    got = {n: kottwitz_target(e.datum).describe() for n, e in catalog().items()}
    assert got == expected


def test_tame_witnesses_really_are_permuted():
    for entry in catalog().values():
        if entry.tame_witness is None:
            continue
        assert is_induced(entry.datum.inertia_matrices, entry.tame_witness)


def test_induced_witnesses_cover_the_wild_part():
    for entry in catalog().values():
        if entry.datum.induced_witness is None:
            continue
        assert is_induced(entry.datum.wild_matrices,
                          entry.datum.induced_witness)


# --------------------------------------------------------- derived sequence


def test_derived_and_abelianized_gl2():
    da = derived_and_abelianized(catalog()["gl2_split"].datum)
    assert da.pi1_der.is_trivial
    assert da.ab_rank == 1
    assert da.cochar_ab.free_rank == 1 and not da.cochar_ab.invariant_factors
    assert dict(da.ab_action)["F"] == IntMatrix.identity(1)


def test_derived_and_abelianized_semisimple():
    da = derived_and_abelianized(catalog()["pgl2_split"].datum)
    assert da.pi1_der.describe() == "Z/2"
    assert da.ab_rank == 0
    da = derived_and_abelianized(catalog()["sl3_split"].datum)
    assert da.pi1_der.is_trivial and da.ab_rank == 0


def test_abelianized_action_descends():
    # unitary-type twist of the gl2 datum: swap acts trivially on the
    # center direction, so the descended operator is the identity
    datum = RootDatumWithAction(
        2, coroots=((1, -1), (-1, 1)), roots=((1, -1), (-1, 1)),
        galois=(("F", SWAP),), frobenius="F")
    da = derived_and_abelianized(datum)
    assert da.ab_rank == 1
    assert dict(da.ab_action)["F"] == IntMatrix.identity(1)


def test_torus_has_no_derived_part():
    da = derived_and_abelianized(catalog()["split_torus_rank2"].datum)
    assert da.pi1_der.is_trivial
    assert da.ab_rank == 2
    assert dict(da.ab_action)["F"] == IntMatrix.identity(2)


# ----------------------------------------------------------------- induced


def test_is_induced_basics():
    eye = IntMatrix.identity(2)
    assert is_induced([IntMatrix(SWAP)], eye)
    assert not is_induced([IntMatrix(((-1, 0), (0, 1)))], eye)
    assert is_induced([], eye)


def test_is_induced_nonstandard_basis():
    # g swaps the basis (1,0), (1,1) but not the standard one
    g = IntMatrix(((1, 0), (1, -1)))
    witness = IntMatrix(((1, 1), (0, 1)))
    assert is_induced([g], witness)
    assert not is_induced([g], IntMatrix.identity(2))


def test_is_induced_rejects_bad_witnesses():
    with pytest.raises(InvalidWitness, match="square"):
        is_induced([], IntMatrix(((1,), (0,))))
    with pytest.raises(InvalidWitness, match="basis"):
        is_induced([], IntMatrix(((2, 0), (0, 1))))
    with pytest.raises(InvalidWitness, match="dimension"):
        is_induced([IntMatrix.identity(3)], IntMatrix.identity(2))


# -------------------------------------------------------------------- JSON


def test_json_round_trip_catalog():
    for entry in catalog().values():
        blob = json.dumps(datum_to_dict(entry.datum))
        assert load_datum(blob) == entry.datum


def test_load_datum_reports_location():
    with pytest.raises(ParseError) as info:
        load_datum('{"rank": 1,\n  "galois": [}')
    assert info.value.line == 2
    assert info.value.column is not None


def test_load_datum_field_errors():
    with pytest.raises(ParseError, match="frobenius"):
        load_datum('{"rank": 1, "galois": [{"label": "F", "matrix": [[1]]}]}')
    with pytest.raises(ParseError, match="label"):
        load_datum('{"rank": 1, "galois": [{"matrix": [[1]]}], "frobenius": "F"}')
    with pytest.raises(ParseError, match="malformed"):
        load_datum('{"rank": 1, "frobenius": "F",'
                   ' "galois": [{"label": "F", "matrix": [[1], [2, 3]]}]}')
    with pytest.raises(ParseError, match="list of labels"):
        load_datum('{"rank": 1, "frobenius": "F", "inertia": [1],'
                   ' "galois": [{"label": "F", "matrix": [[1]]}]}')


def test_semantic_errors_stay_invalid_datum():
    blob = json.dumps({
        "rank": 1,
        "coroots": [[1]], "roots": [[1]],
        "galois": [{"label": "F", "matrix": [[1]]}],
        "frobenius": "F",
    })
    with pytest.raises(InvalidDatum, match="pairing"):
        load_datum(blob)


def test_witness_survives_round_trip():
    datum = catalog()["wild_swap_rank2"].datum
    again = datum_from_dict(datum_to_dict(datum))
    assert again.induced_witness == IntMatrix.identity(2)
