from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cinfty.core import AlgebraError, FiniteModule, MultilinearMap, ResourceBoundError, identity_map
from cinfty.fixtures import (
    dgca_battery,
    exterior_algebra,
    nonassociative_algebra,
    symmetric_p2_morphism,
    truncated_polynomial,
)
from cinfty.forms import SimplicialComplex, cochain_algebra
from cinfty.structures import (
    AInftyMorphism,
    AInftyStructure,
    ChainComplex,
    check_cinfty,
    check_cinfty_morphism,
    check_complex,
    check_dgca,
    check_morphism,
    check_stasheff,
    enumerate_shuffles,
    hom_boundary,
    morphism_defect,
    shuffle_defect,
)


def _complex(differential: dict) -> ChainComplex:
    module = FiniteModule("K", [("x", 0), ("y", 1), ("z", 2)])
    return ChainComplex(module, MultilinearMap(module, module, 1, 1, table=differential, name="d"))


def test_check_complex():
    assert check_complex(_complex({("x",): {"y": 1}})).passed
    report = check_complex(_complex({("x",): {"y": 1}, ("y",): {"z": 1}}))
    assert not report.passed
    assert report.violations[0].inputs == ["x"]


def test_cochains_of_the_circle_form_a_complex():
    assert check_complex(cochain_algebra(SimplicialComplex.triangle_boundary()).complex).passed


@pytest.mark.parametrize("q, r, count", [(1, 1, 2), (2, 1, 3), (2, 2, 6), (3, 2, 10)])
def test_enumerate_shuffles_counts(q, r, count):
    shuffles = enumerate_shuffles(q, r)
    assert len(shuffles) == count == comb(q + r, q)
    assert len(set(shuffles)) == count


def test_enumerate_shuffles_bound():
    with pytest.raises(ResourceBoundError):
        enumerate_shuffles(5, 4)


def test_shuffle_defect_vanishes_on_commutative_products():
    for A in dgca_battery():
        assert shuffle_defect(A.product, 1, 1).is_zero()


def test_shuffle_defect_detects_the_cup_product():
    cup = cochain_algebra(SimplicialComplex.standard(1)).product
    defect = shuffle_defect(cup, 1, 1)
    assert defect.on_basis(("v0", "e01"))


def test_shuffle_defect_arity_mismatch(exterior_xy):
    with pytest.raises(AlgebraError):
        shuffle_defect(exterior_xy.product, 2, 1)


def test_battery_is_a_family_of_dgcas():
    for A in dgca_battery():
        assert check_dgca(A).passed
        assert check_stasheff(A.as_ainfty(4)).passed
        assert check_cinfty(A.as_ainfty(4)).passed


def test_cup_product_is_not_commutative():
    report = check_dgca(cochain_algebra(SimplicialComplex.triangle_boundary()))
    assert not report.passed
    assert any("graded commutativity: fail" == note for note in report.notes)


def test_nonassociative_product_fails_stasheff_at_arity_three():
    report = check_stasheff(nonassociative_algebra(), 3)
    assert not report.passed
    assert all(len(v.inputs) == 3 for v in report.violations)


def test_structure_rejects_wrong_degree(exterior_xy):
    wrong = MultilinearMap(exterior_xy.module, exterior_xy.module, 2, 0, table={}, name="m3")
    with pytest.raises(AlgebraError):
        AInftyStructure(exterior_xy.complex, {3: wrong})


def test_morphism_needs_linear_part(exterior_xy):
    A = exterior_xy.as_ainfty(2)
    with pytest.raises(AlgebraError):
        AInftyMorphism(A, A, {})


def test_non_multiplicative_chain_map_has_a_defect_at_arity_two():
    A = truncated_polynomial(2)
    p1 = MultilinearMap(A.module, A.module, 1, 0, table={("1",): {"1": 1}, ("x",): {"x": 1}}, name="p1")
    P = AInftyMorphism(A.as_ainfty(2), A.as_ainfty(2), {1: p1}, cutoff=2)
    assert morphism_defect(P, 1).is_zero()
    defect = morphism_defect(P, 2)
    assert set(defect.on_basis(("x", "x"))) == {"x2"}
    assert not check_morphism(P, 2).passed


def test_symmetric_p2_is_a_morphism_but_not_cinfty():
    P = symmetric_p2_morphism()
    assert check_morphism(P, 2).passed
    report = check_cinfty_morphism(P, 2)
    assert not report.passed
    assert shuffle_defect(P.p(2), 1, 1).on_basis(("x", "x")) == {"x": Fraction(2)}


def test_strict_identity_morphism_passes():
    A = exterior_algebra(("x", "y", "z")).as_ainfty(3)
    P = AInftyMorphism(A, A, {1: identity_map(A.module)}, cutoff=3)
    assert check_cinfty_morphism(P, 3).passed


def test_hom_boundary_of_a_chain_map_vanishes(interval_model):
    I = interval_model.integration_operator()
    assert hom_boundary(I, interval_model.complex, interval_model.cochains).is_zero()


@settings(max_examples=20, deadline=None)
@given(st.data())
def test_hom_boundary_squares_to_zero(data):
    C = cochain_algebra(SimplicialComplex.standard(1)).complex
    module = C.module
    coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4)
    table = {}
    for a in module.basis:
        for b in module.basis:
            degree = module.degree(a) + module.degree(b)
            targets = module.basis_of_degree(degree)
            if targets:
                table[(a, b)] = {t: data.draw(coeff) for t in targets}
    f = MultilinearMap(module, module, 2, 0, table=table, name="f")
    assert hom_boundary(hom_boundary(f, C, C), C, C).is_zero()
