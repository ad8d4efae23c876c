from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cinfty.core import AlgebraError, ConstructionError, MultilinearMap, ResourceBoundError, map_equal
from cinfty.cumulants import (
    block_product,
    boolean_k2_crosscheck,
    bracketing_homotopy,
    cumulant,
    cumulant_expansion,
    cumulant_upto_homotopy,
    expansion_to_text,
    matching_chain,
    mobius_coefficient,
    moment,
    moments_from_cumulants,
    morphism_cumulant,
    nullhomotopy_from_graph,
    perfect_matchings,
    second_level_homotopy,
)
from cinfty.fixtures import dgca_battery, identity_morphism, truncated_polynomial
from cinfty.partitions import build_cumulant_complex, build_refinement_graph, enumerate_partitions
from cinfty.structures import check_cinfty_morphism, hom_boundary, shuffle_defect
from cinfty.transfer import enumerate_trees


@pytest.mark.parametrize("blocks, value", [(1, 1), (2, -1), (3, 2), (4, -6), (5, 24)])
def test_mobius_coefficient(blocks, value):
    assert mobius_coefficient(blocks) == value


def test_mobius_coefficients_sum_to_zero():
    for n in range(2, 9):
        assert sum(mobius_coefficient(pi) for pi in enumerate_partitions(n)) == 0
    with pytest.raises(AlgebraError):
        mobius_coefficient(0)


def test_expansion_text():
    assert expansion_to_text(1) == "e(a)"
    assert expansion_to_text(2) == "e(ab) - e(a)e(b)"
    assert expansion_to_text(3) == "e(abc) - e(ab)e(c) - e(ac)e(b) - e(a)e(bc) + 2e(a)e(b)e(c)"
    assert expansion_to_text(4).endswith(" - 6e(a)e(b)e(c)e(d)")


def test_expansion_records():
    terms = cumulant_expansion(3)
    assert [t["coefficient"] for t in terms] == [1, -1, -1, -1, 2]
    assert terms[2] == {"partition": [[1, 3], [2]], "coefficient": -1, "term_signature": "e(ac)e(b)"}
    with pytest.raises(ResourceBoundError):
        cumulant_expansion(7)


def test_cumulants_of_a_strict_morphism_vanish():
    for A in dgca_battery():
        P = identity_morphism(A, 3)
        assert map_equal(morphism_cumulant(P, 1), P.p(1))
        for n in (2, 3):
            assert morphism_cumulant(P, n).is_zero()


def test_cumulants_need_products(exterior_xy):
    e = exterior_xy.product
    with pytest.raises(AlgebraError):
        cumulant(e, exterior_xy.product, exterior_xy.product, 2)
    P = identity_morphism(exterior_xy, 2)
    with pytest.raises(AlgebraError):
        cumulant(P.p(1), None, exterior_xy.product, 2)


def test_second_cumulant_of_a_linear_functional():
    A = truncated_polynomial(2)
    e = MultilinearMap(A.module, A.module, 1, 0, table={("1",): {"1": 1}, ("x",): {"1": 2}, ("x2",): {"1": 5}}, name="e")
    k2 = cumulant(e, A.product, A.product, 2)
    # variance: e(x²) − e(x)² = 5 − 4
    assert k2.on_basis(("x", "x")) == {"1": Fraction(1)}
    assert k2.on_basis(("1", "x")) == {}


_coefficient = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@settings(max_examples=15, deadline=None)
@given(st.data(), st.integers(min_value=2, max_value=4))
def test_moments_are_recovered_from_cumulants(data, n):
    A = truncated_polynomial(2)
    labels = A.module.basis
    table = {(a,): {b: data.draw(_coefficient) for b in labels} for a in labels}
    e = MultilinearMap(A.module, A.module, 1, 0, table=table, name="e")
    cumulants = {k: cumulant(e, A.product, A.product, k) for k in range(1, n + 1)}
    assert map_equal(moments_from_cumulants(cumulants, A.product, n), moment(e, A.product, n))


def test_moments_need_every_lower_cumulant():
    A = truncated_polynomial(2)
    P = identity_morphism(A, 2)
    with pytest.raises(AlgebraError):
        moments_from_cumulants({1: P.p(1)}, A.product, 2)


def test_boolean_and_classical_second_cumulants_agree(interval_cumulants):
    P = interval_cumulants.morphism
    assert boolean_k2_crosscheck(P.p(1), P.source.m(2), P.target.m(2)).passed


def test_p2_bounds_the_second_cumulant(interval_cumulants):
    P = interval_cumulants.morphism
    k2 = morphism_cumulant(P, 2)
    assert not k2.is_zero()
    assert map_equal(hom_boundary(P.p(2), P.source.complex, P.target.complex), k2)


def test_perfect_matchings_of_g3():
    G = build_refinement_graph(3)
    matchings = perfect_matchings(G)
    assert len(matchings) == 3
    assert perfect_matchings(G, limit=1) == matchings[:1]
    c = build_cumulant_complex(3)
    for matching in matchings:
        assert c.boundary(matching_chain(matching)) == c.vertex_chain()


def test_nullhomotopies_on_the_interval(interval_cumulants):
    P = interval_cumulants.morphism
    assert nullhomotopy_from_graph(P, 2).name == "H2"
    assert nullhomotopy_from_graph(P, 3).name == "H3"
    assert nullhomotopy_from_graph(P, 3, choice=2).name == "H3"


def test_nullhomotopy_bounds():
    P = identity_morphism(truncated_polynomial(2), 4)
    with pytest.raises(AlgebraError):
        nullhomotopy_from_graph(P, 1)
    with pytest.raises(ResourceBoundError):
        nullhomotopy_from_graph(P, 5)
    with pytest.raises(ConstructionError):
        nullhomotopy_from_graph(P, 2, choice=1)
    with pytest.raises(AlgebraError):
        nullhomotopy_from_graph(identity_morphism(truncated_polynomial(2), 2), 3)


def test_nullhomotopy_of_a_strict_morphism_vanishes():
    for A in dgca_battery():
        assert nullhomotopy_from_graph(identity_morphism(A, 3), 3).is_zero()


def test_second_level_homotopy(interval_cumulants):
    result = second_level_homotopy(interval_cumulants.morphism, 3)
    assert result.G.name == "G3"
    assert result.chain
    assert all(cell.dim == 2 for cell in result.chain)
    with pytest.raises(ResourceBoundError):
        second_level_homotopy(interval_cumulants.morphism, 4)


def test_bracketed_cumulants_differ_by_a_boundary(interval_transfer):
    left, right = enumerate_trees(3, binary_only=True)
    assert str(left) == "[[x,x],x]" and str(right) == "[x,[x,x]]"
    G = bracketing_homotopy(interval_transfer.morphism, left, right)
    assert G.name == "G" and G.degree == -1


def test_bracketings_are_checked(interval_transfer):
    P = interval_transfer.morphism
    (corolla,) = [t for t in enumerate_trees(3) if not t.is_binary()]
    with pytest.raises(AlgebraError):
        cumulant_upto_homotopy(P, 3, corolla)
    with pytest.raises(ResourceBoundError):
        cumulant_upto_homotopy(P, 4)


def test_cumulant_morphisms_are_cinfty(interval_cumulants, triangle_cumulants):
    assert check_cinfty_morphism(interval_cumulants.morphism, 4).passed
    assert check_cinfty_morphism(triangle_cumulants.morphism, 3).passed


def test_p2_vanishes_on_the_shuffle_of_dt_and_t(interval_cumulants):
    dt1, t1 = ((1,), (0,)), ((), (1,))
    defect = shuffle_defect(interval_cumulants.morphism.p(2), 1, 1)
    assert defect.on_basis((dt1, t1)) == {}
    assert defect.on_basis((t1, dt1)) == {}


def test_nullhomotopies_on_the_triangle(triangle_cumulants):
    P = triangle_cumulants.morphism
    dA, dB = P.source.complex, P.target.complex
    assert map_equal(hom_boundary(P.p(2), dA, dB), morphism_cumulant(P, 2))
    H3 = nullhomotopy_from_graph(P, 3)
    assert map_equal(hom_boundary(H3, dA, dB), morphism_cumulant(P, 3))


def test_block_product_rejects_a_mismatched_bracketing():
    P = identity_morphism(truncated_polynomial(2), 3)
    e, pa, pb = P.p(1), P.source.m(2), P.target.m(2)
    two_blocks = next(pi for pi in enumerate_partitions(3) if len(pi) == 2)
    left, right = enumerate_trees(3, binary_only=True)
    with pytest.raises(AlgebraError):
        block_product(e, pa, pb, two_blocks, left)
    with pytest.raises(AlgebraError):
        cumulant(e, pa, pb, 2, left)
    assert map_equal(cumulant(e, pa, pb, 3, left), cumulant(e, pa, pb, 3, right))
