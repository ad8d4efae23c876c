from fractions import Fraction

import pytest

from cinfty.core import (
    AlgebraError,
    ConstructionError,
    FiniteModule,
    MultilinearMap,
    ResourceBoundError,
    map_equal,
)
from cinfty.fixtures import dgca_battery, flipped_homotopy, subdivided_tower, transfer_fixture
from cinfty.forms import monomial_forms
from cinfty.structures import ChainComplex, check_cinfty, check_cinfty_morphism, check_stasheff
from cinfty.transfer import (
    LEAF,
    PlanarTree,
    check_contraction,
    compose_contractions,
    contraction_from_retraction,
    enumerate_trees,
    identity_contraction,
    transfer_inclusion,
    transfer_structure,
    trees_to_text,
    two_stage_agreement,
)


@pytest.mark.parametrize("leaves, count, binary", [(2, 1, 1), (3, 3, 2), (4, 11, 5), (5, 45, 14)])
def test_tree_counts(leaves, count, binary):
    assert len(enumerate_trees(leaves)) == count
    trees = enumerate_trees(leaves, binary_only=True)
    assert len(trees) == binary
    assert all(t.is_binary() and t.leaves == leaves for t in trees)


def test_trees_of_three_leaves():
    assert trees_to_text(enumerate_trees(3)) == "[[x,x],x]\n[x,[x,x]]\n[x,x,x]\n"
    right = PlanarTree((LEAF, PlanarTree((LEAF, LEAF))))
    assert right.internal_vertices == 2 and right.to_nested() == ["x", ["x", "x"]]


def test_tree_bounds():
    with pytest.raises(AlgebraError):
        enumerate_trees(1)
    with pytest.raises(ResourceBoundError):
        enumerate_trees(6)


def test_interval_contraction_and_its_control(interval_transfer):
    c = interval_transfer.contraction
    assert check_contraction(c, basis=monomial_forms(1, 3)).passed
    assert not check_contraction(flipped_homotopy(c)).passed


def test_transferred_product_on_the_interval(interval_transfer):
    m2 = interval_transfer.structure.m(2)
    assert m2.on_basis(("v0", "v0")) == {"v0": Fraction(1)}
    assert m2.on_basis(("v0", "v1")) == {}
    assert m2.on_basis(("e01", "e01")) == {}
    assert m2.on_basis(("v0", "e01")) == {"e01": Fraction(1, 2)}
    assert m2.on_basis(("e01", "v1")) == {"e01": Fraction(1, 2)}


def test_transferred_structure_is_cinfty(interval_transfer):
    structure = interval_transfer.structure
    assert structure.cutoff == 4
    assert check_stasheff(structure, 4).passed
    assert check_cinfty(structure, 4).passed


def test_transferred_morphism_is_cinfty(interval_transfer):
    P = interval_transfer.morphism
    assert P.p(1) is interval_transfer.contraction.p
    assert check_cinfty_morphism(P, 4).passed


def test_transferred_inclusion(interval_transfer):
    fx = interval_transfer
    inclusion = transfer_inclusion(fx.source, fx.contraction, 3, target=fx.structure, verify=True)
    assert inclusion.p(1) is fx.contraction.i


def test_identity_contraction_reproduces_the_product():
    for A in dgca_battery():
        structure = transfer_structure(A, identity_contraction(A.complex), 3)
        assert map_equal(structure.m(2), A.product)
        assert structure.m(3).is_zero()


def test_compose_with_the_identity(interval_transfer):
    c = interval_transfer.contraction
    composite = compose_contractions(c, identity_contraction(c.small))
    assert map_equal(composite.p, c.p)
    assert map_equal(composite.h, c.h)
    with pytest.raises(AlgebraError):
        compose_contractions(identity_contraction(c.small), c)


def test_two_stage_transfer_agrees_on_the_tower():
    tower = subdivided_tower()
    source = tower.model.dgca
    assert two_stage_agreement(source, tower.outer, tower.inner, 3).passed
    assert not two_stage_agreement(source, tower.outer, tower.inner, 3, direct=tower.skewed).passed
    with pytest.raises(ResourceBoundError):
        two_stage_agreement(source, tower.outer, tower.inner, 4)


def _two_term_complex(extra: list, differential: dict):
    module = FiniteModule("K", [("x", 0), ("y", 1)] + extra)
    return ChainComplex(module, MultilinearMap(module, module, 1, 1, table=differential, name="d"))


def _point(name: str = "Z"):
    module = FiniteModule(name, [("z", 0)])
    return ChainComplex(module, MultilinearMap(module, module, 1, 1, table={}, name="0"))


def test_contraction_from_retraction_inverts_d_on_the_kernel():
    big, small = _two_term_complex([("w", 0)], {("x",): {"y": 1}}), _point()
    i = MultilinearMap(small.module, big.module, 1, 0, table={("z",): {"w": 1}}, name="i")
    p = MultilinearMap(big.module, small.module, 1, 0, table={("w",): {"z": 1}}, name="p")
    c = contraction_from_retraction(big, small, i, p)
    assert c.h.on_basis(("y",)) == {"x": Fraction(-1)}
    assert c.h.on_basis(("x",)) == {}


def test_contraction_from_retraction_needs_an_acyclic_kernel():
    big, small = _two_term_complex([("w", 0)], {}), _point()
    i = MultilinearMap(small.module, big.module, 1, 0, table={("z",): {"w": 1}}, name="i")
    p = MultilinearMap(big.module, small.module, 1, 0, table={("w",): {"z": 1}}, name="p")
    with pytest.raises(ConstructionError):
        contraction_from_retraction(big, small, i, p)


def test_triangle_transfer_to_arity_four(triangle_transfer):
    fx = triangle_transfer
    assert check_stasheff(fx.structure, 4).passed
    assert check_cinfty(fx.structure, 4).passed
    assert check_cinfty_morphism(fx.morphism, 4).passed


def test_transfer_on_the_circle():
    fx = transfer_fixture("circle", 3)
    m2 = fx.structure.m(2)
    assert m2.on_basis(("v0", "v0")) == {"v0": Fraction(1)}
    assert m2.on_basis(("v0", "e01")) == {"e01": Fraction(1, 2)}
    assert m2.on_basis(("e01", "v1")) == {"e01": Fraction(1, 2)}
    assert m2.on_basis(("v0", "e12")) == {}
    assert check_stasheff(fx.structure, 3).passed
    assert check_cinfty(fx.structure, 3).passed
    assert check_cinfty_morphism(fx.morphism, 3).passed
