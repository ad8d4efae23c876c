from fractions import Fraction

import networkx as nx
import pytest

from cinfty.core import (
    AlgebraError,
    ConstructionError,
    FiniteModule,
    MultilinearMap,
    ResourceBoundError,
    identity_map,
)
from cinfty.fixtures import identity_morphism, symmetric_p2_morphism, truncated_polynomial
from cinfty.partitions import (
    Cell,
    Partition,
    RefinementGraph,
    bell_number,
    build_cumulant_complex,
    build_refinement_graph,
    cellular_homology,
    check_graph_claims,
    check_realization,
    enumerate_cells,
    enumerate_partitions,
    realize_cell,
    shuffle_chains,
    shuffle_cycle_report,
)
from cinfty.structures import AInftyMorphism, AInftyStructure, ChainComplex


def _cell(text: str) -> Cell:
    """'[12 3][4]' -> Cell."""
    segments = []
    for seg in text.strip("[]").split("]["):
        segments.append(tuple(tuple(int(ch) for ch in arg) for arg in seg.split(" ")))
    return Cell(tuple(segments))


def test_partitions_of_three_in_growth_string_order():
    names = [str(p) for p in enumerate_partitions(3)]
    assert names == ["{1,2,3}", "{1,2}{3}", "{1,3}{2}", "{1}{2,3}", "{1}{2}{3}"]


@pytest.mark.parametrize("n, count", [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52)])
def test_bell_numbers(n, count):
    assert bell_number(n) == count == len(enumerate_partitions(n))


def test_partition_validation_and_refinement():
    with pytest.raises(AlgebraError):
        Partition.from_blocks([[1], [3]])
    with pytest.raises(ResourceBoundError):
        enumerate_partitions(9)
    fine = Partition.from_blocks([[1], [2], [3]])
    coarse = Partition.from_rgs([0, 0, 1])
    assert str(coarse) == "{1,2}{3}"
    assert fine.refines(coarse) and not coarse.refines(fine)
    assert coarse.to_json() == [[1, 2], [3]]


def test_cell_grammar():
    cell = _cell("[12 3][4]")
    assert str(cell) == "[12 3][4]"
    assert cell.n == 4 and cell.dim == 1
    assert cell.signature == "p2·p1"
    assert str(cell.partition) == "{1,2}{3}{4}"
    assert _cell("[1 2 3]").orientation() == -1
    assert _cell("[1 2][3]").orientation() == -1
    assert _cell("[12][3]").orientation() == 1


def test_faces_of_a_square():
    faces = {str(face): s for s, face in _cell("[1 2 3]").faces()}
    assert faces == {"[1][2 3]": 1, "[12 3]": -1, "[1 2][3]": -1, "[1 23]": 1}


def test_cells_of_c2():
    assert [str(c) for c in enumerate_cells(2)] == ["[1][2]", "[12]", "[1 2]"]


def test_edge_endpoints():
    coarse, fine = RefinementGraph.endpoints(_cell("[1 2]"))
    assert str(coarse) == "[12]" and str(fine) == "[1][2]"


@pytest.mark.parametrize("n, vertices, edges", [(2, 2, 1), (3, 6, 7), (4, 26, 49), (5, 150, 391)])
def test_refinement_graph_sizes(n, vertices, edges):
    G = build_refinement_graph(n)
    assert G.graph.number_of_nodes() == len(G.vertices) == vertices
    assert G.graph.number_of_edges() == len(G.edges) == edges
    assert check_graph_claims(G).passed


def test_refinement_graph_bounds():
    with pytest.raises(AlgebraError):
        build_refinement_graph(1)
    with pytest.raises(ResourceBoundError):
        build_refinement_graph(7)


def test_refinement_graph_dot():
    dot = build_refinement_graph(3).to_dot()
    assert dot.startswith("graph G3 {\n")
    assert dot.count(" -- ") == 7
    assert '"[123]" -- "[12][3]" [cell="[12 3]"];' in dot


@pytest.mark.parametrize("n, sizes", [(2, [2, 1]), (3, [6, 7, 2]), (4, [26, 49, 30, 6])])
def test_cumulant_complex_is_contractible(n, sizes):
    c = build_cumulant_complex(n)
    assert c.sizes() == sizes
    assert cellular_homology(c) == [1] + [0] * (len(sizes) - 1)
    assert nx.is_isomorphic(c.one_skeleton(), build_refinement_graph(n).graph)


def test_vertex_chain_bounds_an_edge_in_c2():
    c = build_cumulant_complex(2)
    chain = c.vertex_chain()
    assert chain == {_cell("[1][2]"): Fraction(-1), _cell("[12]"): Fraction(1)}
    filling = c.solve_boundary(chain, 0)
    assert filling == {_cell("[1 2]"): Fraction(-1)}
    assert c.boundary(filling) == chain
    with pytest.raises(ConstructionError):
        c.solve_boundary({_cell("[12]"): Fraction(1)}, 0)


def test_cumulant_complex_json():
    data = build_cumulant_complex(2).to_json()
    assert data["n"] == 2
    assert data["betti"] == [1, 0]
    assert {"dim": 1, "name": "[1 2]", "signature": "p2"} in data["cells"]
    assert {"from": "[1 2]", "to": "[1][2]", "coeff": "1/1"} in data["boundary"]


def test_realization_is_a_chain_map(interval_cumulants):
    for n in (2, 3):
        assert check_realization(build_cumulant_complex(n), interval_cumulants.morphism).passed


def test_realization_of_a_strict_morphism():
    P = identity_morphism(truncated_polynomial(2), cutoff=3)
    assert realize_cell(_cell("[1 2]"), P).is_zero()
    vertex = realize_cell(_cell("[1][2]"), P)
    assert vertex.on_basis(("x", "x")) == {"x2": Fraction(1)}
    assert check_realization(build_cumulant_complex(3), P).passed


def test_realization_needs_dgcas():
    module = FiniteModule("W", [("a", 1), ("b", 2)])
    complex = ChainComplex(module, MultilinearMap(module, module, 1, 1, table={}, name="0"))
    m3 = MultilinearMap(module, module, 3, -1, table={("a", "a", "a"): {"b": 1}}, name="m3")
    A = AInftyStructure(complex, {3: m3}, cutoff=3)
    P = AInftyMorphism(A, A, {1: identity_map(module)}, cutoff=3)
    with pytest.raises(AlgebraError):
        check_realization(build_cumulant_complex(3), P)


def test_shuffle_cycles(interval_cumulants):
    assert shuffle_cycle_report(build_cumulant_complex(3), interval_cumulants.morphism).passed
    assert not shuffle_cycle_report(build_cumulant_complex(2), symmetric_p2_morphism()).passed


def test_shuffle_chains_of_c3():
    c = build_cumulant_complex(3)
    assert shuffle_chains(build_cumulant_complex(2)) == []
    (chain,) = [chain for _, chain in shuffle_chains(c) if _cell("[1][2 3]") in chain]
    assert chain == {_cell("[1][2 3]"): 1, _cell("[1][3 2]"): -1}
    boundary = {cell: coeff for cell, coeff in c.boundary(chain).items() if coeff}
    assert set(boundary) == {_cell("[1][2][3]"), _cell("[1][3][2]")}
    assert boundary[_cell("[1][2][3]")] == -boundary[_cell("[1][3][2]")]


def test_shuffle_cycles_realize_to_zero(interval_cumulants, triangle_cumulants):
    for P in (interval_cumulants.morphism, triangle_cumulants.morphism):
        report = shuffle_cycle_report(build_cumulant_complex(3), P)
        assert report.passed
