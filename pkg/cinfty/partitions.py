"""
The partition lattice, the refinement graph G_n and the cube complex c_n.

A cell of c_n is a sequence of segments; a segment is an ordered tuple of arguments and an
argument is a set of inputs.  The first argument of the first segment contains the input 1,
the remaining arguments may come in any order.  A segment with j arguments is a (j−1)-cube:
at each gap inside it the cell is either cut into two segments or the two neighbouring
arguments are merged.  Cells of dimension 0 are the pairs (partition, cyclic order of its
blocks), the (|π|−1)! copies of each cumulant term.

A cell is realized by an ∞-morphism P as the product of p_j(∏X₁,…,∏X_j) over its segments.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import networkx as nx
import sympy

from cinfty.config import COMPLEX_CAP, GRAPH_CAP, get_settings
from cinfty.core import (
    AlgebraError,
    ConstructionError,
    MultilinearMap,
    ResourceBoundError,
    add_into,
    format_scalar,
    map_linear_combination,
    product_of_maps,
    sign,
    zero_map,
)
from cinfty.report import CheckReport, Violation, build_report, merge_reports, zero_map_report
from cinfty.structures import AInftyMorphism, enumerate_shuffles, hom_boundary, permutation_sign, shuffle_defect

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Set partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Partition:
    """Blocks sorted by their minimum, elements ascending."""

    n: int
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]]) -> "Partition":
        canonical = tuple(sorted(tuple(sorted(b)) for b in blocks))
        elements = [i for b in canonical for i in b]
        n = len(elements)
        if any(not b for b in canonical) or sorted(elements) != list(range(1, n + 1)):
            raise AlgebraError(f"{[list(b) for b in blocks]} is not a partition of 1..{n}")
        return cls(n, canonical)

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "Partition":
        blocks: dict[int, list[int]] = {}
        for i, label in enumerate(rgs, start=1):
            blocks.setdefault(label, []).append(i)
        return cls.from_blocks(list(blocks.values()))

    def __len__(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)

    def refines(self, other: "Partition") -> bool:
        return all(any(set(b) <= set(c) for c in other.blocks) for b in self.blocks)

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


def _restricted_growth_strings(n: int) -> list[tuple[int, ...]]:
    strings = [(0,)]
    for _ in range(n - 1):
        strings = [s + (k,) for s in strings for k in range(max(s) + 2)]
    return strings


def enumerate_partitions(n: int, bound: int | None = None) -> list[Partition]:
    """All set partitions of 1..n, in lexicographic order of their restricted-growth strings."""
    bound = bound if bound is not None else get_settings().PARTITION_BOUND
    if n < 1:
        raise AlgebraError(f"Partitions need n ≥ 1, got {n}")
    if n > bound:
        raise ResourceBoundError(f"n = {n} exceeds the partition bound {bound}")
    return [Partition.from_rgs(s) for s in _restricted_growth_strings(n)]


def bell_number(n: int) -> int:
    return int(sympy.bell(n))


def vertex_sign(partition: Partition) -> int:
    return sign(len(partition) - 1)


# ---------------------------------------------------------------------------
# Cells
# ---------------------------------------------------------------------------

Argument = tuple[int, ...]
Segment = tuple[Argument, ...]


@dataclass(frozen=True)
class Cell:
    segments: tuple[Segment, ...]

    @property
    def arguments(self) -> tuple[Argument, ...]:
        return tuple(arg for seg in self.segments for arg in seg)

    @property
    def n(self) -> int:
        return sum(len(arg) for arg in self.arguments)

    @property
    def dim(self) -> int:
        return len(self.arguments) - len(self.segments)

    @property
    def partition(self) -> Partition:
        return Partition.from_blocks(self.arguments)

    @property
    def signature(self) -> str:
        return "·".join(f"p{len(seg)}" for seg in self.segments)

    def orientation(self) -> int:
        """Sign making the realization a chain map: Π over segments of (−1)^{j(j−1)/2}."""
        return sign(sum(len(seg) * (len(seg) - 1) // 2 for seg in self.segments))

    def faces(self) -> list[tuple[int, "Cell"]]:
        """Cube boundary Σ_T (−1)^{T−1}(cut_T − merge_T) over the inner gaps T, left to right."""
        out = []
        gap = 0
        for s, seg in enumerate(self.segments):
            before, after = self.segments[:s], self.segments[s + 1:]
            for t in range(1, len(seg)):
                gap += 1
                sg = sign(gap - 1)
                cut = Cell(before + (seg[:t], seg[t:]) + after)
                merged = seg[:t - 1] + (tuple(sorted(seg[t - 1] + seg[t])),) + seg[t + 1:]
                out.append((sg, cut))
                out.append((-sg, Cell(before + (merged,) + after)))
        return out

    def __str__(self) -> str:
        return "".join("[" + " ".join("".join(map(str, arg)) for arg in seg) + "]" for seg in self.segments)


def cell_key(cell: Cell) -> tuple:
    return (cell.dim, cell.segments)


def enumerate_cells(n: int, max_dim: int | None = None) -> list[Cell]:
    cells = []
    for partition in enumerate_partitions(n):
        first, rest = partition.blocks[0], partition.blocks[1:]
        for tail in itertools.permutations(rest):
            order = (first,) + tail
            for breaks in itertools.product((True, False), repeat=len(order) - 1):
                if max_dim is not None and breaks.count(False) > max_dim:
                    continue
                segments, current = [], [order[0]]
                for arg, brk in zip(order[1:], breaks):
                    if brk:
                        segments.append(tuple(current))
                        current = [arg]
                    else:
                        current.append(arg)
                segments.append(tuple(current))
                cells.append(Cell(tuple(segments)))
    return sorted(cells, key=cell_key)


def vertex_chain(vertices: Sequence[Cell]) -> dict[Cell, Fraction]:
    """Σ_v (−1)^{|π_v|−1} v, the chain realized by k_n."""
    return {v: Fraction(vertex_sign(v.partition)) for v in vertices}


# ---------------------------------------------------------------------------
# Refinement graph
# ---------------------------------------------------------------------------

@dataclass
class RefinementGraph:
    n: int
    vertices: list[Cell]
    edges: list[Cell]
    graph: nx.Graph

    @staticmethod
    def endpoints(edge: Cell) -> tuple[Cell, Cell]:
        """(coarse, fine) ends of an edge."""
        (_, fine), (_, coarse) = edge.faces()
        return coarse, fine

    def to_dot(self) -> str:
        lines = [f"graph G{self.n} {{"]
        for v in self.vertices:
            mark = "+" if vertex_sign(v.partition) > 0 else "-"
            lines.append(f'  "{v}" [partition="{v.partition}", sign="{mark}"];')
        for e in self.edges:
            coarse, fine = self.endpoints(e)
            lines.append(f'  "{coarse}" -- "{fine}" [cell="{e}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_refinement_graph(n: int) -> RefinementGraph:
    if n < 2:
        raise AlgebraError(f"G_n needs n ≥ 2, got {n}")
    if n > GRAPH_CAP:
        raise ResourceBoundError(f"G_n is capped at n = {GRAPH_CAP}, got {n}")
    cells = enumerate_cells(n, max_dim=1)
    vertices = [c for c in cells if c.dim == 0]
    edges = [c for c in cells if c.dim == 1]
    graph = nx.Graph()
    for v in vertices:
        graph.add_node(v, sign=vertex_sign(v.partition))
    for e in edges:
        graph.add_edge(*RefinementGraph.endpoints(e), cell=e)
    logger.debug("G_%d: %d vertices, %d edges", n, len(vertices), len(edges))
    return RefinementGraph(n, vertices, edges, graph)


def _claim(name: str, value) -> Violation:
    return Violation(inputs=[name], defect_vector=[{"name": "value", "coeff": str(value)}])


def check_graph_claims(G: RefinementGraph) -> CheckReport:
    """Even vertex count, connectivity and a zero signed vertex count."""
    count = G.graph.number_of_nodes()
    signed = sum(s for _, s in G.graph.nodes(data="sign"))
    connected = count > 0 and nx.is_connected(G.graph)
    found = []
    if count % 2:
        found.append(_claim("even vertex count", count))
    if not connected:
        found.append(_claim("connected", nx.number_connected_components(G.graph)))
    if signed:
        found.append(_claim("signed vertex count", signed))
    notes = [f"vertices={count}", f"edges={G.graph.number_of_edges()}", f"signed={signed}"]
    return build_report(f"G_{G.n} claims", [G.n, G.n], found, notes)


# ---------------------------------------------------------------------------
# Cube complex
# ---------------------------------------------------------------------------

class CubeComplex:
    def __init__(self, n: int, cells: Sequence[Cell]):
        self.n = n
        self.cells: dict[int, list[Cell]] = {}
        for cell in sorted(cells, key=cell_key):
            self.cells.setdefault(cell.dim, []).append(cell)
        self.index = {cell: k for group in self.cells.values() for k, cell in enumerate(group)}

    @property
    def dimension(self) -> int:
        return max(self.cells)

    def sizes(self) -> list[int]:
        return [len(self.cells.get(k, [])) for k in range(self.dimension + 1)]

    def boundary(self, chain: Mapping[Cell, Fraction]) -> dict[Cell, Fraction]:
        out: dict = {}
        for cell, coeff in chain.items():
            for s, face in cell.faces():
                add_into(out, face, s * Fraction(coeff))
        return out

    def boundary_matrix(self, k: int) -> sympy.Matrix:
        """∂_k : C_k → C_{k−1}, columns indexed by k-cells."""
        rows, cols = self.cells.get(k - 1, []), self.cells.get(k, [])
        matrix = sympy.zeros(len(rows), len(cols))
        if k < 1:
            return matrix
        for j, cell in enumerate(cols):
            for s, face in cell.faces():
                matrix[self.index[face], j] += s
        return matrix

    def vertex_chain(self) -> dict[Cell, Fraction]:
        return vertex_chain(self.cells[0])

    def one_skeleton(self) -> nx.Graph:
        graph = nx.Graph()
        for v in self.cells[0]:
            graph.add_node(v, sign=vertex_sign(v.partition))
        for e in self.cells.get(1, []):
            graph.add_edge(*RefinementGraph.endpoints(e), cell=e)
        return graph

    def solve_boundary(self, chain: Mapping[Cell, Fraction], k: int) -> dict[Cell, Fraction]:
        """A (k+1)-chain w with ∂w = chain, by exact linear algebra."""
        B = self.boundary_matrix(k + 1)
        target = sympy.Matrix([sympy.Rational(0)] * len(self.cells.get(k, [])))
        for cell, coeff in chain.items():
            target[self.index[cell], 0] = sympy.Rational(coeff.numerator, coeff.denominator)
        try:
            solution, params = B.gauss_jordan_solve(target)
        except ValueError:
            raise ConstructionError(f"The {k}-chain is not a boundary in c_{self.n}") from None
        solution = solution.subs({p: 0 for p in params})
        return {
            cell: Fraction(int(solution[j].p), int(solution[j].q))
            for j, cell in enumerate(self.cells[k + 1])
            if solution[j] != 0
        }

    def to_json(self) -> dict:
        boundary = [
            {"from": str(cell), "to": str(face), "coeff": format_scalar(Fraction(s))}
            for k in sorted(self.cells)
            for cell in self.cells[k]
            for s, face in cell.faces()
        ]
        return {
            "n": self.n,
            "cells": [
                {"dim": k, "name": str(cell), "signature": cell.signature}
                for k in sorted(self.cells)
                for cell in self.cells[k]
            ],
            "boundary": boundary,
            "betti": cellular_homology(self),
        }


def build_cumulant_complex(n: int) -> CubeComplex:
    if n < 2:
        raise AlgebraError(f"c_n needs n ≥ 2, got {n}")
    if n > COMPLEX_CAP:
        raise ResourceBoundError(f"c_n is capped at n = {COMPLEX_CAP}, got {n}")
    c = CubeComplex(n, enumerate_cells(n))
    for k in range(2, c.dimension + 1):
        if not (c.boundary_matrix(k - 1) * c.boundary_matrix(k)).is_zero_matrix:
            raise ConstructionError(f"∂∘∂ ≠ 0 in c_{n} at dimension {k}")
    logger.debug("c_%d: cells per dimension %s", n, c.sizes())
    return c


def betti_numbers(sizes: Sequence[int], boundaries: Mapping[int, sympy.Matrix]) -> list[int]:
    """b_k = dim C_k − rank ∂_k − rank ∂_{k+1}, ranks over Q."""
    def rank(k: int) -> int:
        matrix = boundaries.get(k)
        if matrix is None or 0 in matrix.shape:
            return 0
        return matrix.rank()

    return [sizes[k] - rank(k) - rank(k + 1) for k in range(len(sizes))]


def cellular_homology(c: CubeComplex) -> list[int]:
    return betti_numbers(c.sizes(), {k: c.boundary_matrix(k) for k in range(1, c.dimension + 1)})


# ---------------------------------------------------------------------------
# Realization by an ∞-morphism
# ---------------------------------------------------------------------------

def _require_dgcas(P: AInftyMorphism) -> None:
    if not (P.source.is_dgca_like() and P.target.is_dgca_like()):
        raise AlgebraError("Cell realization needs a morphism between dgcas (m_{≥3} = 0 on both sides)")


def realize_cell(cell: Cell, P: AInftyMorphism) -> MultilinearMap:
    factors = [(P.p(len(seg)), seg) for seg in cell.segments]
    raw = product_of_maps(factors, P.source.m(2), P.target.m(2), name=str(cell))
    if cell.orientation() == 1:
        return raw
    return map_linear_combination([(-1, raw)], name=f"-{cell}")


def realize_chain(chain: Mapping[Cell, Fraction], P: AInftyMorphism, n: int, dim: int) -> MultilinearMap:
    terms = [(coeff, realize_cell(cell, P)) for cell, coeff in sorted(chain.items(), key=lambda kv: cell_key(kv[0]))]
    if not terms:
        return zero_map(P.source.module, P.target.module, n, -dim)
    return map_linear_combination(terms, name=f"R{dim}")


def check_realization(c: CubeComplex, P: AInftyMorphism, max_dim: int | None = None) -> CheckReport:
    """R(∂cell) = ∂R(cell) for every cell of positive dimension up to `max_dim`."""
    _require_dgcas(P)
    dA, dB = P.source.complex, P.target.complex
    top = c.dimension if max_dim is None else min(max_dim, c.dimension)
    reports = []
    for k in range(1, top + 1):
        for cell in c.cells[k]:
            lhs = hom_boundary(realize_cell(cell, P), dA, dB)
            rhs = realize_chain(c.boundary({cell: Fraction(1)}), P, c.n, k - 1)
            defect = map_linear_combination([(1, lhs), (-1, rhs)])
            reports.append(zero_map_report(f"∂R{cell} = R∂{cell}", defect))
    return merge_reports(f"realization of c_{c.n} is a chain map", reports)


def shuffle_chains(c: CubeComplex) -> list[tuple[str, dict[Cell, Fraction]]]:
    """Σ_σ sgn(σ)·cell_σ over the (q,r)-shuffles of the arguments of one segment after the first.

    Only segments after the first are shuffled, so every term stays a cell of c_n; each chain
    starts from the cell whose shuffled segment lists its arguments in increasing order.
    """
    chains = []
    for k in sorted(c.cells):
        for cell in c.cells[k]:
            for s, seg in enumerate(cell.segments[1:], start=1):
                if len(seg) < 2 or list(seg) != sorted(seg):
                    continue
                for q in range(1, len(seg)):
                    chain: dict[Cell, Fraction] = {}
                    for perm in enumerate_shuffles(q, len(seg) - q):
                        placed = [None] * len(seg)
                        for i, target in enumerate(perm):
                            placed[target - 1] = seg[i]
                        shuffled = tuple(placed)
                        term = Cell(cell.segments[:s] + (shuffled,) + cell.segments[s + 1:])
                        chain[term] = chain.get(term, Fraction(0)) + permutation_sign(perm)
                    chains.append((f"({q},{len(seg) - q}) on {cell}", chain))
    return chains


def shuffle_cycle_report(c: CubeComplex, P: AInftyMorphism) -> CheckReport:
    """Shuffle sums realize to zero.

    Map level: the shuffle defects of every p_j and target m_j, j ≤ n.  Cell level: every
    shuffle chain Z of c_n and its boundary ∂Z realize to the zero map.
    """
    reports = []
    top = min(c.n, P.cutoff)
    for j in range(2, top + 1):
        for q in range(1, j):
            reports.append(zero_map_report(f"({q},{j - q})-shuffle cycle on p{j}", shuffle_defect(P.p(j), q, j - q)))
            if j <= P.target.cutoff:
                reports.append(
                    zero_map_report(f"({q},{j - q})-shuffle cycle on m{j}", shuffle_defect(P.target.m(j), q, j - q))
                )
    if c.n <= P.cutoff and P.source.is_dgca_like() and P.target.is_dgca_like():
        for label, chain in shuffle_chains(c):
            dim = next(iter(chain)).dim
            reports.append(zero_map_report(f"R(Z) = 0, Z = {label}", realize_chain(chain, P, c.n, dim)))
            reports.append(zero_map_report(f"R(∂Z) = 0, Z = {label}", realize_chain(c.boundary(chain), P, c.n, dim - 1)))
    if not reports:
        return build_report(f"shuffle cycles of c_{c.n}", [c.n, c.n], [], ["no shuffle cycles below arity 2"])
    return merge_reports(f"shuffle cycles of c_{c.n}", reports)


__all__ = [
    "Cell",
    "CubeComplex",
    "Partition",
    "RefinementGraph",
    "bell_number",
    "build_cumulant_complex",
    "build_refinement_graph",
    "cellular_homology",
    "check_graph_claims",
    "check_realization",
    "enumerate_cells",
    "enumerate_partitions",
    "realize_cell",
    "realize_chain",
    "shuffle_chains",
    "shuffle_cycle_report",
    "vertex_chain",
]
