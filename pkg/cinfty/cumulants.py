"""
Classical cumulants of a chain map between dgcas, moment reconstruction and the
nullhomotopies built from an ∞-morphism.

    k_n(a₁,…,a_n) = Σ_π (|π|−1)!(−1)^{|π|−1} Π_{b∈π} e(Π_{i∈b} a_i)

Inside a block the inputs are multiplied in ascending order, blocks are multiplied in order of
their minimum, and the Koszul sign of the unshuffle is applied.
"""
from __future__ import annotations

import logging
import math
import string
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

from cinfty.config import CUMULANT_CAP, NULLHOMOTOPY_CAP
from cinfty.core import (
    AlgebraError,
    ConstructionError,
    MultilinearMap,
    ResourceBoundError,
    VerificationError,
    add_into,
    compose,
    first_difference,
    iterated_product,
    map_linear_combination,
    precompose_tensor,
    product_of_maps,
    same_module,
    sign,
    zero_map,
)
from cinfty.partitions import (
    Cell,
    Partition,
    RefinementGraph,
    build_cumulant_complex,
    build_refinement_graph,
    cell_key,
    enumerate_partitions,
    realize_chain,
    vertex_sign,
)
from cinfty.report import CheckReport, zero_map_report
from cinfty.structures import AInftyMorphism, hom_boundary

logger = logging.getLogger(__name__)

LETTERS = [c for c in string.ascii_lowercase if c != "e"]


def mobius_coefficient(partition: Partition | int) -> int:
    """(|π|−1)!·(−1)^{|π|−1}."""
    k = partition if isinstance(partition, int) else len(partition)
    if k < 1:
        raise AlgebraError(f"A partition has at least one block, got {k}")
    return math.factorial(k - 1) * sign(k - 1)


def _check_products(e: MultilinearMap, product_a: MultilinearMap | None, product_b: MultilinearMap | None) -> None:
    if product_a is None or product_b is None:
        raise AlgebraError("Cumulants need a product on both the source and the target")
    if e.arity != 1:
        raise AlgebraError(f"Cumulants are taken of a linear map, got arity {e.arity}")
    if product_a.arity != 2 or product_b.arity != 2:
        raise AlgebraError("Products must be binary")
    if not (same_module(product_a.source, e.source) and same_module(product_b.source, e.target)):
        raise AlgebraError(f"The products do not match {e!r}")


def block_product(
    e: MultilinearMap,
    product_a: MultilinearMap | None,
    product_b: MultilinearMap | None,
    partition: Partition,
    bracketing: Any = None,
) -> MultilinearMap:
    """Π_{b∈π} e(Π_{i∈b} a_i); `bracketing` shapes the |π|-fold target product."""
    _check_products(e, product_a, product_b)
    if bracketing is not None and bracketing.leaves != len(partition):
        raise AlgebraError(f"Bracketing {bracketing} has {bracketing.leaves} leaves, {partition} has {len(partition)} blocks")
    factors = [(e, (block,)) for block in partition.blocks]
    return product_of_maps(factors, product_a, product_b, bracketing, name=f"{e.name}{partition}")


def cumulant(
    e: MultilinearMap,
    product_a: MultilinearMap | None,
    product_b: MultilinearMap | None,
    n: int,
    bracketing: Any = None,
) -> MultilinearMap:
    if n > CUMULANT_CAP:
        raise ResourceBoundError(f"Cumulants are capped at n = {CUMULANT_CAP}, got {n}")
    if bracketing is not None and bracketing.leaves != n:
        raise AlgebraError(f"Bracketing {bracketing} has {bracketing.leaves} leaves, expected {n}")
    # only the partition into singletons has an n-fold target product
    terms = [
        (mobius_coefficient(pi), block_product(e, product_a, product_b, pi, bracketing if len(pi) == n else None))
        for pi in enumerate_partitions(n)
    ]
    return map_linear_combination(terms, name=f"k{n}")


def morphism_cumulant(P: AInftyMorphism, n: int, bracketing: Any = None) -> MultilinearMap:
    """k_n of the linear part p₁, products m₂ on both sides."""
    return cumulant(P.p(1), P.source.m(2), P.target.m(2), n, bracketing)


def _term_name(partition: Partition) -> str:
    return "".join("e(" + "".join(LETTERS[i - 1] for i in block) + ")" for block in partition.blocks)


def cumulant_expansion(n: int) -> list[dict]:
    """[{partition, coefficient, term_signature}] in partition order."""
    if n > CUMULANT_CAP:
        raise ResourceBoundError(f"Cumulants are capped at n = {CUMULANT_CAP}, got {n}")
    return [
        {
            "partition": pi.to_json(),
            "coefficient": mobius_coefficient(pi),
            "term_signature": _term_name(pi),
        }
        for pi in enumerate_partitions(n)
    ]


def expansion_to_text(n: int) -> str:
    """k_n written out, e.g. e(ab) - e(a)e(b)."""
    text = ""
    for term in cumulant_expansion(n):
        c = term["coefficient"]
        magnitude = "" if abs(c) == 1 else str(abs(c))
        if not text:
            text = ("-" if c < 0 else "") + magnitude + term["term_signature"]
        else:
            text += (" - " if c < 0 else " + ") + magnitude + term["term_signature"]
    return text


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------

def moment(e: MultilinearMap, product_a: MultilinearMap, n: int) -> MultilinearMap:
    """a₁…a_n ↦ e(a₁⋯a_n)."""
    return compose(e, iterated_product(product_a, n)).with_name(f"{e.name}μ{n}")


def moments_from_cumulants(cumulants: Mapping[int, MultilinearMap], product_b: MultilinearMap, n: int) -> MultilinearMap:
    """Σ_π Π_{b∈π} k_{|b|}(a_b), which recovers e(a₁⋯a_n)."""
    if n > CUMULANT_CAP:
        raise ResourceBoundError(f"Cumulants are capped at n = {CUMULANT_CAP}, got {n}")
    missing = [k for k in range(1, n + 1) if k not in cumulants]
    if missing:
        raise AlgebraError(f"Missing cumulants of arity {missing}")
    terms = []
    for pi in enumerate_partitions(n):
        factors = [(cumulants[len(b)], tuple((i,) for i in b)) for b in pi.blocks]
        terms.append((1, product_of_maps(factors, None, product_b, name=f"k{pi}")))
    return map_linear_combination(terms, name=f"moment{n}")


def boolean_k2_crosscheck(
    e: MultilinearMap,
    product_a: MultilinearMap,
    product_b: MultilinearMap,
    k2: MultilinearMap | None = None,
) -> CheckReport:
    """k₂ against the interval-partition cumulant K₂(a, b) = e(ab) − e(a)e(b)."""
    _check_products(e, product_a, product_b)
    boolean = map_linear_combination(
        [(1, compose(e, product_a)), (-1, precompose_tensor(product_b, [e, e]))], name="K2"
    )
    k2 = k2 if k2 is not None else cumulant(e, product_a, product_b, 2)
    return zero_map_report("k2 = K2", map_linear_combination([(1, k2), (-1, boolean)]))


# ---------------------------------------------------------------------------
# Nullhomotopies
# ---------------------------------------------------------------------------

def perfect_matchings(G: RefinementGraph, limit: int | None = None) -> list[tuple[Cell, ...]]:
    """Perfect matchings of G_n by its edge cells, lexicographically smallest first."""
    incident = {}
    for v in G.vertices:
        edges = [G.graph.edges[v, u]["cell"] for u in G.graph.neighbors(v)]
        incident[v] = sorted(edges, key=cell_key)
    found: list[tuple[Cell, ...]] = []
    matched: set[Cell] = set()
    chosen: list[Cell] = []

    def extend() -> None:
        if limit is not None and len(found) >= limit:
            return
        free = next((v for v in G.vertices if v not in matched), None)
        if free is None:
            found.append(tuple(chosen))
            return
        for edge in incident[free]:
            coarse, fine = G.endpoints(edge)
            other = fine if coarse == free else coarse
            if other in matched:
                continue
            matched.update((free, other))
            chosen.append(edge)
            extend()
            chosen.pop()
            matched.difference_update((free, other))

    extend()
    return found


def matching_chain(matching: tuple[Cell, ...]) -> dict[Cell, Fraction]:
    """1-chain w with ∂w = Σ_v (−1)^{|π_v|−1} v: each matched edge enters with −sign(coarse end)."""
    return {edge: Fraction(-vertex_sign(RefinementGraph.endpoints(edge)[0].partition)) for edge in matching}


def _require_dgca_morphism(P: AInftyMorphism, n: int) -> None:
    if not (P.source.is_dgca_like() and P.target.is_dgca_like()):
        raise AlgebraError("Nullhomotopies are built for morphisms between dgcas")
    if P.cutoff < n:
        raise AlgebraError(f"The morphism is known up to arity {P.cutoff}, need {n}")


def _verify_boundary(H: MultilinearMap, expected: MultilinearMap, P: AInftyMorphism, what: str) -> None:
    boundary = hom_boundary(H, P.source.complex, P.target.complex)
    diff = first_difference(boundary, expected)
    if diff is not None:
        defect = map_linear_combination([(1, boundary), (-1, expected)], name=f"defect({what})")
        raise VerificationError(f"∂{H.name} ≠ {what}", defect=defect, witness=diff)


def nullhomotopy_from_graph(P: AInftyMorphism, n: int, choice: int = 0) -> MultilinearMap:
    """H_n with ∂H_n = k_n, realized along the `choice`-th perfect matching of G_n."""
    if n < 2:
        raise AlgebraError(f"Nullhomotopies start at n = 2, got {n}")
    if n > NULLHOMOTOPY_CAP:
        raise ResourceBoundError(f"Nullhomotopies are capped at n = {NULLHOMOTOPY_CAP}, got {n}")
    _require_dgca_morphism(P, n)
    G = build_refinement_graph(n)
    matchings = perfect_matchings(G, limit=choice + 1)
    if len(matchings) <= choice:
        raise ConstructionError(f"G_{n} has only {len(matchings)} perfect matchings", report=G.to_dot())
    H = realize_chain(matching_chain(matchings[choice]), P, n, 1).with_name(f"H{n}")
    _verify_boundary(H, morphism_cumulant(P, n), P, f"k{n}")
    logger.debug("H_%d from matching %d of G_%d verified", n, choice, n)
    return H


@dataclass
class SecondLevelHomotopy:
    G: MultilinearMap
    first: MultilinearMap
    second: MultilinearMap
    chain: dict[Cell, Fraction]


def second_level_homotopy(P: AInftyMorphism, n: int = 3) -> SecondLevelHomotopy:
    """G with ∂G = H − H′ for the two smallest perfect matchings of G_n."""
    if n > 3:
        raise ResourceBoundError(f"Second-level homotopies are capped at n = 3, got {n}")
    _require_dgca_morphism(P, n)
    G = build_refinement_graph(n)
    matchings = perfect_matchings(G, limit=2)
    if len(matchings) < 2:
        raise ConstructionError(f"G_{n} needs two perfect matchings, found {len(matchings)}", report=G.to_dot())
    first, second = (matching_chain(m) for m in matchings)
    H = nullhomotopy_from_graph(P, n, choice=0)
    H_prime = nullhomotopy_from_graph(P, n, choice=1).with_name(f"H{n}'")

    cycle = dict(first)
    for edge, coeff in second.items():
        add_into(cycle, edge, -coeff)
    c = build_cumulant_complex(n)
    W = c.solve_boundary(cycle, 1)
    G_map = realize_chain(W, P, n, 2).with_name(f"G{n}")
    _verify_boundary(G_map, map_linear_combination([(1, H), (-1, H_prime)]), P, f"H{n} − H{n}'")
    return SecondLevelHomotopy(G_map, H, H_prime, W)


# ---------------------------------------------------------------------------
# C∞ targets
# ---------------------------------------------------------------------------

def cumulant_upto_homotopy(P: AInftyMorphism, n: int, bracketing: Any = None) -> MultilinearMap:
    """k_n with the n-fold target products bracketed along `bracketing` (left-bracketed by default)."""
    if n > 3:
        raise ResourceBoundError(f"Bracketed cumulants are capped at n = 3, got {n}")
    if bracketing is not None:
        if not bracketing.is_binary() or bracketing.leaves != n:
            raise AlgebraError(f"Bracketing {bracketing} is not a binary tree with {n} leaves")
    return morphism_cumulant(P, n, bracketing).with_name(f"k{n}{bracketing or ''}")


def bracketing_homotopy(P: AInftyMorphism, left: Any, right: Any) -> MultilinearMap:
    """G with ∂G = k₃(left) − k₃(right), a multiple of m₃(p₁⊗p₁⊗p₁)."""
    B, p1 = P.target, P.p(1)
    k_left = cumulant_upto_homotopy(P, 3, left)
    k_right = cumulant_upto_homotopy(P, 3, right)
    assoc = map_linear_combination(
        [(1, iterated_product(B.m(2), 3, left)), (-1, iterated_product(B.m(2), 3, right))]
    )
    witness = first_difference(assoc, zero_map(B.module, B.module, 3, 0))
    if witness is None:
        G = zero_map(P.source.module, B.module, 3, -1)
    else:
        # ∂m₃ = s·(left − right) on the target; s is read off one nonzero value
        word, value = witness
        label, coeff = next(iter(value.items()))
        ratio = hom_boundary(B.m(3), B.complex, B.complex).on_basis(word).get(label, 0) / coeff
        if ratio not in (1, -1):
            raise VerificationError("m₃ does not bound the associator", defect=assoc, witness=witness)
        G = map_linear_combination([(2 * ratio, precompose_tensor(B.m(3), [p1, p1, p1]))])
    G = G.with_name("G")
    _verify_boundary(G, map_linear_combination([(1, k_left), (-1, k_right)]), P, "k3 difference")
    return G


__all__ = [
    "SecondLevelHomotopy",
    "block_product",
    "boolean_k2_crosscheck",
    "bracketing_homotopy",
    "cumulant",
    "cumulant_expansion",
    "cumulant_upto_homotopy",
    "expansion_to_text",
    "matching_chain",
    "mobius_coefficient",
    "moment",
    "moments_from_cumulants",
    "morphism_cumulant",
    "nullhomotopy_from_graph",
    "perfect_matchings",
    "second_level_homotopy",
]
