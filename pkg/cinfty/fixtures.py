"""
Named fixtures: the dgcas, contractions and ∞-morphisms the suites and the tests run on.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from cinfty.config import FixtureName, get_settings
from cinfty.core import AlgebraError, FiniteModule, MultilinearMap, UnsupportedFixture, identity_map, map_scale, sign
from cinfty.forms import CircleModel, SimplexModel, SimplicialComplex, cochain_algebra
from cinfty.intervals import (
    EdgeSubdivision,
    cochains_to_point,
    interval_contraction,
    refine_cochains,
    skewed_interval_contraction,
    subdivide_complex,
)
from cinfty.structures import AInftyMorphism, AInftyStructure, ChainComplex, DgcaPresentation
from cinfty.transfer import Contraction, compose_contractions, transfer_morphism, transfer_structure

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Finite dgcas
# ---------------------------------------------------------------------------

def _zero_differential(module: FiniteModule) -> ChainComplex:
    return ChainComplex(module, MultilinearMap(module, module, 1, 1, table={}, name="0"))


def exterior_algebra(generators: Sequence[str] = ("x",), name: str | None = None) -> DgcaPresentation:
    """Λ on degree-1 generators (single letters), d = 0; basis words are sorted subsets."""
    generators = tuple(generators)
    if any(len(g) != 1 for g in generators) or len(set(generators)) != len(generators):
        raise AlgebraError(f"Generators must be distinct single letters, got {generators}")
    words = ["".join(c) for r in range(len(generators) + 1) for c in itertools.combinations(generators, r)]
    label = {w: w or "1" for w in words}
    module = FiniteModule(name or f"Λ({','.join(generators)})", [(label[w], len(w)) for w in words])
    position = {g: k for k, g in enumerate(generators)}

    table = {}
    for u, v in itertools.product(words, repeat=2):
        if set(u) & set(v):
            continue
        inversions = sum(1 for x in u for y in v if position[x] > position[y])
        merged = "".join(sorted(u + v, key=position.get))
        table[(label[u], label[v])] = {label[merged]: sign(inversions)}
    product = MultilinearMap(module, module, 2, 0, table=table, name="∧")
    return DgcaPresentation(_zero_differential(module), product)


def torus_cohomology() -> DgcaPresentation:
    return exterior_algebra(("x", "y"), name="H*(T2)")


def truncated_polynomial(top: int = 2, name: str | None = None) -> DgcaPresentation:
    """Q[x]/(x^{top+1}) in degree 0."""
    labels = ["1", "x"] + [f"x{k}" for k in range(2, top + 1)]
    module = FiniteModule(name or f"Q[x]/x{top + 1}", [(l, 0) for l in labels])
    table = {
        (labels[a], labels[b]): {labels[a + b]: 1}
        for a in range(top + 1)
        for b in range(top + 1)
        if a + b <= top
    }
    return DgcaPresentation(_zero_differential(module), MultilinearMap(module, module, 2, 0, table=table, name="·"))


def dgca_battery() -> list[DgcaPresentation]:
    return [
        exterior_algebra(("x",)),
        exterior_algebra(("x", "y")),
        exterior_algebra(("x", "y", "z")),
        torus_cohomology(),
        truncated_polynomial(2),
    ]


def identity_morphism(A: DgcaPresentation, cutoff: int = 4) -> AInftyMorphism:
    """The strict morphism id: p₁ = id, p_{≥2} = 0."""
    structure = A.as_ainfty(cutoff)
    return AInftyMorphism(structure, structure, {1: identity_map(A.module)}, cutoff=cutoff)


# ---------------------------------------------------------------------------
# Negative controls
# ---------------------------------------------------------------------------

def symmetric_p2_morphism() -> AInftyMorphism:
    """id on Λ(x) with p₂(x, x) = x: an A∞ morphism up to arity 2 whose p₂ fails the shuffle condition."""
    A = exterior_algebra(("x",)).as_ainfty(2)
    p2 = MultilinearMap(A.module, A.module, 2, -1, table={("x", "x"): {"x": 1}}, name="p2")
    return AInftyMorphism(A, A, {1: identity_map(A.module), 2: p2}, cutoff=2)


def nonassociative_algebra() -> AInftyStructure:
    """Commutative, m₂(m₂(a,a),b) = a but m₂(a,m₂(a,b)) = 0, and no m₃ to repair it."""
    module = FiniteModule("N", [("a", 0), ("b", 0)])
    table = {("a", "a"): {"b": 1}, ("b", "b"): {"a": 1}}
    m2 = MultilinearMap(module, module, 2, 0, table=table, name="m2")
    return AInftyStructure(_zero_differential(module), {2: m2}, cutoff=3)


def flipped_homotopy(c: Contraction) -> Contraction:
    return Contraction(c.big, c.small, c.i, c.p, map_scale(-1, c.h), side_conditions=c.side_conditions, name=f"{c.name}(−h)")


# ---------------------------------------------------------------------------
# Transfer fixtures
# ---------------------------------------------------------------------------

@dataclass
class TransferFixture:
    name: str
    model: SimplexModel | CircleModel
    source: DgcaPresentation
    contraction: Contraction
    structure: AInftyStructure
    morphism: AInftyMorphism


def _transfer_fixture(name: str, model: SimplexModel | CircleModel, c: Contraction, arity: int) -> TransferFixture:
    structure = transfer_structure(model.dgca, c, arity, verify=False)
    morphism = transfer_morphism(model.dgca, c, arity, target=structure, verify=False)
    logger.info("fixture %s: transferred to arity %d", name, arity)
    return TransferFixture(name, model, model.dgca, c, structure, morphism)


@lru_cache(maxsize=None)
def simplex_model(dim: int) -> SimplexModel:
    return SimplexModel(dim)


@lru_cache(maxsize=None)
def circle_model() -> CircleModel:
    return CircleModel()


@lru_cache(maxsize=None)
def transfer_fixture(fixture: FixtureName | str, arity: int | None = None) -> TransferFixture:
    """Forms on Δ¹, Δ², ∂Δ² or the cut interval transferred to cochains, unverified; the suites certify them."""
    fixture = FixtureName(fixture)
    arity = arity if arity is not None else get_settings().MAX_ARITY
    if fixture is FixtureName.INTERVAL:
        model = simplex_model(1)
        return _transfer_fixture("interval", model, model.contraction(), arity)
    if fixture is FixtureName.DELTA2:
        model = simplex_model(2)
        return _transfer_fixture("delta2", model, model.contraction(), arity)
    if fixture is FixtureName.SUBDIVIDED:
        model = simplex_model(1)
        decomposition = interval_contraction(model, (0, Fraction(1, 2), 1))
        return _transfer_fixture("subdivided", model, decomposition.contraction, arity)
    if fixture is FixtureName.CIRCLE:
        model = circle_model()
        return _transfer_fixture("circle", model, model.contraction(), arity)
    raise UnsupportedFixture(f"{fixture.value} has no forms to transfer")


@lru_cache(maxsize=None)
def cumulant_fixture(fixture: FixtureName | str, arity: int | None = None) -> TransferFixture:
    """Forms on Δᵏ → C*(Δᵏ) → Q: a C∞ morphism between dgcas whose p₁ is not multiplicative."""
    fixture = FixtureName(fixture)
    arity = arity if arity is not None else get_settings().MAX_ARITY
    dims = {FixtureName.INTERVAL: 1, FixtureName.DELTA2: 2}
    if fixture not in dims:
        raise UnsupportedFixture(f"{fixture.value} has no cumulant morphism")
    model = simplex_model(dims[fixture])
    c = compose_contractions(model.contraction(), cochains_to_point(model.cochains))
    structure = transfer_structure(model.dgca, c, arity, verify=False)
    morphism = transfer_morphism(model.dgca, c, arity, target=structure, verify=False)
    return TransferFixture(f"{fixture.value}→Q", model, model.dgca, c, structure, morphism)


# ---------------------------------------------------------------------------
# Towers and the circle
# ---------------------------------------------------------------------------

@dataclass
class TowerFixture:
    model: SimplexModel
    outer: Contraction
    inner: Contraction
    skewed: Contraction


def subdivided_tower(at: Fraction = Fraction(1, 2)) -> TowerFixture:
    """Ω(Δ¹) → C*(0 < at < 1) → C*(Δ¹), with the skewed direct contraction as a control."""
    model = simplex_model(1)
    points = (Fraction(0), Fraction(at), Fraction(1))
    outer = interval_contraction(model, points).contraction
    inner = refine_cochains(points, (0, 1)).refinement
    return TowerFixture(model, outer, inner, skewed_interval_contraction(model))


def circle() -> SimplicialComplex:
    return SimplicialComplex.triangle_boundary()


def circle_cochains() -> DgcaPresentation:
    """Cochains of ∂Δ² under the cup product (associative, not commutative)."""
    return cochain_algebra(circle())


def subdivided_circle() -> EdgeSubdivision:
    return subdivide_complex(circle(), (0, 1))


def list_fixtures() -> list[dict]:
    return [
        {"name": FixtureName.INTERVAL.value, "description": "polynomial forms on Δ¹ and C*(Δ¹)"},
        {"name": FixtureName.DELTA2.value, "description": "polynomial forms on Δ² and C*(Δ²)"},
        {"name": FixtureName.CIRCLE.value, "description": "∂Δ² with chartwise Whitney forms and cup cochains"},
        {"name": FixtureName.SUBDIVIDED.value, "description": "Δ¹ cut at 1/2, with the refinement tower"},
        {"name": FixtureName.BATTERY.value, "description": "exterior algebras on 1–3 odd generators, torus cohomology"},
    ]
