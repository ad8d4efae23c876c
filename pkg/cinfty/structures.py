"""
Chain complexes, dgcas, A∞/C∞ structures and morphisms, and their checkers.

All A∞ signs come from the bar construction: an arity-n map G of degree g becomes the
map on the suspension

    G̃(sa₁,…,saₙ) = (−1)^{Σ_j (n−j)(|a_j|−1)} s G(a₁,…,aₙ)

of degree g + n − 1.  Structures {m_n} give degree +1 components b_n, morphisms {p_n} give
degree 0 components f_n, and the defining identities are the coderivation/coalgebra-map
conditions on words of basis elements.  Defects are converted back before they are reported.
"""
from __future__ import annotations

import itertools
import logging
from functools import lru_cache
from typing import Mapping, Sequence

from cinfty.config import get_settings
from cinfty.core import (
    AlgebraError,
    GradedModule,
    MultilinearMap,
    ResourceBoundError,
    ShiftedModule,
    compose,
    compose_at,
    koszul_sign,
    map_linear_combination,
    permute_word,
    precompose_tensor,
    same_module,
    sign,
    zero_map,
)
from cinfty.report import CheckReport, build_report, merge_reports, zero_map_report

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

class ChainComplex:
    def __init__(self, module: GradedModule, differential: MultilinearMap):
        if differential.arity != 1 or differential.degree != 1:
            raise AlgebraError(f"A differential has arity 1 and degree +1, got {differential!r}")
        if not (same_module(differential.source, module) and same_module(differential.target, module)):
            raise AlgebraError(f"Differential {differential!r} does not act on {module.name}")
        self.module = module
        self.differential = differential

    @property
    def d(self) -> MultilinearMap:
        return self.differential

    @property
    def name(self) -> str:
        return self.module.name

    def __repr__(self) -> str:
        return f"ChainComplex({self.module.name})"


class DgcaPresentation:
    def __init__(self, complex: ChainComplex, product: MultilinearMap):
        if product.arity != 2 or product.degree != 0:
            raise AlgebraError(f"A dgca product has arity 2 and degree 0, got {product!r}")
        if not (same_module(product.source, complex.module) and same_module(product.target, complex.module)):
            raise AlgebraError(f"Product {product!r} does not act on {complex.name}")
        self.complex = complex
        self.product = product

    @property
    def module(self) -> GradedModule:
        return self.complex.module

    def as_ainfty(self, cutoff: int = 4) -> "AInftyStructure":
        return AInftyStructure(self.complex, {2: self.product}, cutoff=cutoff)

    def __repr__(self) -> str:
        return f"DgcaPresentation({self.complex.name})"


class AInftyStructure:
    """{m_n}, 1 ≤ n ≤ cutoff, with m₁ the differential and m_n of degree 2 − n."""

    def __init__(self, complex: ChainComplex, ops: Mapping[int, MultilinearMap], cutoff: int = 4):
        self.complex = complex
        self.cutoff = cutoff
        self.ops: dict[int, MultilinearMap] = {}
        for n, m in sorted(ops.items()):
            if not 2 <= n <= cutoff:
                raise AlgebraError(f"m_{n} outside arity range 2..{cutoff}")
            if m.arity != n or m.degree != 2 - n:
                raise AlgebraError(f"m_{n} must have arity {n} and degree {2 - n}, got {m!r}")
            if not (same_module(m.source, complex.module) and same_module(m.target, complex.module)):
                raise AlgebraError(f"m_{n} does not act on {complex.name}")
            self.ops[n] = m
        self._bar: dict[int, MultilinearMap] = {}

    @property
    def module(self) -> GradedModule:
        return self.complex.module

    def m(self, n: int) -> MultilinearMap:
        if n == 1:
            return self.complex.differential
        if not 2 <= n <= self.cutoff:
            raise AlgebraError(f"Arity {n} exceeds the stored cut-off {self.cutoff}")
        if n not in self.ops:
            self.ops[n] = zero_map(self.module, self.module, n, 2 - n)
        return self.ops[n]

    def bar(self, n: int) -> MultilinearMap:
        if n not in self._bar:
            self._bar[n] = to_bar(self.m(n))
        return self._bar[n]

    def is_dgca_like(self) -> bool:
        return all(m.is_zero() for n, m in self.ops.items() if n >= 3)

    def to_json(self) -> dict:
        return {
            "complex": self.module.to_json(),
            "d": self.complex.differential.to_json(),
            "m": [self.m(n).to_json() for n in range(2, self.cutoff + 1)],
        }

    def __repr__(self) -> str:
        return f"AInftyStructure({self.module.name}, cutoff={self.cutoff})"


class AInftyMorphism:
    """{p_n}, 1 ≤ n ≤ cutoff, p_n of degree 1 − n."""

    def __init__(
        self,
        source: AInftyStructure,
        target: AInftyStructure,
        maps: Mapping[int, MultilinearMap],
        cutoff: int | None = None,
    ):
        if 1 not in maps:
            raise AlgebraError("A morphism needs its linear part p₁")
        self.source = source
        self.target = target
        self.cutoff = cutoff if cutoff is not None else max(maps)
        self.maps: dict[int, MultilinearMap] = {}
        for n, p in sorted(maps.items()):
            if not 1 <= n <= self.cutoff:
                raise AlgebraError(f"p_{n} outside arity range 1..{self.cutoff}")
            if p.arity != n or p.degree != 1 - n:
                raise AlgebraError(f"p_{n} must have arity {n} and degree {1 - n}, got {p!r}")
            if not (same_module(p.source, source.module) and same_module(p.target, target.module)):
                raise AlgebraError(f"p_{n} must map {source.module.name} to {target.module.name}")
            self.maps[n] = p
        self._bar: dict[int, MultilinearMap] = {}

    def p(self, n: int) -> MultilinearMap:
        if not 1 <= n <= self.cutoff:
            raise AlgebraError(f"Arity {n} exceeds the stored cut-off {self.cutoff}")
        if n not in self.maps:
            self.maps[n] = zero_map(self.source.module, self.target.module, n, 1 - n)
        return self.maps[n]

    def bar(self, n: int) -> MultilinearMap:
        if n not in self._bar:
            self._bar[n] = to_bar(self.p(n))
        return self._bar[n]

    def to_json(self, basis: Sequence | None = None) -> dict:
        return {"p": [self.p(n).to_json(basis) for n in range(1, self.cutoff + 1)]}

    def __repr__(self) -> str:
        return f"AInftyMorphism({self.source.module.name} -> {self.target.module.name}, cutoff={self.cutoff})"


# ---------------------------------------------------------------------------
# Bar conversion
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def suspension(module: GradedModule) -> ShiftedModule:
    return ShiftedModule(module)


def decalage_sign(degrees: Sequence[int]) -> int:
    n = len(degrees)
    return sign(sum((n - j) * (d - 1) for j, d in enumerate(degrees, start=1)))


def to_bar(G: MultilinearMap) -> MultilinearMap:
    n = G.arity
    source, target = suspension(G.source), suspension(G.target)

    def rule(word: tuple) -> dict:
        s = decalage_sign([G.source.degree(x) for x in word])
        return {k: s * v for k, v in G.on_basis(word).items()}

    return MultilinearMap(source, target, n, G.degree + n - 1, rule=rule, name=f"s{G.name}")


def from_bar(g: MultilinearMap) -> MultilinearMap:
    if not isinstance(g.source, ShiftedModule) or not isinstance(g.target, ShiftedModule):
        raise AlgebraError(f"{g!r} is not a map between suspensions")
    n = g.arity
    base = g.source.base

    def rule(word: tuple) -> dict:
        s = decalage_sign([base.degree(x) for x in word])
        return {k: s * v for k, v in g.on_basis(word).items()}

    return MultilinearMap(base, g.target.base, n, g.degree - n + 1, rule=rule, name=g.name.removeprefix("s"))


def compositions(n: int, parts: int) -> list[tuple[int, ...]]:
    """Ordered tuples of `parts` positive integers summing to n."""
    if parts == 1:
        return [(n,)]
    return [
        (first,) + rest
        for first in range(1, n - parts + 2)
        for rest in compositions(n - first, parts - 1)
    ]


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def check_complex(c: ChainComplex) -> CheckReport:
    dd = compose(c.differential, c.differential)
    return zero_map_report("d∘d = 0", dd, arity_range=[1, 1])


def check_dgca(A: DgcaPresentation) -> CheckReport:
    m, d = A.product, A.complex.differential
    assoc = map_linear_combination([(1, compose_at(m, m, 1)), (-1, compose_at(m, m, 2))])
    reports = [
        check_complex(A.complex),
        zero_map_report("associativity", assoc),
        zero_map_report("graded commutativity", shuffle_defect(m, 1, 1)),
        zero_map_report("Leibniz", hom_boundary(m, d, d)),
    ]
    return merge_reports(f"dgca {A.module.name}", reports)


def enumerate_shuffles(q: int, r: int, bound: int | None = None) -> list[tuple[int, ...]]:
    """(q,r)-shuffles σ, written as the tuple (σ(1),…,σ(q+r)), in lexicographic order."""
    if q < 1 or r < 1:
        raise AlgebraError(f"Shuffle sizes must be positive, got ({q},{r})")
    bound = bound if bound is not None else get_settings().SHUFFLE_BOUND
    if q + r > bound:
        raise ResourceBoundError(f"Shuffle size {q + r} exceeds the bound {bound}")
    n = q + r
    shuffles = []
    for first in itertools.combinations(range(1, n + 1), q):
        rest = tuple(i for i in range(1, n + 1) if i not in first)
        shuffles.append(first + rest)
    shuffles.sort()
    return shuffles


def permutation_sign(permutation: Sequence[int]) -> int:
    inversions = sum(
        1
        for i in range(len(permutation))
        for j in range(i + 1, len(permutation))
        if permutation[i] > permutation[j]
    )
    return sign(inversions)


def shuffle_defect(f: MultilinearMap, q: int, r: int) -> MultilinearMap:
    """x ↦ Σ_σ sgn(σ)·ε(σ; x)·f(x_{σ⁻¹(1)},…,x_{σ⁻¹(q+r)}) over (q,r)-shuffles.

    sgn·ε is the Koszul sign of the permutation on the suspended inputs, so the sum
    vanishes for a graded-commutative product: m(a,b) − (−1)^{|a||b|} m(b,a).
    """
    if f.arity != q + r:
        raise AlgebraError(f"shuffle_defect({q},{r}) needs arity {q + r}, got {f.arity}")
    shuffles = [(s, permutation_sign(s)) for s in enumerate_shuffles(q, r)]

    def rule(word: tuple) -> dict:
        degrees = [f.source.degree(x) for x in word]
        out: dict = {}
        for sigma, sgn in shuffles:
            c = sgn * koszul_sign(sigma, degrees)
            for k, v in f.on_basis(permute_word(word, sigma)).items():
                total = out.get(k, 0) + c * v
                if total:
                    out[k] = total
                else:
                    out.pop(k, None)
        return out

    return MultilinearMap(f.source, f.target, f.arity, f.degree, rule=rule, name=f"sh{q},{r}({f.name})")


def stasheff_defect(A: AInftyStructure, n: int) -> MultilinearMap:
    """Arity-n component of D∘D, unsuspended (degree 3 − n)."""
    if not 1 <= n <= A.cutoff:
        raise AlgebraError(f"Arity {n} outside 1..{A.cutoff}")
    terms = []
    for j in range(1, n + 1):
        for i in range(0, n - j + 1):
            k = n - j - i
            terms.append((1, compose_at(A.bar(i + 1 + k), A.bar(j), i + 1)))
    return from_bar(map_linear_combination(terms, name=f"stasheff{n}"))


def check_stasheff(A: AInftyStructure, up_to: int | None = None) -> CheckReport:
    up_to = up_to if up_to is not None else A.cutoff
    if up_to > A.cutoff:
        raise AlgebraError(f"up_to={up_to} exceeds the stored cut-off {A.cutoff}")
    reports = []
    for n in range(1, up_to + 1):
        logger.debug("Stasheff identity, arity %d on %s", n, A.module.name)
        reports.append(zero_map_report(f"stasheff arity {n}", stasheff_defect(A, n)))
    return merge_reports("stasheff", reports)


def check_cinfty(A: AInftyStructure, up_to: int | None = None) -> CheckReport:
    up_to = up_to if up_to is not None else A.cutoff
    reports = []
    for total in range(2, up_to + 1):
        for q in range(1, total):
            reports.append(zero_map_report(f"shuffle ({q},{total - q}) m_{total}", shuffle_defect(A.m(total), q, total - q)))
    return merge_reports("cinfty", reports) if reports else build_report("cinfty", [1, up_to], [])


def morphism_defect(P: AInftyMorphism, n: int) -> MultilinearMap:
    """Σ p(…m^A…) − Σ m^B(p⊗…⊗p) at arity n, unsuspended (degree 2 − n)."""
    if not 1 <= n <= P.cutoff:
        raise AlgebraError(f"Arity {n} exceeds the stored morphism cut-off {P.cutoff}")
    A, B = P.source, P.target
    terms = []
    for j in range(1, min(n, A.cutoff) + 1):
        for i in range(0, n - j + 1):
            k = n - j - i
            terms.append((1, compose_at(P.bar(i + 1 + k), A.bar(j), i + 1)))
    for r in range(1, min(n, B.cutoff) + 1):
        for parts in compositions(n, r):
            terms.append((-1, precompose_tensor(B.bar(r), [P.bar(m) for m in parts])))
    return from_bar(map_linear_combination(terms, name=f"morphism{n}"))


def check_morphism(P: AInftyMorphism, up_to: int | None = None) -> CheckReport:
    up_to = up_to if up_to is not None else P.cutoff
    reports = [zero_map_report(f"morphism arity {n}", morphism_defect(P, n)) for n in range(1, up_to + 1)]
    return merge_reports("morphism", reports)


def check_cinfty_morphism(P: AInftyMorphism, up_to: int | None = None) -> CheckReport:
    up_to = up_to if up_to is not None else P.cutoff
    reports = [check_morphism(P, up_to)]
    for total in range(2, up_to + 1):
        for q in range(1, total):
            reports.append(zero_map_report(f"shuffle ({q},{total - q}) p_{total}", shuffle_defect(P.p(total), q, total - q)))
    return merge_reports("cinfty morphism", reports)


def hom_boundary(f: MultilinearMap, dA, dB) -> MultilinearMap:
    """∂f = d_B∘f − (−1)^{|f|} Σ_k f∘(1⊗…⊗d_A⊗…⊗1)."""
    dA = dA.differential if isinstance(dA, ChainComplex) else dA
    dB = dB.differential if isinstance(dB, ChainComplex) else dB
    if not (same_module(dA.source, f.source) and same_module(dB.source, f.target)):
        raise AlgebraError(f"Differentials do not match the signature of {f!r}")
    c = -sign(f.degree)
    terms = [(1, compose(dB, f))]
    terms += [(c, compose_at(f, dA, k)) for k in range(1, f.arity + 1)]
    return map_linear_combination(terms, name=f"∂{f.name}")


__all__ = [
    "AInftyMorphism",
    "AInftyStructure",
    "ChainComplex",
    "DgcaPresentation",
    "check_cinfty",
    "check_cinfty_morphism",
    "check_complex",
    "check_dgca",
    "check_morphism",
    "check_stasheff",
    "enumerate_shuffles",
    "from_bar",
    "hom_boundary",
    "morphism_defect",
    "shuffle_defect",
    "stasheff_defect",
    "to_bar",
]
