"""
Contractions and homotopy transfer.

A contraction (i, p, h) between a big complex A and a small complex B satisfies

    p∘i = id_B,     d h + h d = i∘p − id_A.

Transfer works on the suspended side: ι, π and H are the bar versions of i, p and h, the
structure maps are sums over planar trees (root π, vertices b_k, internal edges H, leaves ι),
and the ∞-morphisms come from perturbing the symmetrized tensor-trick homotopy on words.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import sympy

from cinfty.config import get_settings
from cinfty.core import (
    AlgebraError,
    ConstructionError,
    MultilinearMap,
    ResourceBoundError,
    add_into,
    axpy,
    compose,
    identity_map,
    first_difference,
    map_linear_combination,
    precompose_tensor,
    same_module,
    tensor_product_apply,
    to_scalar,
)
from cinfty.report import CheckReport, build_report, merge_reports, violation, zero_map_report
from cinfty.structures import (
    AInftyMorphism,
    AInftyStructure,
    ChainComplex,
    DgcaPresentation,
    check_cinfty,
    check_cinfty_morphism,
    check_morphism,
    check_stasheff,
    from_bar,
    suspension,
    to_bar,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Contractions
# ---------------------------------------------------------------------------

class Contraction:
    def __init__(
        self,
        big: ChainComplex,
        small: ChainComplex,
        i: MultilinearMap,
        p: MultilinearMap,
        h: MultilinearMap,
        side_conditions: bool = False,
        name: str = "contraction",
    ):
        for label, f, src, tgt, deg in (
            ("i", i, small, big, 0),
            ("p", p, big, small, 0),
            ("h", h, big, big, -1),
        ):
            if f.arity != 1 or f.degree != deg:
                raise AlgebraError(f"{label} must have arity 1 and degree {deg}, got {f!r}")
            if not (same_module(f.source, src.module) and same_module(f.target, tgt.module)):
                raise AlgebraError(f"{label} must map {src.name} to {tgt.name}")
        self.big = big
        self.small = small
        self.i = i
        self.p = p
        self.h = h
        self.side_conditions = side_conditions
        self.name = name

    def __repr__(self) -> str:
        return f"Contraction({self.name}: {self.big.name} -> {self.small.name})"


def identity_contraction(complex: ChainComplex) -> Contraction:
    ident = identity_map(complex.module)
    h = MultilinearMap(complex.module, complex.module, 1, -1, rule=lambda w: {}, name="0")
    return Contraction(complex, complex, ident, ident, h, side_conditions=True, name=f"id_{complex.name}")


def check_contraction(c: Contraction, basis: Sequence | None = None) -> CheckReport:
    """Both defining identities, plus h∘h, h∘i, p∘h when the side-condition flag is set."""
    d_big, d_small = c.big.differential, c.small.differential
    pi_minus_id = map_linear_combination([(1, compose(c.p, c.i)), (-1, identity_map(c.small.module))])
    homotopy = map_linear_combination(
        [
            (1, compose(d_big, c.h)),
            (1, compose(c.h, d_big)),
            (-1, compose(c.i, c.p)),
            (1, identity_map(c.big.module)),
        ]
    )
    reports = [
        zero_map_report("p∘i = id", pi_minus_id),
        zero_map_report("dh + hd = i∘p − id", homotopy, basis),
        zero_map_report("i chain map", map_linear_combination([(1, compose(d_big, c.i)), (-1, compose(c.i, d_small))])),
        zero_map_report("p chain map", map_linear_combination([(1, compose(d_small, c.p)), (-1, compose(c.p, d_big))]), basis),
    ]
    if c.side_conditions:
        reports += [
            zero_map_report("h∘h = 0", compose(c.h, c.h), basis),
            zero_map_report("h∘i = 0", compose(c.h, c.i)),
            zero_map_report("p∘h = 0", compose(c.p, c.h), basis),
        ]
    return merge_reports(f"contraction {c.name}", reports)


def compose_contractions(outer: Contraction, inner: Contraction, verify: bool = True) -> Contraction:
    """Ω → D → C:  i_C = i_D∘i,  p_C = p∘p_D,  h_C = i_D∘h∘p_D + h_D."""
    if not same_module(outer.small.module, inner.big.module):
        raise AlgebraError(f"Cannot compose {outer!r} with {inner!r}: {outer.small.name} ≠ {inner.big.name}")
    h = map_linear_combination(
        [(1, compose(outer.i, compose(inner.h, outer.p))), (1, outer.h)], name="h_C"
    )
    composite = Contraction(
        outer.big,
        inner.small,
        compose(outer.i, inner.i).with_name("i_C"),
        compose(inner.p, outer.p).with_name("p_C"),
        h,
        side_conditions=outer.side_conditions and inner.side_conditions,
        name=f"{outer.name}∘{inner.name}",
    )
    if verify:
        report = check_contraction(composite)
        if not report.passed:
            raise ConstructionError(f"Composite {composite.name} fails the homotopy identity", report)
    return composite


def _to_sympy(x: Fraction) -> sympy.Rational:
    return sympy.Rational(x.numerator, x.denominator)


def _column(vector: Mapping, basis: Sequence) -> list:
    return [_to_sympy(vector.get(b, Fraction(0))) for b in basis]


def contraction_from_retraction(
    big: ChainComplex,
    small: ChainComplex,
    i: MultilinearMap,
    p: MultilinearMap,
    name: str = "retraction",
) -> Contraction:
    """Canonical homotopy for finite complexes.

    ker p splits as boundaries ⊕ a complement L; h is −d⁻¹ on the boundaries and zero on
    L and on the image of i.  Fails unless ker p is acyclic.
    """
    module = big.module
    d = big.differential
    degrees = sorted({module.degree(b) for b in module.basis})
    by_degree = {n: list(module.basis_of_degree(n)) for n in degrees}
    small_by_degree = {n: list(small.module.basis_of_degree(n)) for n in degrees}

    kernel: dict[int, list] = {}
    for n in degrees:
        rows = [list(_column(p.on_basis((b,)), small_by_degree[n])) for b in by_degree[n]]
        if small_by_degree[n]:
            matrix = sympy.Matrix(rows).T
            kernel[n] = matrix.nullspace()
        else:
            kernel[n] = [sympy.Matrix([1 if k == j else 0 for k in range(len(by_degree[n]))]) for j in range(len(by_degree[n]))]

    def apply_d(n: int, column: sympy.Matrix) -> sympy.Matrix:
        out: dict = {}
        for coeff, b in zip(column, by_degree[n]):
            if coeff != 0:
                axpy(out, to_scalar(coeff), d.on_basis((b,)))
        return sympy.Matrix(_column(out, by_degree.get(n + 1, [])))

    complement: dict[int, list] = {}
    boundaries: dict[int, list] = {n: [] for n in degrees}
    for n in degrees:
        chosen = list(boundaries[n])
        rank = len(chosen)
        complement[n] = []
        for k in kernel[n]:
            trial = sympy.Matrix.hstack(*(chosen + [k]))
            if trial.rank() > rank:
                chosen.append(k)
                complement[n].append(k)
                rank += 1
        if rank != len(kernel[n]):
            raise ConstructionError(f"{name}: boundaries of ker p in degree {n} are not inside ker p")
        if complement[n]:
            images = [apply_d(n, l) for l in complement[n]] if n + 1 in boundaries else []
            if len(images) != len(complement[n]) or sympy.Matrix.hstack(*images).rank() < len(images):
                raise ConstructionError(f"{name}: ker p is not acyclic in degree {n}")
            boundaries[n + 1] = images

    table: dict[tuple, dict] = {}
    for n in degrees:
        size = len(by_degree[n])
        if size == 0:
            continue
        image_i = [sympy.Matrix(_column(i.on_basis((s,)), by_degree[n])) for s in small_by_degree[n]]
        cols = image_i + boundaries[n] + complement[n]
        if len(cols) != size:
            raise ConstructionError(
                f"{name}: ker p is not acyclic in degree {n} ({len(cols)} splitting vectors for dimension {size})"
            )
        M = sympy.Matrix.hstack(*cols)
        if M.rank() != size:
            raise ConstructionError(f"{name}: splitting in degree {n} is degenerate")
        lower = by_degree.get(n - 1, [])
        images = (
            [sympy.zeros(len(lower), 1)] * len(image_i)
            + [-l for l in complement.get(n - 1, [])]
            + [sympy.zeros(len(lower), 1)] * len(complement[n])
        )
        if not lower:
            continue
        H = sympy.Matrix.hstack(*images) * M.inv()
        for col, b in enumerate(by_degree[n]):
            entry = {lower[row]: to_scalar(H[row, col]) for row in range(len(lower)) if H[row, col] != 0}
            if entry:
                table[(b,)] = entry

    h = MultilinearMap(module, module, 1, -1, table=table, name="h")
    contraction = Contraction(big, small, i, p, h, side_conditions=True, name=name)
    report = check_contraction(contraction)
    if not report.passed:
        raise ConstructionError(f"{name}: constructed homotopy fails its identities", report)
    logger.debug("%s: homotopy with %d nonzero columns", name, len(table))
    return contraction


# ---------------------------------------------------------------------------
# Planar trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlanarTree:
    children: tuple["PlanarTree", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def leaves(self) -> int:
        return 1 if self.is_leaf else sum(c.leaves for c in self.children)

    @property
    def internal_vertices(self) -> int:
        return 0 if self.is_leaf else 1 + sum(c.internal_vertices for c in self.children)

    @property
    def arity(self) -> int:
        return len(self.children)

    def is_binary(self) -> bool:
        return self.is_leaf or (self.arity == 2 and all(c.is_binary() for c in self.children))

    def to_nested(self):
        return "x" if self.is_leaf else [c.to_nested() for c in self.children]

    def __str__(self) -> str:
        if self.is_leaf:
            return "x"
        return "[" + ",".join(str(c) for c in self.children) + "]"


LEAF = PlanarTree()


def _ordered_parts(n: int, k: int) -> list[tuple[int, ...]]:
    if k == 1:
        return [(n,)]
    return [(a,) + rest for a in range(1, n - k + 2) for rest in _ordered_parts(n - a, k - 1)]


def _trees(n: int, binary_only: bool) -> list[PlanarTree]:
    if n == 1:
        return [LEAF]
    result = []
    arities = [2] if binary_only else range(2, n + 1)
    for k in arities:
        for parts in _ordered_parts(n, k):
            groups: list[list[PlanarTree]] = [[]]
            for part in parts:
                groups = [g + [t] for g in groups for t in _trees(part, binary_only)]
            result.extend(PlanarTree(tuple(g)) for g in groups)
    return result


def enumerate_trees(leaves: int, binary_only: bool = False, bound: int | None = None) -> list[PlanarTree]:
    """Rooted planar trees with ordered leaves and internal arities ≥ 2."""
    bound = bound if bound is not None else get_settings().TREE_BOUND
    if leaves < 2:
        raise AlgebraError(f"Trees need at least 2 leaves, got {leaves}")
    if leaves > bound:
        raise ResourceBoundError(f"{leaves} leaves exceeds the tree bound {bound}")
    return sorted(_trees(leaves, binary_only), key=str)


def trees_to_text(trees: Sequence[PlanarTree]) -> str:
    return "\n".join(str(t) for t in trees) + "\n"


# ---------------------------------------------------------------------------
# Transfer of structures
# ---------------------------------------------------------------------------

def _as_ainfty(source, cutoff: int) -> AInftyStructure:
    if isinstance(source, DgcaPresentation):
        return source.as_ainfty(cutoff)
    if isinstance(source, AInftyStructure):
        return source
    raise AlgebraError(f"Cannot transfer from {source!r}")


class _BarData:
    """Suspended contraction data shared by the transfer constructions."""

    def __init__(self, source: AInftyStructure, c: Contraction):
        if not same_module(source.module, c.big.module):
            raise AlgebraError(f"{c!r} does not start at {source.module.name}")
        self.source = source
        self.c = c
        self.sA = suspension(c.big.module)
        self.sB = suspension(c.small.module)
        self.iota = to_bar(c.i)
        self.pi = to_bar(c.p)
        self.H = to_bar(c.h)
        self.iota_pi = compose(self.iota, self.pi)
        self.one = identity_map(self.sA)
        self._tree_maps: dict[PlanarTree, MultilinearMap] = {}
        self._HT: dict[tuple, dict] = {}
        self._delta: dict[tuple, dict] = {}

    # -- trees -------------------------------------------------------------
    def tree_map(self, tree: PlanarTree) -> MultilinearMap | None:
        """Vertex value of a tree: sB^{⊗leaves} → sA, or None when a vertex arity is beyond the source."""
        if tree in self._tree_maps:
            return self._tree_maps[tree]
        if tree.arity > self.source.cutoff:
            self._tree_maps[tree] = None
            return None
        inputs = []
        for child in tree.children:
            if child.is_leaf:
                inputs.append(self.iota)
                continue
            value = self.tree_map(child)
            if value is None:
                self._tree_maps[tree] = None
                return None
            inputs.append(compose(self.H, value))
        value = precompose_tensor(self.source.bar(tree.arity), inputs)
        self._tree_maps[tree] = value
        return value

    # -- tensor coalgebra ----------------------------------------------------
    def tensor_homotopy(self, word: tuple) -> dict:
        """Symmetrized tensor trick on one word of length m.

        H sits in one slot; every other slot carries 1 or ιπ.  With s slots on 1 and t on ιπ the
        term has weight s!t!/m!, the average of 1^{⊗j}⊗H⊗(ιπ)^{⊗rest} over all orderings of the
        slots.  It commutes with the letterwise action of permutations, so it maps shuffle
        products to shuffle products.
        """
        cached = self._HT.get(word)
        if cached is not None:
            return cached
        m = len(word)
        out: dict = {}
        for j in range(m):
            for others in itertools.product((self.one, self.iota_pi), repeat=m - 1):
                s = sum(1 for f in others if f is self.one)
                weight = Fraction(math.factorial(s) * math.factorial(m - 1 - s), math.factorial(m))
                maps = list(others[:j]) + [self.H] + list(others[j:])
                axpy(out, weight, tensor_product_apply(maps, {word: Fraction(1)}))
        self._HT[word] = out
        return out

    def perturbation(self, word: tuple) -> dict:
        """δ = Σ 1^{⊗i} ⊗ b_k ⊗ 1^{⊗j}, k ≥ 2."""
        cached = self._delta.get(word)
        if cached is not None:
            return cached
        m = len(word)
        out: dict = {}
        for k in range(2, min(m, self.source.cutoff) + 1):
            b = self.source.bar(k)
            for i in range(0, m - k + 1):
                maps = [self.one] * i + [b] + [self.one] * (m - k - i)
                axpy(out, Fraction(1), tensor_product_apply(maps, {word: Fraction(1)}))
        self._delta[word] = out
        return out

    def apply(self, op, tensor: Mapping) -> dict:
        out: dict = {}
        for word, c in tensor.items():
            axpy(out, c, op(word))
        return out


def transfer_structure(source, c: Contraction, up_to: int | None = None, verify: bool = True) -> AInftyStructure:
    """m_n = Σ_trees π∘(tree vertex value), converted back from the bar side."""
    up_to = up_to if up_to is not None else get_settings().MAX_ARITY
    A = _as_ainfty(source, max(up_to, 2))
    data = _BarData(A, c)
    ops = {}
    for n in range(2, up_to + 1):
        terms = []
        for tree in enumerate_trees(n):
            value = data.tree_map(tree)
            if value is not None:
                terms.append((1, compose(data.pi, value)))
        ops[n] = from_bar(map_linear_combination(terms, name=f"m{n}")).with_name(f"m{n}")
        logger.debug("transferred m_%d to %s from %d trees", n, c.small.name, len(terms))
    transferred = AInftyStructure(c.small, ops, cutoff=up_to)
    if verify:
        reports = [check_stasheff(transferred, up_to)]
        if isinstance(source, DgcaPresentation) or A.is_dgca_like():
            reports.append(check_cinfty(transferred, up_to))
        report = merge_reports(f"transfer to {c.small.name}", reports)
        if not report.passed:
            raise ConstructionError(f"Transferred structure on {c.small.name} fails its identities", report)
    return transferred


def transfer_morphism(
    source,
    c: Contraction,
    up_to: int | None = None,
    target: AInftyStructure | None = None,
    verify: bool = True,
) -> AInftyMorphism:
    """The ∞-quasi-isomorphism P with p₁ = c.p: f_n = π∘δ∘(H_T∘δ)^{n−2}∘H_T on words."""
    up_to = up_to if up_to is not None else get_settings().MAX_ARITY
    A = _as_ainfty(source, max(up_to, 2))
    B = target if target is not None else transfer_structure(source, c, up_to, verify=verify)
    data = _BarData(A, c)
    maps = {1: c.p}
    for n in range(2, up_to + 1):
        def rule(word: tuple, data=data) -> dict:
            total: dict = {}
            x = data.tensor_homotopy(word)
            while x:
                y = data.apply(data.perturbation, x)
                rest = {}
                for w, coeff in y.items():
                    if len(w) == 1:
                        axpy(total, coeff, data.pi.on_basis(w))
                    else:
                        add_into(rest, w, coeff)
                x = data.apply(data.tensor_homotopy, rest)
            return total

        bar_map = MultilinearMap(data.sA, data.sB, n, 0, rule=rule, name=f"sp{n}")
        maps[n] = from_bar(bar_map).with_name(f"p{n}")
    P = AInftyMorphism(A, B, maps, cutoff=up_to)
    if verify:
        report = check_cinfty_morphism(P, up_to) if A.is_dgca_like() else check_morphism(P, up_to)
        if not report.passed:
            raise ConstructionError(f"Transferred morphism {A.module.name} -> {B.module.name} fails", report)
    return P


def transfer_inclusion(
    source,
    c: Contraction,
    up_to: int | None = None,
    target: AInftyStructure | None = None,
    verify: bool = True,
) -> AInftyMorphism:
    """The ∞-morphism I with i₁ = c.i: f_n = H∘δ∘(H_T∘δ)^{n−2}∘ι^{⊗n} on words."""
    up_to = up_to if up_to is not None else get_settings().MAX_ARITY
    A = _as_ainfty(source, max(up_to, 2))
    B = target if target is not None else transfer_structure(source, c, up_to, verify=verify)
    data = _BarData(A, c)
    maps = {1: c.i}
    for n in range(2, up_to + 1):
        def rule(word: tuple, data=data, n=n) -> dict:
            total: dict = {}
            x = tensor_product_apply([data.iota] * n, {word: Fraction(1)})
            while x:
                y = data.apply(data.perturbation, x)
                rest = {}
                for w, coeff in y.items():
                    if len(w) == 1:
                        axpy(total, coeff, data.H.on_basis(w))
                    else:
                        add_into(rest, w, coeff)
                x = data.apply(data.tensor_homotopy, rest)
            return total

        bar_map = MultilinearMap(data.sB, data.sA, n, 0, rule=rule, name=f"si{n}")
        maps[n] = from_bar(bar_map).with_name(f"i{n}")
    inclusion = AInftyMorphism(B, A, maps, cutoff=up_to)
    if verify:
        report = check_morphism(inclusion, up_to)
        if not report.passed:
            raise ConstructionError(f"Transferred inclusion {B.module.name} -> {A.module.name} fails", report)
    return inclusion


def two_stage_agreement(
    source,
    outer: Contraction,
    inner: Contraction,
    up_to: int = 3,
    direct: Contraction | None = None,
) -> CheckReport:
    """Transfer Ω → C in one step versus Ω → D → C; compares every m_n, 2 ≤ n ≤ up_to."""
    if up_to > 3:
        raise ResourceBoundError(f"two_stage_agreement is capped at arity 3, got {up_to}")
    direct = direct if direct is not None else compose_contractions(outer, inner)
    one_step = transfer_structure(source, direct, up_to, verify=False)
    middle = transfer_structure(source, outer, up_to, verify=False)
    two_step = transfer_structure(middle, inner, up_to, verify=False)
    found = []
    for n in range(2, up_to + 1):
        diff = first_difference(one_step.m(n), two_step.m(n))
        if diff is not None:
            word, defect = diff
            found.append(violation(one_step.module, one_step.module, word, defect))
    return build_report("two-stage agreement", [2, up_to], found)
