"""
Cell decompositions of the interval Δ¹ = [0, 1] and the contractions between them.

Points 0 = x₀ < … < x_m = 1 cut the interval into edges e_j = [x_j, x_{j+1}].  The forms side
is always the single chart Ω(Δ¹) with coordinate t = t₁.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy import QQ

from cinfty.core import AlgebraError, ConstructionError, FiniteModule, MultilinearMap
from cinfty.forms import (
    R,
    T1,
    PolyForm,
    SimplexModel,
    SimplicialComplex,
    _evaluate,
    cochain_complex,
    monomial_forms,
    qq,
    simplex_name,
)
from cinfty.structures import ChainComplex, DgcaPresentation
from cinfty.transfer import Contraction, check_contraction, contraction_from_retraction

logger = logging.getLogger(__name__)


def _points(points: Sequence) -> tuple[Fraction, ...]:
    xs = tuple(Fraction(x) for x in points)
    if len(xs) < 2 or xs[0] != 0 or xs[-1] != 1 or any(a >= b for a, b in zip(xs, xs[1:])):
        raise AlgebraError(f"Points must increase strictly from 0 to 1, got {[str(x) for x in xs]}")
    return xs


def vertex_name(j: int) -> str:
    return simplex_name((j,))


def edge_name(j: int) -> str:
    return simplex_name((j, j + 1))


def lagrange_basis(points: Sequence[Fraction]) -> list:
    """Polynomials L_j with L_j(x_l) = δ_jl."""
    basis = []
    for j, xj in enumerate(points):
        f = R.one
        for l, xl in enumerate(points):
            if l != j:
                f = f * (T1 - qq(xl)) * qq(1 / (xj - xl))
        basis.append(f)
    return basis


def _antiderivative(f):
    """The primitive of f(t) vanishing at t = 0."""
    out = {}
    for monom, coeff in f.terms():
        key = (0, monom[1] + 1, 0)
        out[key] = out.get(key, QQ(0)) + coeff / (monom[1] + 1)
    return R.from_dict(out)


def _at(f, x: Fraction) -> Fraction:
    return _evaluate(f, {1: x})


def interval_integration(points: Sequence[Fraction], omega: PolyForm) -> dict:
    """Vertex values of the 0-form part, edge integrals of the 1-form part."""
    values = {}
    f0 = omega.terms.get((), R.zero)
    if f0:
        for j, x in enumerate(points):
            values[vertex_name(j)] = _at(f0, x)
    f1 = omega.terms.get((1,), R.zero)
    if f1:
        F = _antiderivative(f1)
        for j in range(len(points) - 1):
            values[edge_name(j)] = _at(F, points[j + 1]) - _at(F, points[j])
    return {k: v for k, v in values.items() if v}


@dataclass
class IntervalDecomposition:
    points: tuple[Fraction, ...]
    complex: ChainComplex
    contraction: Contraction


def interval_contraction(
    model: SimplexModel,
    points: Sequence = (0, 1),
    vertex_forms: Sequence | None = None,
    name: str | None = None,
    degree_bound: int | None = None,
) -> IntervalDecomposition:
    """Ω(Δ¹) → C*(decomposition): p integrates, i interpolates, h(ω) = ∫₀ᵗ (i p ω − ω).

    `vertex_forms` overrides the interpolating 0-forms φ_j (φ_j(x_l) = δ_jl); edges go to
    i(e_j*) = d(Σ_{v>j} φ_v).  The default is Lagrange interpolation, which is the Whitney
    inclusion for the single edge.
    """
    if model.dim != 1:
        raise AlgebraError("Interval decompositions live on Ω(Δ¹)")
    xs = _points(points)
    K = SimplicialComplex.path(len(xs) - 1)
    complex = cochain_complex(K)
    phis = list(vertex_forms) if vertex_forms is not None else lagrange_basis(xs)
    for j, phi in enumerate(phis):
        for l, x in enumerate(xs):
            if _at(phi, x) != (1 if j == l else 0):
                raise AlgebraError(f"Vertex form {j} does not interpolate at x_{l} = {x}")

    images = {vertex_name(j): PolyForm(1, {(): phi}) for j, phi in enumerate(phis)}
    for j in range(len(xs) - 1):
        tail = sum(phis[j + 1:], R.zero)
        images[edge_name(j)] = PolyForm(1, {(1,): tail.diff(T1)})

    def include(word):
        return images[word[0]].to_coeffs()

    def project(word):
        return interval_integration(xs, model.form(word[0]))

    def homotopy(word):
        omega = model.form(word[0])
        f1 = omega.terms.get((1,))
        if f1 is None:
            return {}
        ipw = PolyForm(1, {})
        for cell, value in interval_integration(xs, omega).items():
            ipw = ipw + images[cell].scale(value)
        g = ipw.terms.get((1,), R.zero) - f1
        return PolyForm(1, {(): _antiderivative(g)}).to_coeffs()

    forms = model.forms
    i = MultilinearMap(complex.module, forms, 1, 0, rule=include, name="i")
    p = MultilinearMap(forms, complex.module, 1, 0, rule=project, name="I")
    h = MultilinearMap(forms, forms, 1, -1, rule=homotopy, name="h")
    label = name or f"interval{len(xs) - 1}"
    c = Contraction(model.complex, complex, i, p, h, side_conditions=True, name=label)
    _verify(c, degree_bound)
    return IntervalDecomposition(xs, complex, c)


def skewed_interval_contraction(model: SimplexModel, degree_bound: int | None = None) -> Contraction:
    """A second valid contraction Ω(Δ¹) → C*(Δ¹), not built from the integration map.

    On 0-forms p(f) = I(f) + λ(f)·(v₀* + v₁*) with λ(f) = ∫₀¹ f − (f(0) + f(1))/2, which
    still satisfies p∘i = id; the homotopy absorbs λ(∫₀ᵗ ω) as a constant.
    """
    base = interval_contraction(model, (0, 1), name="skew")
    whitney_i = base.contraction.i
    module = base.complex.module

    def lam(f) -> Fraction:
        F = _antiderivative(f)
        return _at(F, Fraction(1)) - (_at(f, Fraction(0)) + _at(f, Fraction(1))) / 2

    def project(word):
        omega = model.form(word[0])
        values = interval_integration((Fraction(0), Fraction(1)), omega)
        f0 = omega.terms.get(())
        if f0 is not None:
            shift = lam(f0)
            for v in (vertex_name(0), vertex_name(1)):
                values[v] = values.get(v, Fraction(0)) + shift
        return {k: v for k, v in values.items() if v}

    def homotopy(word):
        omega = model.form(word[0])
        f1 = omega.terms.get((1,))
        if f1 is None:
            return {}
        out = PolyForm(1, {(): R.zero})
        for cell, value in project(word).items():
            out = out + PolyForm.from_coeffs(1, whitney_i.on_basis((cell,))).scale(value)
        g = out.terms.get((1,), R.zero) - f1
        primitive = _antiderivative(g) + R.one * qq(lam(_antiderivative(f1)))
        return PolyForm(1, {(): primitive}).to_coeffs()

    p = MultilinearMap(model.forms, module, 1, 0, rule=project, name="I'")
    h = MultilinearMap(model.forms, model.forms, 1, -1, rule=homotopy, name="h'")
    c = Contraction(model.complex, base.complex, whitney_i, p, h, side_conditions=False, name="skew")
    _verify(c, degree_bound)
    return c


def _verify(c: Contraction, degree_bound: int | None) -> None:
    report = check_contraction(c, basis=monomial_forms(1, degree_bound))
    if not report.passed:
        raise ConstructionError(f"{c.name} fails its identities", report)


# ---------------------------------------------------------------------------
# Refinement of cochains
# ---------------------------------------------------------------------------

@dataclass
class Subdivision:
    fine_points: tuple[Fraction, ...]
    coarse_points: tuple[Fraction, ...]
    fine: ChainComplex
    coarse: ChainComplex
    refinement: Contraction


def refine_cochains(fine_points: Sequence, coarse_points: Sequence) -> Subdivision:
    """C*(fine) → C*(coarse): p sums over subcells, i = I_fine∘i_coarse, h from the splitting."""
    fine_xs, coarse_xs = _points(fine_points), _points(coarse_points)
    if not set(coarse_xs) <= set(fine_xs):
        raise AlgebraError("The coarse points must be among the fine points")
    fine = cochain_complex(SimplicialComplex.path(len(fine_xs) - 1))
    coarse = cochain_complex(SimplicialComplex.path(len(coarse_xs) - 1))

    table_p: dict = {}
    for j, x in enumerate(fine_xs):
        if x in coarse_xs:
            table_p[(vertex_name(j),)] = {vertex_name(coarse_xs.index(x)): 1}
    for j in range(len(fine_xs) - 1):
        J = max(k for k, x in enumerate(coarse_xs[:-1]) if x <= fine_xs[j])
        table_p[(edge_name(j),)] = {edge_name(J): 1}

    table_i: dict = {}
    coarse_phis = lagrange_basis(coarse_xs)
    for j, phi in enumerate(coarse_phis):
        table_i[(vertex_name(j),)] = interval_integration(fine_xs, PolyForm(1, {(): phi}))
    for j in range(len(coarse_xs) - 1):
        tail = sum(coarse_phis[j + 1:], R.zero)
        table_i[(edge_name(j),)] = interval_integration(fine_xs, PolyForm(1, {(1,): tail.diff(T1)}))

    p = MultilinearMap(fine.module, coarse.module, 1, 0, table=table_p, name="p")
    i = MultilinearMap(coarse.module, fine.module, 1, 0, table=table_i, name="i")
    refinement = contraction_from_retraction(
        fine, coarse, i, p, name=f"refine{len(fine_xs) - 1}→{len(coarse_xs) - 1}"
    )
    return Subdivision(fine_xs, coarse_xs, fine, coarse, refinement)


def subdivide_interval(points: Sequence, edge: int, at=None) -> Subdivision:
    """Insert one point into edge `edge` (its midpoint by default) and refine."""
    coarse = _points(points)
    if not 0 <= edge < len(coarse) - 1:
        raise AlgebraError(f"Edge {edge} is not an edge of the decomposition {list(map(str, coarse))}")
    left, right = coarse[edge], coarse[edge + 1]
    x = Fraction(at) if at is not None else (left + right) / 2
    if not left < x < right:
        raise AlgebraError(f"{x} is not inside edge {edge} = [{left}, {right}]")
    fine = tuple(sorted(coarse + (x,)))
    return refine_cochains(fine, coarse)


# ---------------------------------------------------------------------------
# Collapse to a point
# ---------------------------------------------------------------------------

def point_dgca() -> DgcaPresentation:
    module = FiniteModule("Q", [("1", 0)])
    d = MultilinearMap(module, module, 1, 1, table={}, name="0")
    product = MultilinearMap(module, module, 2, 0, table={("1", "1"): {"1": 1}}, name="·")
    return DgcaPresentation(ChainComplex(module, d), product)


def cochains_to_point(cochains: ChainComplex, point: DgcaPresentation | None = None) -> Contraction:
    """Contraction of the cochains of a contractible complex onto Q.

    p averages the vertex values, i sends 1 to the unit cochain Σ v*.
    """
    point = point or point_dgca()
    module = cochains.module
    vertices = module.basis_of_degree(0)
    weight = Fraction(1, len(vertices))
    p = MultilinearMap(
        module, point.module, 1, 0, table={(v,): {"1": weight} for v in vertices}, name="avg"
    )
    i = MultilinearMap(point.module, module, 1, 0, table={("1",): {v: 1 for v in vertices}}, name="unit")
    return contraction_from_retraction(cochains, point.complex, i, p, name=f"{module.name}→Q")


# ---------------------------------------------------------------------------
# Subdivision of a 1-dimensional complex
# ---------------------------------------------------------------------------

@dataclass
class EdgeSubdivision:
    coarse: SimplicialComplex
    fine: SimplicialComplex
    new_vertex: int
    refinement: Contraction


def subdivide_complex(K: SimplicialComplex, edge: Sequence[int]) -> EdgeSubdivision:
    """Split the edge (a, b) of a 1-dimensional complex at a new vertex m.

    p keeps old vertices, kills m* and sends (a,m)* ↦ (a,b)*, (b,m)* ↦ −(a,b)*;
    i spreads a* and b* by ½m* and (a,b)* to ½((a,m)* − (b,m)*).
    """
    if K.dim != 1:
        raise AlgebraError(f"Only 1-dimensional complexes can be subdivided, {K.name} has dimension {K.dim}")
    a, b = sorted(edge)
    if (a, b) not in K:
        raise AlgebraError(f"({a}, {b}) is not an edge of {K.name}")
    m = max(K.vertices) + 1
    fine_K = SimplicialComplex(
        [s for s in K.simplices if s != (a, b)] + [(a, m), (b, m)], name=f"{K.name}+{m}"
    )
    coarse, fine = cochain_complex(K), cochain_complex(fine_K)
    split, left, right = simplex_name((a, b)), simplex_name((a, m)), simplex_name((b, m))
    half = Fraction(1, 2)

    table_p: dict = {}
    for s in fine_K.simplices:
        name = simplex_name(s)
        if name == left:
            table_p[(name,)] = {split: 1}
        elif name == right:
            table_p[(name,)] = {split: -1}
        elif m not in s:
            table_p[(name,)] = {name: 1}

    table_i: dict = {}
    for s in K.simplices:
        name = simplex_name(s)
        if name == split:
            table_i[(name,)] = {left: half, right: -half}
        elif s in ((a,), (b,)):
            table_i[(name,)] = {name: 1, simplex_name((m,)): half}
        else:
            table_i[(name,)] = {name: 1}

    p = MultilinearMap(fine.module, coarse.module, 1, 0, table=table_p, name="p")
    i = MultilinearMap(coarse.module, fine.module, 1, 0, table=table_i, name="i")
    refinement = contraction_from_retraction(fine, coarse, i, p, name=f"{fine_K.name}→{K.name}")
    return EdgeSubdivision(K, fine_K, m, refinement)
