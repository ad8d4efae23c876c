"""
Polynomial differential forms on standard simplices and on the circle, simplicial cochains,
Whitney forms and the Dupont contraction.

A form on Δᵏ (k ≤ 2) is written in the canonical coordinates t₁…t_k, with t₀ = 1 − Σ t_a and
dt₀ = −Σ dt_a eliminated.  Coefficients live in the sympy ring Q[u, t₁, t₂]; the extra variable
u is only used while computing the Dupont homotopy.
"""
from __future__ import annotations

import itertools
import json
import logging
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from sympy import QQ
from sympy.polys.rings import ring

from cinfty.config import get_settings
from cinfty.core import (
    AlgebraError,
    ConstructionError,
    FiniteModule,
    GradedModule,
    MultilinearMap,
    Vector,
    sign,
    to_scalar,
)
from cinfty.report import CheckReport, build_report, violation
from cinfty.structures import ChainComplex, DgcaPresentation
from cinfty.transfer import Contraction, check_contraction

logger = logging.getLogger(__name__)

MAX_DIM = 2
R, U, T1, T2 = ring("u,t1,t2", QQ)
T = (None, T1, T2)
ZERO_MONOM = (0,) * R.ngens


def qq(value) -> object:
    value = to_scalar(value)
    return QQ(value.numerator, value.denominator)


def _substitute(f, images: Mapping[int, object]):
    """Simultaneous substitution of ring generators (by index) with polynomials."""
    out = R.zero
    for monom, coeff in f.terms():
        term = R.one * coeff
        for idx, e in enumerate(monom):
            if e:
                term *= (images[idx] if idx in images else R.gens[idx]) ** e
        out += term
    return out


def _integrate_u(f):
    """∫₀¹ … du."""
    out: dict = {}
    for monom, coeff in f.terms():
        key = (0,) + tuple(monom[1:])
        out[key] = out.get(key, QQ(0)) + coeff / (monom[0] + 1)
    return R.from_dict(out)


def _evaluate(f, values: Mapping[int, Fraction]) -> Fraction:
    total = Fraction(0)
    for monom, coeff in f.terms():
        term = to_scalar(coeff)
        for idx, e in enumerate(monom):
            if e:
                term *= values.get(idx, Fraction(0)) ** e
        total += term
    return total


def _merge_sign(I: tuple, J: tuple) -> int:
    return sign(sum(1 for a in I for b in J if a > b))


# ---------------------------------------------------------------------------
# Polynomial forms
# ---------------------------------------------------------------------------

class PolyForm:
    """Σ_I f_I dt_I on Δᵏ; keys are ascending tuples of indices in 1..k."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[tuple, object] | None = None):
        if not 0 <= dim <= MAX_DIM:
            raise AlgebraError(f"Forms are supported on simplices of dimension ≤ {MAX_DIM}, got {dim}")
        self.dim = dim
        self.terms = {tuple(I): f for I, f in (terms or {}).items() if f}

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, dim: int) -> "PolyForm":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, value=1) -> "PolyForm":
        return cls(dim, {(): R.one * qq(value)})

    @classmethod
    def coordinate(cls, dim: int, vertex: int) -> "PolyForm":
        """The barycentric coordinate t_vertex."""
        if vertex == 0:
            return cls(dim, {(): R.one - sum((T[a] for a in range(1, dim + 1)), R.zero)})
        return cls(dim, {(): T[vertex]})

    @classmethod
    def differential_of_coordinate(cls, dim: int, vertex: int) -> "PolyForm":
        if vertex == 0:
            return cls(dim, {(a,): -R.one for a in range(1, dim + 1)})
        return cls(dim, {(vertex,): R.one})

    @classmethod
    def from_label(cls, dim: int, label: tuple) -> "PolyForm":
        dts, exps = label
        monom = (0,) + tuple(exps) + (0,) * (MAX_DIM - dim)
        return cls(dim, {tuple(dts): R.from_dict({monom: QQ(1)})})

    @classmethod
    def from_coeffs(cls, dim: int, coeffs: Mapping[tuple, Fraction]) -> "PolyForm":
        out = cls(dim)
        for label, c in coeffs.items():
            out = out + cls.from_label(dim, label).scale(c)
        return out

    # -- conversion -----------------------------------------------------------
    def to_coeffs(self) -> dict:
        out = {}
        for I, f in self.terms.items():
            for monom, coeff in f.terms():
                if monom[0] or any(monom[1 + self.dim:]):
                    raise AlgebraError(f"Form coefficient {f} uses variables outside Δ^{self.dim}")
                out[(I, tuple(monom[1:1 + self.dim]))] = to_scalar(coeff)
        return out

    # -- arithmetic -----------------------------------------------------------
    def _combine(self, other: "PolyForm", factor: int) -> "PolyForm":
        if self.dim != other.dim:
            raise AlgebraError(f"Forms on Δ^{self.dim} and Δ^{other.dim} cannot be combined")
        terms = dict(self.terms)
        for I, f in other.terms.items():
            terms[I] = terms.get(I, R.zero) + f * factor
        return PolyForm(self.dim, terms)

    def __add__(self, other: "PolyForm") -> "PolyForm":
        return self._combine(other, 1)

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self._combine(other, -1)

    def __neg__(self) -> "PolyForm":
        return self.scale(-1)

    def scale(self, c) -> "PolyForm":
        c = qq(c)
        return PolyForm(self.dim, {I: f * c for I, f in self.terms.items()})

    def times(self, g) -> "PolyForm":
        """Multiply by a polynomial (0-form) g."""
        return PolyForm(self.dim, {I: f * g for I, f in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PolyForm) and self.dim == other.dim and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.dim, tuple(sorted(self.to_coeffs().items()))))

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {len(I) for I in self.terms}

    def component(self, degree: int) -> "PolyForm":
        return PolyForm(self.dim, {I: f for I, f in self.terms.items() if len(I) == degree})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (dts, exps), c in sorted(self.to_coeffs().items(), key=lambda kv: (len(kv[0][0]), kv[0])):
            parts.append(f"{c.numerator}/{c.denominator} · {monomial_name(self.dim, (dts, exps))}")
        return " + ".join(parts)

    __repr__ = __str__


def wedge(omega: PolyForm, eta: PolyForm) -> PolyForm:
    if omega.dim != eta.dim:
        raise AlgebraError(f"Forms on Δ^{omega.dim} and Δ^{eta.dim} cannot be multiplied")
    terms: dict = {}
    for I, f in omega.terms.items():
        for J, g in eta.terms.items():
            if set(I) & set(J):
                continue
            K = tuple(sorted(I + J))
            terms[K] = terms.get(K, R.zero) + f * g * _merge_sign(I, J)
    return PolyForm(omega.dim, terms)


def d(omega: PolyForm) -> PolyForm:
    terms: dict = {}
    for I, f in omega.terms.items():
        for a in range(1, omega.dim + 1):
            if a in I:
                continue
            df = f.diff(T[a])
            if not df:
                continue
            K = tuple(sorted(I + (a,)))
            terms[K] = terms.get(K, R.zero) + df * sign(sum(1 for b in I if b < a))
    return PolyForm(omega.dim, terms)


def monomial_name(dim: int, label: tuple) -> str:
    dts, exps = label
    factors = [f"t{a}" if e == 1 else f"t{a}^{e}" for a, e in enumerate(exps, start=1) if e]
    if dts:
        factors.append("^".join(f"dt{a}" for a in dts))
    return "*".join(factors) if factors else "1"


# ---------------------------------------------------------------------------
# Faces and integration
# ---------------------------------------------------------------------------

def restrict(omega: PolyForm, face: Sequence[int]) -> PolyForm:
    """Pull back along the affine face inclusion Δ^m → Δᵏ given by ascending vertices."""
    face = tuple(face)
    m = len(face) - 1
    if list(face) != sorted(set(face)) or not face or face[-1] > omega.dim:
        raise AlgebraError(f"{face} is not a face of Δ^{omega.dim}")
    images = {}
    dt_images = {}
    for a in range(1, omega.dim + 1):
        if a in face[1:]:
            j = face.index(a)
            images[a] = T[j]
            dt_images[a] = PolyForm.differential_of_coordinate(m, j)
        elif a == face[0]:
            images[a] = R.one - sum((T[j] for j in range(1, m + 1)), R.zero)
            dt_images[a] = PolyForm.differential_of_coordinate(m, 0)
        else:
            images[a] = R.zero
            dt_images[a] = PolyForm.zero(m)
    out = PolyForm.zero(m)
    for I, f in omega.terms.items():
        piece = PolyForm.constant(m).times(_substitute(f, images))
        for a in I:
            piece = wedge(piece, dt_images[a])
        out = out + piece
    return out


def integrate_top(omega: PolyForm) -> Fraction:
    """∫_{Δᵏ} of the dt₁…dt_k component, via a₁!…a_k!/(k + Σa)!."""
    k = omega.dim
    f = omega.terms.get(tuple(range(1, k + 1)))
    if f is None:
        return Fraction(0)
    total = Fraction(0)
    for monom, coeff in f.terms():
        exps = monom[1:1 + k]
        num = 1
        for a in exps:
            num *= factorial(a)
        total += to_scalar(coeff) * Fraction(num, factorial(k + sum(exps)))
    return total


def integrate(omega: PolyForm, face: Sequence[int]) -> Fraction:
    """∫_σ ω for a face σ of Δᵏ; 0-forms are evaluated at the vertex."""
    m = len(face) - 1
    if any(deg != m for deg in omega.degrees()):
        raise AlgebraError(f"Cannot integrate a form of degrees {sorted(omega.degrees())} over a {m}-simplex")
    pulled = restrict(omega, face)
    if m == 0:
        f = pulled.terms.get((), R.zero)
        return to_scalar(dict(f).get(ZERO_MONOM, QQ(0)))
    return integrate_top(pulled)


def whitney(dim: int, face: Sequence[int]) -> PolyForm:
    """m!·Σ_j (−1)^j t_{i_j} dt_{i_0}…(omit j)…dt_{i_m}."""
    face = tuple(face)
    m = len(face) - 1
    out = PolyForm.zero(dim)
    for j, vertex in enumerate(face):
        term = PolyForm.coordinate(dim, vertex)
        for other in face[:j] + face[j + 1:]:
            term = wedge(term, PolyForm.differential_of_coordinate(dim, other))
        out = out + term.scale(sign(j))
    return out.scale(factorial(m))


# ---------------------------------------------------------------------------
# Dupont homotopy
# ---------------------------------------------------------------------------

def vertex_flow(omega: PolyForm, vertex: int) -> PolyForm:
    """∫₀¹ ι_{∂u} φ*ω du for the contraction φ(u, t) = u·t + (1 − u)·e_vertex."""
    k = omega.dim
    images = {a: U * T[a] + (R.one - U) * (1 if a == vertex else 0) for a in range(1, k + 1)}
    terms: dict = {}
    for I, f in omega.terms.items():
        p = len(I)
        if p == 0:
            continue
        g = _substitute(f, images) * U ** (p - 1)
        for pos, a in enumerate(I):
            shift = T[a] - (1 if a == vertex else 0)
            rest = I[:pos] + I[pos + 1:]
            terms[rest] = terms.get(rest, R.zero) + _integrate_u(g * shift) * sign(pos)
    return PolyForm(k, terms)


def dupont_operator(omega: PolyForm) -> PolyForm:
    """s = Σ_I whitney(I)·h^{i₀}…h^{i_m}; satisfies ds + sd = id − i∘I."""
    k = omega.dim
    out = PolyForm.zero(k)
    for m in range(0, k + 1):
        for face in itertools.combinations(range(k + 1), m + 1):
            inner = omega
            for vertex in reversed(face):
                inner = vertex_flow(inner, vertex)
                if inner.is_zero():
                    break
            if not inner.is_zero():
                out = out + wedge(whitney(k, face), inner)
    return out


def contraction_h(omega: PolyForm) -> PolyForm:
    """Degree −1 homotopy with d h + h d = i∘I − id."""
    return -dupont_operator(omega)


# ---------------------------------------------------------------------------
# Simplicial complexes and cochains
# ---------------------------------------------------------------------------

DIM_PREFIX = "vefg"


def simplex_name(simplex: Sequence[int]) -> str:
    return DIM_PREFIX[len(simplex) - 1] + "".join(str(v) for v in simplex)


class SimplicialComplex:
    def __init__(self, simplices: Iterable[Sequence[int]], name: str = "K"):
        closed = set()
        for s in simplices:
            s = tuple(sorted(s))
            if len(set(s)) != len(s):
                raise AlgebraError(f"Simplex {s} repeats a vertex")
            for r in range(1, len(s) + 1):
                closed.update(itertools.combinations(s, r))
        self.name = name
        self.simplices = sorted(closed, key=lambda s: (len(s), s))
        self.vertices = [s[0] for s in self.simplices if len(s) == 1]

    @property
    def dim(self) -> int:
        return max(len(s) for s in self.simplices) - 1

    def of_dim(self, k: int) -> list[tuple]:
        return [s for s in self.simplices if len(s) == k + 1]

    def maximal(self) -> list[tuple]:
        return [s for s in self.simplices if not any(set(s) < set(t) for t in self.simplices)]

    def __contains__(self, simplex) -> bool:
        return tuple(simplex) in set(self.simplices)

    @classmethod
    def standard(cls, k: int) -> "SimplicialComplex":
        return cls([tuple(range(k + 1))], name=f"Δ{k}")

    @classmethod
    def triangle_boundary(cls) -> "SimplicialComplex":
        return cls([(0, 1), (1, 2), (0, 2)], name="∂Δ2")

    @classmethod
    def path(cls, edges: int) -> "SimplicialComplex":
        return cls([(j, j + 1) for j in range(edges)], name=f"I{edges}")

    def to_json(self) -> dict:
        return {"vertices": self.vertices, "simplices": [list(s) for s in self.simplices]}

    @classmethod
    def from_json(cls, data: Mapping | str, name: str = "K") -> "SimplicialComplex":
        if isinstance(data, str):
            data = json.loads(data)
        complex = cls(data["simplices"], name=name)
        missing = set(data.get("vertices", [])) - set(complex.vertices)
        if missing:
            raise AlgebraError(f"Vertices {sorted(missing)} are not covered by the simplices")
        return complex


def cochain_module(K: SimplicialComplex) -> FiniteModule:
    return FiniteModule(f"C*({K.name})", [(simplex_name(s), len(s) - 1) for s in K.simplices])


def cochain_complex(K: SimplicialComplex) -> ChainComplex:
    """δσ* = Σ_τ (−1)^j τ*, σ the j-th face of τ."""
    module = cochain_module(K)
    table = {}
    for tau in K.simplices:
        for j in range(len(tau)):
            sigma = tau[:j] + tau[j + 1:]
            if not sigma:
                continue
            entry = table.setdefault((simplex_name(sigma),), {})
            entry[simplex_name(tau)] = entry.get(simplex_name(tau), 0) + sign(j)
    return ChainComplex(module, MultilinearMap(module, module, 1, 1, table=table, name="δ"))


def cup_product(K: SimplicialComplex, module: FiniteModule | None = None) -> MultilinearMap:
    """Alexander–Whitney product: (α∪β)(v₀…v_{p+q}) = α(v₀…v_p)·β(v_p…v_{p+q})."""
    module = module or cochain_module(K)
    table = {}
    for sigma in K.simplices:
        for split in range(len(sigma)):
            front, back = sigma[:split + 1], sigma[split:]
            table[(simplex_name(front), simplex_name(back))] = {simplex_name(sigma): 1}
    return MultilinearMap(module, module, 2, 0, table=table, name="∪")


def cochain_algebra(K: SimplicialComplex) -> DgcaPresentation:
    """Cochains with the cup product (associative, not graded commutative)."""
    complex = cochain_complex(K)
    return DgcaPresentation(complex, cup_product(K, complex.module))


# ---------------------------------------------------------------------------
# Forms on complexes (chartwise)
# ---------------------------------------------------------------------------

def whitney_on_complex(K: SimplicialComplex, sigma: Sequence[int]) -> dict[tuple, PolyForm]:
    """Whitney form of σ as one PolyForm per maximal simplex, in local barycentric coordinates."""
    sigma = tuple(sigma)
    out = {}
    for chart in K.maximal():
        dim = len(chart) - 1
        if set(sigma) <= set(chart):
            out[chart] = whitney(dim, [chart.index(v) for v in sigma])
        else:
            out[chart] = PolyForm.zero(dim)
    return out


def integrate_on_complex(K: SimplicialComplex, form: Mapping[tuple, PolyForm], sigma: Sequence[int]) -> Fraction:
    sigma = tuple(sigma)
    for chart in K.maximal():
        if set(sigma) <= set(chart):
            return integrate(form[chart], [chart.index(v) for v in sigma])
    raise AlgebraError(f"{sigma} is not a simplex of {K.name}")


def check_whitney_duality(K: SimplicialComplex) -> CheckReport:
    """∫_τ whitney(σ) = δ_{στ} for all simplices of equal dimension."""
    module = cochain_module(K)
    found = []
    for sigma in K.simplices:
        form = whitney_on_complex(K, sigma)
        values = {
            simplex_name(tau): integrate_on_complex(K, form, tau) for tau in K.of_dim(len(sigma) - 1)
        }
        defect = {name: v - (1 if name == simplex_name(sigma) else 0) for name, v in values.items()}
        defect = {k: v for k, v in defect.items() if v}
        if defect:
            found.append(violation(module, module, [simplex_name(sigma)], defect))
    return build_report(f"I∘whitney = id on {K.name}", [1, 1], found)


# ---------------------------------------------------------------------------
# The forms dgca on Δᵏ
# ---------------------------------------------------------------------------

def _valid_label(dim: int, label) -> bool:
    try:
        dts, exps = label
    except (TypeError, ValueError):
        return False
    return (
        isinstance(dts, tuple)
        and isinstance(exps, tuple)
        and len(exps) == dim
        and all(isinstance(e, int) and e >= 0 for e in exps)
        and list(dts) == sorted(set(dts))
        and all(1 <= a <= dim for a in dts)
    )


def monomial_forms(dim: int, degree_bound: int | None = None) -> list[tuple]:
    """All monomial labels t^a dt_I with |a| + |I| ≤ degree_bound."""
    degree_bound = degree_bound if degree_bound is not None else get_settings().DEGREE_BOUND
    labels = []
    for r in range(dim + 1):
        for dts in itertools.combinations(range(1, dim + 1), r):
            for exps in itertools.product(range(degree_bound + 1), repeat=dim):
                if sum(exps) + r <= degree_bound:
                    labels.append((dts, exps))
    return sorted(labels, key=lambda l: (len(l[0]), sum(l[1]), l))


DEFAULT_EVAL_FORMS = {
    1: ["1", "t1", "t1^2", "dt1", "t1*dt1"],
    2: ["1", "t1", "t1*t2", "dt1", "t2*dt1", "dt1^dt2"],
}


def parse_monomial(dim: int, text: str) -> tuple:
    exps = [0] * dim
    dts: tuple = ()
    if text != "1":
        for factor in text.split("*"):
            if factor.startswith("dt"):
                dts = tuple(int(piece[2:]) for piece in factor.split("^"))
            else:
                base, _, power = factor.partition("^")
                exps[int(base[1:]) - 1] += int(power or 1)
    label = (dts, tuple(exps))
    if not _valid_label(dim, label):
        raise AlgebraError(f"{text!r} is not a monomial form on Δ^{dim}")
    return label


class FormsModule(GradedModule):
    """Polynomial forms on Δᵏ; `basis` is the finite evaluation set used by the checkers."""

    def __init__(self, dim: int, eval_basis: Sequence[tuple] | None = None):
        self.dim = dim
        self.name = f"Ω(Δ{dim})"
        if eval_basis is None:
            eval_basis = [parse_monomial(dim, text) for text in DEFAULT_EVAL_FORMS[dim]]
        for label in eval_basis:
            if not _valid_label(dim, label):
                raise AlgebraError(f"{label!r} is not a monomial form on Δ^{dim}")
        self._basis = tuple(eval_basis)

    def degree(self, label) -> int:
        if not _valid_label(self.dim, label):
            raise AlgebraError(f"{label!r} is not a monomial form on Δ^{self.dim}")
        return len(label[0])

    def __contains__(self, label) -> bool:
        return _valid_label(self.dim, label)

    @property
    def basis(self) -> tuple:
        return self._basis

    @property
    def is_finite(self) -> bool:
        return False

    def label_name(self, label) -> str:
        return monomial_name(self.dim, label)

    def to_json(self) -> dict:
        return {"name": self.name, "evaluation_basis": [self.label_name(b) for b in self._basis]}


class SimplexModel:
    """Forms on Δᵏ together with its cochains, the integration map and the Whitney inclusion."""

    def __init__(self, dim: int, eval_basis: Sequence[tuple] | None = None):
        self.dim = dim
        self.simplicial = SimplicialComplex.standard(dim)
        self.forms = FormsModule(dim, eval_basis)
        self.cochains = cochain_complex(self.simplicial)
        self._by_name = {simplex_name(s): s for s in self.simplicial.simplices}
        self.d = MultilinearMap(
            self.forms, self.forms, 1, 1, rule=lambda w: d(self.form(w[0])).to_coeffs(), name="d"
        )
        self.product = MultilinearMap(
            self.forms,
            self.forms,
            2,
            0,
            rule=lambda w: wedge(self.form(w[0]), self.form(w[1])).to_coeffs(),
            name="∧",
        )
        self.complex = ChainComplex(self.forms, self.d)
        self.dgca = DgcaPresentation(self.complex, self.product)

    def form(self, label) -> PolyForm:
        return PolyForm.from_label(self.dim, label)

    def vector(self, omega: PolyForm) -> Vector:
        return Vector(self.forms, omega.to_coeffs())

    def simplex(self, name: str) -> tuple:
        return self._by_name[name]

    def integration_map(self, omega: PolyForm) -> Vector:
        """I(ω)(σ) = ∫_σ ω over every simplex of matching dimension."""
        values = {}
        for degree in omega.degrees():
            piece = omega.component(degree)
            for sigma in self.simplicial.of_dim(degree):
                values[simplex_name(sigma)] = integrate(piece, sigma)
        return Vector(self.cochains.module, values)

    def integration_operator(self) -> MultilinearMap:
        return MultilinearMap(
            self.forms,
            self.cochains.module,
            1,
            0,
            rule=lambda w: self.integration_map(self.form(w[0])).coeffs,
            name="I",
        )

    def whitney(self, name: str) -> PolyForm:
        return whitney(self.dim, self.simplex(name))

    def whitney_operator(self) -> MultilinearMap:
        return MultilinearMap(
            self.cochains.module,
            self.forms,
            1,
            0,
            rule=lambda w: self.whitney(w[0]).to_coeffs(),
            name="W",
        )

    def homotopy_operator(self) -> MultilinearMap:
        return MultilinearMap(
            self.forms, self.forms, 1, -1, rule=lambda w: contraction_h(self.form(w[0])).to_coeffs(), name="h"
        )

    def monomial_basis(self, degree_bound: int | None = None) -> list[tuple]:
        return monomial_forms(self.dim, degree_bound)

    def contraction(self, degree_bound: int | None = None) -> Contraction:
        """Whitney/Dupont contraction of Ω(Δᵏ) onto C*(Δᵏ), verified on monomial forms."""
        c = Contraction(
            self.complex,
            self.cochains,
            self.whitney_operator(),
            self.integration_operator(),
            self.homotopy_operator(),
            side_conditions=True,
            name=f"dupont{self.dim}",
        )
        report = check_contraction(c, basis=self.monomial_basis(degree_bound))
        if not report.passed:
            raise ConstructionError(f"Dupont contraction on Δ{self.dim} fails its identities", report)
        logger.debug("Dupont contraction on Δ%d verified", self.dim)
        return c

    def __repr__(self) -> str:
        return f"SimplexModel(Δ{self.dim})"


# ---------------------------------------------------------------------------
# Glued forms on the circle
# ---------------------------------------------------------------------------

CIRCLE_EVAL_FORMS = [
    ("v", "v0", 0),
    ("v", "v1", 0),
    ("b", "e01", 0),
    ("b", "e12", 1),
    ("w", "e01", 0),
    ("w", "e02", 1),
]


class GluedFormsModule(GradedModule):
    """Polynomial forms on a graph, continuous at the vertices.

    ("v", vertex, 0) is the hat function of a vertex; ("b", edge, k) the bubble t(1 − t)tᵏ and
    ("w", edge, k) the 1-form tᵏdt, both supported on one edge with t its local coordinate.
    """

    KINDS = {"v": 0, "b": 0, "w": 1}

    def __init__(self, K: SimplicialComplex, eval_basis: Sequence[tuple]):
        if K.dim != 1:
            raise AlgebraError(f"Glued forms live on graphs, {K.name} has dimension {K.dim}")
        self.name = f"Ω({K.name})"
        self._vertices = {simplex_name(s) for s in K.of_dim(0)}
        self._edges = {simplex_name(s) for s in K.of_dim(1)}
        for label in eval_basis:
            if label not in self:
                raise AlgebraError(f"{label!r} is not a glued form on {K.name}")
        self._basis = tuple(eval_basis)

    def __contains__(self, label) -> bool:
        if not (isinstance(label, tuple) and len(label) == 3):
            return False
        kind, where, k = label
        if not isinstance(k, int) or k < 0:
            return False
        if kind == "v":
            return where in self._vertices and k == 0
        return kind in ("b", "w") and where in self._edges

    def degree(self, label) -> int:
        if label not in self:
            raise AlgebraError(f"{label!r} is not a glued form on {self.name}")
        return self.KINDS[label[0]]

    @property
    def basis(self) -> tuple:
        return self._basis

    @property
    def is_finite(self) -> bool:
        return False

    def label_name(self, label) -> str:
        kind, where, k = label
        power = {0: "", 1: "t*"}.get(k, f"t^{k}*")
        if kind == "v":
            return f"hat({where})"
        if kind == "b":
            return f"{power}t(1-t)@{where}"
        return f"{power}dt@{where}"

    def to_json(self) -> dict:
        return {"name": self.name, "evaluation_basis": [self.label_name(b) for b in self._basis]}


class CircleModel:
    """Forms on ∂Δ², one PolyForm per edge agreeing at the vertices, with the edgewise Dupont homotopy.

    The homotopy of a 1-form integrates to zero at both ends of its edge, so the edgewise
    homotopies glue.
    """

    dim = 1

    def __init__(self, eval_basis: Sequence[tuple] | None = None):
        self.simplicial = SimplicialComplex.triangle_boundary()
        self.charts = self.simplicial.maximal()
        self.forms = GluedFormsModule(self.simplicial, eval_basis or CIRCLE_EVAL_FORMS)
        self.cochains = cochain_complex(self.simplicial)
        self._by_name = {simplex_name(s): s for s in self.simplicial.simplices}
        self.d = MultilinearMap(
            self.forms, self.forms, 1, 1, rule=lambda w: self.decompose(self._edgewise(d, self.form(w[0]))), name="d"
        )
        self.product = MultilinearMap(
            self.forms,
            self.forms,
            2,
            0,
            rule=lambda w: self.decompose(self._wedge(self.form(w[0]), self.form(w[1]))),
            name="∧",
        )
        self.complex = ChainComplex(self.forms, self.d)
        self.dgca = DgcaPresentation(self.complex, self.product)

    def simplex(self, name: str) -> tuple:
        return self._by_name[name]

    def _edgewise(self, op, form: Mapping[tuple, PolyForm]) -> dict[tuple, PolyForm]:
        return {chart: op(piece) for chart, piece in form.items()}

    def _wedge(self, a: Mapping[tuple, PolyForm], b: Mapping[tuple, PolyForm]) -> dict[tuple, PolyForm]:
        return {chart: wedge(a[chart], b[chart]) for chart in self.charts}

    def form(self, label) -> dict[tuple, PolyForm]:
        """The chartwise form of a basis label, charts in the order of `self.charts`."""
        if label not in self.forms:
            raise AlgebraError(f"{label!r} is not a glued form on {self.simplicial.name}")
        kind, where, k = label
        if kind == "v":
            return whitney_on_complex(self.simplicial, self.simplex(where))
        if kind == "b":
            local = PolyForm.constant(1).times(T1 * (R.one - T1) * T1 ** k)
        else:
            local = PolyForm.from_label(1, ((1,), (k,)))
        edge = self.simplex(where)
        return {chart: local if chart == edge else PolyForm.zero(1) for chart in self.charts}

    def decompose(self, form: Mapping[tuple, PolyForm]) -> dict:
        """Coordinates of a chartwise form in the glued basis."""
        values: dict[int, Fraction] = {}
        for chart in self.charts:
            zero_part = form[chart].component(0)
            for index, vertex in enumerate(chart):
                value = integrate(zero_part, [index])
                if values.setdefault(vertex, value) != value:
                    raise AlgebraError(f"Form jumps at vertex {vertex}: {values[vertex]} ≠ {value}")
        coeffs = {("v", simplex_name((v,)), 0): value for v, value in values.items() if value}
        for chart in self.charts:
            edge = simplex_name(chart)
            rest = (
                form[chart].component(0)
                - PolyForm.coordinate(1, 0).scale(values[chart[0]])
                - PolyForm.coordinate(1, 1).scale(values[chart[1]])
            )
            # rest vanishes at both ends: rest = t(1 − t)·q with q_k = g_1 + … + g_{k+1}
            g = {exps[0]: c for (_, exps), c in rest.to_coeffs().items()}
            running = Fraction(0)
            for k in range(max(g, default=0) - 1):
                running += g.get(k + 1, Fraction(0))
                if running:
                    coeffs[("b", edge, k)] = running
            for (_, exps), c in form[chart].component(1).to_coeffs().items():
                coeffs[("w", edge, exps[0])] = c
        return coeffs

    def integration_map(self, form: Mapping[tuple, PolyForm]) -> Vector:
        values = {}
        for sigma in self.simplicial.simplices:
            piece = {chart: f.component(len(sigma) - 1) for chart, f in form.items()}
            values[simplex_name(sigma)] = integrate_on_complex(self.simplicial, piece, sigma)
        return Vector(self.cochains.module, {k: v for k, v in values.items() if v})

    def integration_operator(self) -> MultilinearMap:
        return MultilinearMap(
            self.forms,
            self.cochains.module,
            1,
            0,
            rule=lambda w: self.integration_map(self.form(w[0])).coeffs,
            name="I",
        )

    def whitney_operator(self) -> MultilinearMap:
        return MultilinearMap(
            self.cochains.module,
            self.forms,
            1,
            0,
            rule=lambda w: self.decompose(whitney_on_complex(self.simplicial, self.simplex(w[0]))),
            name="W",
        )

    def homotopy_operator(self) -> MultilinearMap:
        return MultilinearMap(
            self.forms,
            self.forms,
            1,
            -1,
            rule=lambda w: self.decompose(self._edgewise(contraction_h, self.form(w[0]))),
            name="h",
        )

    def monomial_basis(self, degree_bound: int | None = None) -> list[tuple]:
        """Every hat, and the bubbles and 1-forms of total degree ≤ degree_bound on each edge."""
        degree_bound = degree_bound if degree_bound is not None else get_settings().DEGREE_BOUND
        labels = [("v", simplex_name(v), 0) for v in self.simplicial.of_dim(0)]
        for edge in self.simplicial.of_dim(1):
            labels += [("b", simplex_name(edge), k) for k in range(degree_bound - 1)]
            labels += [("w", simplex_name(edge), k) for k in range(degree_bound)]
        return labels

    def contraction(self, degree_bound: int | None = None) -> Contraction:
        """Glued Whitney/Dupont contraction of Ω(∂Δ²) onto C*(∂Δ²), verified on the monomial basis."""
        c = Contraction(
            self.complex,
            self.cochains,
            self.whitney_operator(),
            self.integration_operator(),
            self.homotopy_operator(),
            side_conditions=True,
            name="dupont∂Δ2",
        )
        report = check_contraction(c, basis=self.monomial_basis(degree_bound))
        if not report.passed:
            raise ConstructionError("Glued Dupont contraction on ∂Δ2 fails its identities", report)
        logger.debug("glued Dupont contraction on ∂Δ2 verified")
        return c

    def __repr__(self) -> str:
        return "CircleModel(∂Δ2)"
