"""
Exact scalars, graded modules and Koszul-signed multilinear maps.

Everything in the package is built on top of three ideas:

* scalars are `fractions.Fraction` (exact, always in lowest terms);
* a module element is a sparse mapping ``label -> Fraction``;
* a multilinear map is identified with its values on tuples of basis labels.

Signs only ever enter through `koszul_sign`, `tensor_product_apply` and `compose_at`.
"""
from __future__ import annotations

import itertools
import json
import logging
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

logger = logging.getLogger(__name__)

Scalar = Fraction
Label = Hashable
Tensor = dict  # tuple[Label, ...] -> Fraction


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class AlgebraError(ValueError):
    """Signature or argument mismatch."""


class ResourceBoundError(AlgebraError):
    """A configured size bound was exceeded."""


class UnsupportedFixture(AlgebraError):
    """The fixture does not carry the structure a suite or an export asks for."""


class ConstructionError(RuntimeError):
    """A construction failed its own post-check."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class VerificationError(ConstructionError):
    """A defining identity has a nonzero defect."""

    def __init__(self, message: str, defect: Any = None, witness: Any = None):
        super().__init__(message, report=defect)
        self.defect = defect
        self.witness = witness


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------

def to_scalar(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    if hasattr(value, "p") and hasattr(value, "q"):
        # sympy.Rational
        return Fraction(int(value.p), int(value.q))
    # sympy QQ domain elements (PythonMPQ / gmpy mpq)
    return Fraction(int(value.numerator), int(value.denominator))


def format_scalar(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


# ---------------------------------------------------------------------------
# Graded modules
# ---------------------------------------------------------------------------

class GradedModule:
    """Cohomologically graded vector space over Q with labelled basis."""

    name: str = "module"

    def degree(self, label: Label) -> int:
        raise NotImplementedError

    def __contains__(self, label: Label) -> bool:
        raise NotImplementedError

    @property
    def basis(self) -> tuple:
        """Finite enumeration basis (the whole basis for finite modules)."""
        raise NotImplementedError

    @property
    def is_finite(self) -> bool:
        return True

    def label_name(self, label: Label) -> str:
        return str(label)

    def basis_of_degree(self, degree: int) -> tuple:
        return tuple(b for b in self.basis if self.degree(b) == degree)

    def zero(self) -> "Vector":
        return Vector(self, {})

    def element(self, coeffs: Mapping[Label, Any]) -> "Vector":
        return Vector(self, coeffs)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class FiniteModule(GradedModule):
    """Finite-dimensional graded module with a named basis."""

    def __init__(self, name: str, basis: Iterable[tuple[str, int]]):
        self.name = name
        entries = [(str(n), int(d)) for n, d in basis]
        names = [n for n, _ in entries]
        if len(set(names)) != len(names):
            raise AlgebraError(f"Duplicate basis names in module {name}: {sorted(names)}")
        self._degrees = dict(entries)
        self._basis = tuple(names)

    def degree(self, label: Label) -> int:
        try:
            return self._degrees[label]
        except KeyError:
            raise AlgebraError(f"{label!r} is not a basis element of {self.name}") from None

    def __contains__(self, label: Label) -> bool:
        return label in self._degrees

    @property
    def basis(self) -> tuple:
        return self._basis

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FiniteModule)
            and self.name == other.name
            and self._basis == other._basis
            and self._degrees == other._degrees
        )

    def __hash__(self) -> int:
        return hash((self.name, self._basis))

    def to_json(self) -> dict:
        return {"name": self.name, "basis": [{"name": b, "degree": self._degrees[b]} for b in self._basis]}

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteModule":
        return cls(data["name"], [(b["name"], b["degree"]) for b in data["basis"]])


class ShiftedModule(GradedModule):
    """The suspension sA: same labels, degrees lowered by `shift`."""

    def __init__(self, base: GradedModule, shift: int = 1):
        self.base = base
        self.shift = shift
        self.name = f"s{base.name}" if shift == 1 else f"s^{shift}{base.name}"

    def degree(self, label: Label) -> int:
        return self.base.degree(label) - self.shift

    def __contains__(self, label: Label) -> bool:
        return label in self.base

    @property
    def basis(self) -> tuple:
        return self.base.basis

    @property
    def is_finite(self) -> bool:
        return self.base.is_finite

    def label_name(self, label: Label) -> str:
        return self.base.label_name(label)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ShiftedModule) and other.base == self.base and other.shift == self.shift

    def __hash__(self) -> int:
        return hash(("shift", self.shift, self.base))


def same_module(a: GradedModule, b: GradedModule) -> bool:
    return a is b or a == b


# ---------------------------------------------------------------------------
# Vectors and tensors
# ---------------------------------------------------------------------------

def clean(coeffs: Mapping[Label, Any]) -> dict:
    return {k: to_scalar(v) for k, v in coeffs.items() if v != 0}


def add_into(acc: dict, key: Label, value: Fraction) -> None:
    if value == 0:
        return
    total = acc.get(key, 0) + value
    if total == 0:
        acc.pop(key, None)
    else:
        acc[key] = total


def axpy(acc: dict, scale: Fraction, other: Mapping) -> dict:
    """acc += scale * other, in place."""
    if scale == 0:
        return acc
    for key, value in other.items():
        add_into(acc, key, scale * value)
    return acc


class Vector:
    """Sparse element of a graded module."""

    __slots__ = ("module", "coeffs")

    def __init__(self, module: GradedModule, coeffs: Mapping[Label, Any]):
        self.module = module
        self.coeffs = clean(coeffs)
        for label in self.coeffs:
            if label not in module:
                raise AlgebraError(f"{label!r} is not a basis element of {module.name}")

    def __add__(self, other: "Vector") -> "Vector":
        self._check(other)
        return Vector(self.module, axpy(dict(self.coeffs), Fraction(1), other.coeffs))

    def __sub__(self, other: "Vector") -> "Vector":
        self._check(other)
        return Vector(self.module, axpy(dict(self.coeffs), Fraction(-1), other.coeffs))

    def __neg__(self) -> "Vector":
        return self.scale(-1)

    def scale(self, factor: Any) -> "Vector":
        factor = to_scalar(factor)
        return Vector(self.module, {k: factor * v for k, v in self.coeffs.items()})

    def __rmul__(self, factor: Any) -> "Vector":
        return self.scale(factor)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vector) and same_module(self.module, other.module) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(tuple(sorted((str(k), v) for k, v in self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def degrees(self) -> set[int]:
        return {self.module.degree(k) for k in self.coeffs}

    def homogeneous_degree(self) -> int | None:
        """Degree of a homogeneous vector; None for zero, error for mixed degrees."""
        degrees = self.degrees()
        if not degrees:
            return None
        if len(degrees) > 1:
            raise AlgebraError(f"Vector is not homogeneous: degrees {sorted(degrees)}")
        return degrees.pop()

    def _check(self, other: "Vector") -> None:
        if not same_module(self.module, other.module):
            raise AlgebraError(f"Module mismatch: {self.module.name} vs {other.module.name}")

    def to_json(self) -> list:
        return [
            {"name": self.module.label_name(k), "coeff": format_scalar(v)}
            for k, v in sorted(self.coeffs.items(), key=lambda kv: self.module.label_name(kv[0]))
        ]

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"{format_scalar(v)}*{self.module.label_name(k)}" for k, v in self.coeffs.items())


def tensor_of(vectors: Sequence[Vector]) -> Tensor:
    """Expand v₁⊗…⊗v_k into a tensor of basis words (no signs: no maps are moved)."""
    result: Tensor = {(): Fraction(1)}
    for vector in vectors:
        nxt: Tensor = {}
        for word, c in result.items():
            for label, v in vector.coeffs.items():
                add_into(nxt, word + (label,), c * v)
        result = nxt
    return result


# ---------------------------------------------------------------------------
# Koszul signs
# ---------------------------------------------------------------------------

def koszul_sign(permutation: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of moving element i to position permutation[i] (1-based), graded by `degrees`."""
    if len(permutation) != len(degrees):
        raise AlgebraError(f"Permutation of length {len(permutation)} but {len(degrees)} degrees")
    k = len(permutation)
    if sorted(permutation) != list(range(1, k + 1)):
        raise AlgebraError(f"{list(permutation)} is not a permutation of 1..{k}")
    exponent = 0
    for i in range(k):
        for j in range(i + 1, k):
            if permutation[i] > permutation[j]:
                exponent += degrees[i] * degrees[j]
    return sign(exponent)


def permute_word(word: Sequence, permutation: Sequence[int]) -> tuple:
    """Place word[i] at position permutation[i] (1-based)."""
    out = [None] * len(word)
    for i, target in enumerate(permutation):
        out[target - 1] = word[i]
    return tuple(out)


def sort_sign(order: Sequence[int], degrees: Sequence[int]) -> int:
    """Koszul sign of rearranging inputs 1..n into the listed `order` (a sequence of input indices)."""
    permutation = [0] * len(order)
    for position, index in enumerate(order, start=1):
        permutation[index - 1] = position
    return koszul_sign(permutation, degrees)


# ---------------------------------------------------------------------------
# Multilinear maps
# ---------------------------------------------------------------------------

Rule = Callable[[tuple], Mapping]


class MultilinearMap:
    """Arity-k, degree-d map source^{⊗k} -> target, stored on basis tuples.

    Either `table` gives the values (missing keys are zero) or `rule` computes them lazily;
    lazily computed values are cached.
    """

    def __init__(
        self,
        source: GradedModule,
        target: GradedModule,
        arity: int,
        degree: int,
        table: Mapping[tuple, Mapping] | None = None,
        rule: Rule | None = None,
        name: str = "f",
    ):
        if arity < 1:
            raise AlgebraError(f"Arity must be positive, got {arity}")
        self.source = source
        self.target = target
        self.arity = arity
        self.degree = degree
        self.name = name
        self._rule = rule
        self._cache: dict[tuple, dict] = {}
        if table is not None:
            for key, value in table.items():
                key = tuple(key)
                if len(key) != arity:
                    raise AlgebraError(f"{name}: entry {key} has wrong arity (expected {arity})")
                image = clean(value.coeffs if isinstance(value, Vector) else value)
                self._check_image(key, image)
                if image:
                    self._cache[key] = image
            if rule is None:
                self._rule = lambda word: {}

    # -- evaluation -------------------------------------------------------
    def _check_image(self, word: tuple, image: Mapping) -> None:
        expected = sum(self.source.degree(x) for x in word) + self.degree
        for label in image:
            if label not in self.target:
                raise AlgebraError(f"{self.name}{word}: {label!r} not in {self.target.name}")
            if self.target.degree(label) != expected:
                raise AlgebraError(
                    f"{self.name}{word}: image {label!r} has degree {self.target.degree(label)}, expected {expected}"
                )

    def on_basis(self, word: tuple) -> dict:
        word = tuple(word)
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        if len(word) != self.arity:
            raise AlgebraError(f"{self.name} has arity {self.arity}, got {len(word)} inputs")
        image = clean(self._rule(word))
        self._cache[word] = image
        return image

    def apply_tensor(self, tensor: Mapping[tuple, Fraction]) -> dict:
        out: dict = {}
        for word, c in tensor.items():
            axpy(out, c, self.on_basis(word))
        return out

    def __call__(self, *vectors: Vector) -> Vector:
        if len(vectors) != self.arity:
            raise AlgebraError(f"{self.name} has arity {self.arity}, got {len(vectors)} inputs")
        for v in vectors:
            if not same_module(v.module, self.source):
                raise AlgebraError(f"{self.name}: input from {v.module.name}, expected {self.source.name}")
        return Vector(self.target, self.apply_tensor(tensor_of(vectors)))

    # -- domain -----------------------------------------------------------
    def domain(self, basis: Sequence | None = None) -> Iterator[tuple]:
        return itertools.product(basis if basis is not None else self.source.basis, repeat=self.arity)

    def entries(self, basis: Sequence | None = None) -> Iterator[tuple[tuple, dict]]:
        for word in self.domain(basis):
            image = self.on_basis(word)
            if image:
                yield word, image

    def is_zero(self, basis: Sequence | None = None) -> bool:
        return next(self.entries(basis), None) is None

    def signature(self) -> tuple:
        return (self.arity, self.degree)

    def with_name(self, name: str) -> "MultilinearMap":
        return MultilinearMap(self.source, self.target, self.arity, self.degree, rule=self.on_basis, name=name)

    def __repr__(self) -> str:
        return f"MultilinearMap({self.name}: {self.source.name}^{self.arity} -> {self.target.name}, deg {self.degree})"

    # -- serialization ----------------------------------------------------
    def to_json(self, basis: Sequence | None = None) -> dict:
        label = self.source.label_name
        entries = []
        for word, image in self.entries(basis):
            entries.append(
                {
                    "inputs": [label(x) for x in word],
                    "output": Vector(self.target, image).to_json(),
                }
            )
        entries.sort(key=lambda e: e["inputs"])
        return {
            "source": self.source.name,
            "target": self.target.name,
            "arity": self.arity,
            "degree": self.degree,
            "entries": entries,
        }

    @classmethod
    def from_json(cls, data: Mapping, source: FiniteModule, target: FiniteModule) -> "MultilinearMap":
        table = {
            tuple(e["inputs"]): {o["name"]: Fraction(o["coeff"]) for o in e["output"]}
            for e in data["entries"]
        }
        return cls(source, target, data["arity"], data["degree"], table=table)


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Map algebra
# ---------------------------------------------------------------------------

def identity_map(module: GradedModule) -> MultilinearMap:
    return MultilinearMap(module, module, 1, 0, rule=lambda w: {w[0]: Fraction(1)}, name="id")


def zero_map(source: GradedModule, target: GradedModule, arity: int, degree: int) -> MultilinearMap:
    return MultilinearMap(source, target, arity, degree, rule=lambda w: {}, name="0")


def _check_signature(f: MultilinearMap, g: MultilinearMap) -> None:
    if not (same_module(f.source, g.source) and same_module(f.target, g.target)) or f.signature() != g.signature():
        raise AlgebraError(f"Signature mismatch: {f!r} vs {g!r}")


def map_add(f: MultilinearMap, g: MultilinearMap) -> MultilinearMap:
    return map_linear_combination([(1, f), (1, g)])


def map_sub(f: MultilinearMap, g: MultilinearMap) -> MultilinearMap:
    return map_linear_combination([(1, f), (-1, g)])


def map_scale(c: Any, f: MultilinearMap) -> MultilinearMap:
    return map_linear_combination([(c, f)])


def map_linear_combination(terms: Sequence[tuple[Any, MultilinearMap]], name: str = "Σ") -> MultilinearMap:
    if not terms:
        raise AlgebraError("Empty linear combination")
    first = terms[0][1]
    for _, f in terms[1:]:
        _check_signature(first, f)
    terms = [(to_scalar(c), f) for c, f in terms]

    def rule(word: tuple) -> dict:
        out: dict = {}
        for c, f in terms:
            axpy(out, c, f.on_basis(word))
        return out

    return MultilinearMap(first.source, first.target, first.arity, first.degree, rule=rule, name=name)


def map_equal(f: MultilinearMap, g: MultilinearMap, basis: Sequence | None = None) -> bool:
    _check_signature(f, g)
    return all(f.on_basis(w) == g.on_basis(w) for w in f.domain(basis))


def first_difference(f: MultilinearMap, g: MultilinearMap, basis: Sequence | None = None):
    """First basis word where f and g differ, with the difference vector (or None)."""
    for word in f.domain(basis):
        a, b = f.on_basis(word), g.on_basis(word)
        if a != b:
            return word, axpy(dict(a), Fraction(-1), b)
    return None


# ---------------------------------------------------------------------------
# Signed tensor application and composition
# ---------------------------------------------------------------------------

def tensor_product_apply(maps: Sequence[MultilinearMap], tensor: Mapping[tuple, Fraction]) -> Tensor:
    """(f₁⊗…⊗f_r) applied to a tensor of words of length Σ arity(f_i).

    Koszul rule: f_i passes the inputs consumed by f₁…f_{i-1}, giving (−1)^{|f_i|·Σ|earlier inputs|}.
    """
    total = sum(f.arity for f in maps)
    out: Tensor = {}
    for word, c in tensor.items():
        if len(word) != total:
            raise AlgebraError(f"Word of length {len(word)} fed to maps of total arity {total}")
        partial: Tensor = {(): c}
        position = 0
        passed = 0
        for f in maps:
            chunk = word[position:position + f.arity]
            position += f.arity
            s = sign(f.degree * passed)
            passed += sum(f.source.degree(x) for x in chunk)
            image = f.on_basis(chunk)
            if not image:
                partial = {}
                break
            nxt: Tensor = {}
            for prefix, pc in partial.items():
                for label, v in image.items():
                    add_into(nxt, prefix + (label,), s * pc * v)
            partial = nxt
        for key, v in partial.items():
            add_into(out, key, v)
    return out


def tensor_apply(maps: Sequence[MultilinearMap], inputs: Sequence[Vector]) -> Tensor:
    """(f₁⊗…⊗f_k)(a₁⊗…⊗a_k) for arity-1 maps; result is a tensor of target basis words."""
    if len(maps) != len(inputs):
        raise AlgebraError(f"{len(maps)} maps for {len(inputs)} inputs")
    for f, v in zip(maps, inputs):
        if f.arity != 1:
            raise AlgebraError(f"tensor_apply expects arity-1 maps, got {f!r}")
        if not same_module(f.source, v.module):
            raise AlgebraError(f"{f.name} expects inputs from {f.source.name}, got {v.module.name}")
    return tensor_product_apply(maps, tensor_of(inputs))


def compose_at(outer: MultilinearMap, inner: MultilinearMap, slot: int) -> MultilinearMap:
    """outer ∘_slot inner: inner fills input `slot` (1-based) of outer."""
    if not same_module(inner.target, outer.source):
        raise AlgebraError(f"Cannot compose {outer!r} with {inner!r}: module mismatch")
    if not 1 <= slot <= outer.arity:
        raise AlgebraError(f"Slot {slot} out of range for arity {outer.arity}")
    if not same_module(inner.source, outer.source) and outer.arity > 1:
        raise AlgebraError("compose_at needs a common source module for the untouched inputs")
    before = slot - 1
    arity = outer.arity + inner.arity - 1

    def rule(word: tuple) -> dict:
        head, mid, tail = word[:before], word[before:before + inner.arity], word[before + inner.arity:]
        s = sign(inner.degree * sum(inner.source.degree(x) for x in head))
        out: dict = {}
        for label, v in inner.on_basis(mid).items():
            axpy(out, s * v, outer.on_basis(head + (label,) + tail))
        return out

    return MultilinearMap(
        inner.source, outer.target, arity, outer.degree + inner.degree, rule=rule,
        name=f"{outer.name}∘{slot}{inner.name}",
    )


def compose(outer: MultilinearMap, inner: MultilinearMap) -> MultilinearMap:
    """Post-composition outer∘inner for arity-1 `outer`."""
    if outer.arity != 1:
        raise AlgebraError(f"compose expects an arity-1 outer map, got {outer!r}")
    return compose_at(outer, inner, 1)


def precompose_tensor(outer: MultilinearMap, inners: Sequence[MultilinearMap]) -> MultilinearMap:
    """outer∘(f₁⊗…⊗f_r) with Koszul signs."""
    if len(inners) != outer.arity:
        raise AlgebraError(f"{outer.name} has arity {outer.arity}, got {len(inners)} inner maps")
    source = inners[0].source
    for f in inners:
        if not same_module(f.target, outer.source) or not same_module(f.source, source):
            raise AlgebraError(f"Module mismatch composing {outer!r} with {f!r}")
    arity = sum(f.arity for f in inners)
    degree = outer.degree + sum(f.degree for f in inners)

    def rule(word: tuple) -> dict:
        return outer.apply_tensor(tensor_product_apply(inners, {word: Fraction(1)}))

    return MultilinearMap(source, outer.target, arity, degree, rule=rule, name=f"{outer.name}(⊗)")


def permute_inputs(f: MultilinearMap, permutation: Sequence[int]) -> MultilinearMap:
    """x ↦ ε·f(x permuted): element i is placed at position permutation[i], ε the Koszul sign."""
    if len(permutation) != f.arity:
        raise AlgebraError(f"Permutation length {len(permutation)} does not match arity {f.arity}")

    def rule(word: tuple) -> dict:
        s = koszul_sign(permutation, [f.source.degree(x) for x in word])
        return {k: s * v for k, v in f.on_basis(permute_word(word, permutation)).items()}

    return MultilinearMap(f.source, f.target, f.arity, f.degree, rule=rule, name=f"{f.name}∘σ")


def iterated_product(product: MultilinearMap, k: int, bracketing: Any = None) -> MultilinearMap:
    """μ applied to k factors: left-bracketed, or along a binary planar tree with k leaves."""
    if product.arity != 2:
        raise AlgebraError(f"iterated_product needs a binary product, got {product!r}")
    if bracketing is None:
        result = identity_map(product.source)
        for _ in range(k - 1):
            result = precompose_tensor(product, [result, identity_map(product.source)])
        return result.with_name(f"μ{k}") if k > 1 else result

    def walk(tree: Any) -> MultilinearMap:
        if not tree.children:
            return identity_map(product.source)
        if len(tree.children) != 2:
            raise AlgebraError(f"Bracketing {tree} is not binary")
        return precompose_tensor(product, [walk(c) for c in tree.children])

    if bracketing.leaves != k:
        raise AlgebraError(f"Bracketing {bracketing} has {bracketing.leaves} leaves, expected {k}")
    return walk(bracketing).with_name(f"μ{bracketing}")


def product_of_maps(
    factors: Sequence[tuple[MultilinearMap, Sequence[Sequence[int]]]],
    product_a: MultilinearMap | None,
    product_b: MultilinearMap,
    bracketing: Any = None,
    name: str = "Π",
) -> MultilinearMap:
    """x ↦ ε·μ_B(f₁(∏X₁₁,…), f₂(…), …) for factors (f, (X₁,…,X_j)) with X sets of input indices.

    Inside an argument the inputs are multiplied under μ_A in the listed order; ε is the
    Koszul sign of bringing the inputs into the concatenated order.
    """
    order = [i for _, args in factors for arg in args for i in arg]
    n = len(order)
    if sorted(order) != list(range(1, n + 1)):
        raise AlgebraError(f"Factor arguments {order} do not cover the inputs 1..{n} exactly once")
    inner = []
    for f, args in factors:
        if f.arity != len(args):
            raise AlgebraError(f"{f.name} has arity {f.arity}, got {len(args)} arguments")
        if all(len(arg) == 1 for arg in args):
            inner.append(f)
            continue
        if product_a is None:
            raise AlgebraError("Arguments with several inputs need a source product")
        inner.append(precompose_tensor(f, [iterated_product(product_a, len(arg)) for arg in args]))
    outer = iterated_product(product_b, len(factors), bracketing)
    source = inner[0].source

    def rule(word: tuple) -> dict:
        s = sort_sign(order, [source.degree(x) for x in word])
        arranged = tuple(word[i - 1] for i in order)
        return outer.apply_tensor(tensor_product_apply(inner, {arranged: Fraction(s)}))

    degree = sum(f.degree for f in inner)
    return MultilinearMap(source, outer.target, n, degree, rule=rule, name=name)
