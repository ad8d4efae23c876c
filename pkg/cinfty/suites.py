"""
Verification suites: each suite turns the checks that apply to a fixture into certificates.

A check is a thunk returning a `CheckReport`, or `(report, lhs, rhs)` when two maps were
compared.  Controls are checks expected to fail; they certify when a violation is found.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Callable, Iterator

import networkx as nx

from cinfty.config import COMPLEX_CAP, GRAPH_CAP, NULLHOMOTOPY_CAP, FixtureName, RunConfig, Suite
from cinfty.core import (
    AlgebraError,
    ConstructionError,
    MultilinearMap,
    ResourceBoundError,
    UnsupportedFixture,
    VerificationError,
    map_linear_combination,
)
from cinfty.cumulants import (
    boolean_k2_crosscheck,
    bracketing_homotopy,
    cumulant,
    moment,
    moments_from_cumulants,
    morphism_cumulant,
    nullhomotopy_from_graph,
    second_level_homotopy,
)
from cinfty.fixtures import (
    circle,
    circle_cochains,
    cumulant_fixture,
    dgca_battery,
    flipped_homotopy,
    identity_morphism,
    nonassociative_algebra,
    subdivided_circle,
    subdivided_tower,
    symmetric_p2_morphism,
    transfer_fixture,
)
from cinfty.forms import check_whitney_duality, cochain_algebra, monomial_forms
from cinfty.partitions import (
    build_cumulant_complex,
    build_refinement_graph,
    cellular_homology,
    check_graph_claims,
    check_realization,
    shuffle_cycle_report,
)
from cinfty.report import (
    Certificate,
    CheckReport,
    Violation,
    build_report,
    certificate_from_report,
    map_hash,
    violation,
    zero_map_report,
)
from cinfty.structures import (
    check_cinfty,
    check_cinfty_morphism,
    check_complex,
    check_dgca,
    check_stasheff,
    hom_boundary,
)
from cinfty.transfer import (
    check_contraction,
    compose_contractions,
    enumerate_trees,
    identity_contraction,
    transfer_structure,
    two_stage_agreement,
)

logger = logging.getLogger(__name__)

FORM_FIXTURES = (FixtureName.INTERVAL, FixtureName.DELTA2, FixtureName.SUBDIVIDED, FixtureName.CIRCLE)
CUMULANT_FIXTURES = (FixtureName.INTERVAL, FixtureName.DELTA2)


@dataclass
class Check:
    statement: str
    run: Callable[[], object]
    control: bool = False


# ---------------------------------------------------------------------------
# Running checks
# ---------------------------------------------------------------------------

def _witness_violation(error: VerificationError) -> list[Violation]:
    if error.witness is None or not isinstance(error.defect, MultilinearMap):
        return []
    word, defect = error.witness
    return [violation(error.defect.target, error.defect.source, word, defect)]


def certify(check: Check, fixture: str) -> Certificate:
    """Run one check; any error raised while it runs becomes a failed certificate."""
    start = time.perf_counter()
    try:
        result = check.run()
    except (ConstructionError, AlgebraError) as e:
        logger.warning("%s on %s: %s", check.statement, fixture, e)
        if isinstance(e, VerificationError):
            defect = _witness_violation(e)
        elif isinstance(e, ConstructionError) and isinstance(e.report, CheckReport):
            defect = e.report.violations
        else:
            defect = []
        return Certificate(
            statement=check.statement,
            fixture=fixture,
            status="failed",
            defect=defect,
            wall_time=round(time.perf_counter() - start, 3),
            message=str(e),
        )

    lhs = rhs = None
    if isinstance(result, tuple):
        result, lhs, rhs = result
    elapsed = time.perf_counter() - start
    cert = certificate_from_report(check.statement, fixture, result, elapsed, map_hash(lhs), map_hash(rhs))
    if check.control:
        # a control certifies when its identity breaks; the violations are the witness
        found = not result.passed
        cert.status = "verified" if found else "failed"
        cert.message = "violation found" if found else "expected a violation, none found"
    return cert


def _equality(name: str, lhs: MultilinearMap, rhs: MultilinearMap):
    report = zero_map_report(name, map_linear_combination([(1, lhs), (-1, rhs)]))
    return report, lhs, rhs


def _constructed(name: str, build: Callable[[], MultilinearMap], arity: int) -> CheckReport:
    """Constructions re-verify themselves; reaching the return means the identity holds."""
    built = build()
    return build_report(name, [arity, arity], [], [f"{built.name} verified"])


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def dgca_checks(config: RunConfig) -> Iterator[Check]:
    if config.fixture is FixtureName.BATTERY:
        for A in dgca_battery():
            yield Check(f"dgca.{A.module.name}", lambda A=A: check_dgca(A))
            yield Check(f"dgca.{A.module.name}.stasheff", lambda A=A: check_stasheff(A.as_ainfty(config.arity)))
        yield Check("control.nonassociative", lambda: check_stasheff(nonassociative_algebra(), 3), control=True)
        return
    model = transfer_fixture(config.fixture, config.arity).model
    yield Check(f"dgca.{model.forms.name}", lambda: check_dgca(model.dgca))
    yield Check(f"complex.{model.cochains.name}", lambda: check_complex(model.cochains))
    if config.fixture is FixtureName.CIRCLE:
        yield Check("whitney.duality", lambda: check_whitney_duality(circle()))
        yield Check("control.cup_commutativity", lambda: check_cinfty(circle_cochains().as_ainfty(2), 2), control=True)


def transfer_checks(config: RunConfig) -> Iterator[Check]:
    arity = config.arity
    if config.fixture is FixtureName.BATTERY:
        for A in dgca_battery():
            yield Check(
                f"transfer.identity.{A.module.name}",
                lambda A=A: check_stasheff(transfer_structure(A, identity_contraction(A.complex), arity, verify=False), arity),
            )
        return
    fx = transfer_fixture(config.fixture, arity)
    basis = fx.model.monomial_basis(config.degree_bound)
    yield Check("contraction", lambda: check_contraction(fx.contraction, basis))
    yield Check(f"transfer.stasheff.n{arity}", lambda: check_stasheff(fx.structure, arity))
    yield Check(f"transfer.cinfty.n{arity}", lambda: check_cinfty(fx.structure, arity))
    yield Check(f"transfer.morphism.n{arity}", lambda: check_cinfty_morphism(fx.morphism, arity))
    yield Check("control.flipped_h", lambda: check_contraction(flipped_homotopy(fx.contraction), basis), control=True)
    if config.fixture is FixtureName.CIRCLE:
        sub = subdivided_circle()
        yield Check("contraction.subdivided_circle", lambda: check_contraction(sub.refinement))
        yield Check(f"transfer.cup.stasheff.n{arity}", lambda: _cup_transfer(sub, arity))


def _cup_transfer(sub, arity: int) -> CheckReport:
    transferred = transfer_structure(cochain_algebra(sub.fine), sub.refinement, arity, verify=False)
    return check_stasheff(transferred, arity)


def cinfty_checks(config: RunConfig) -> Iterator[Check]:
    if config.fixture in FORM_FIXTURES:
        fx = transfer_fixture(config.fixture, config.arity)
        P = fx.morphism
        yield Check(f"cinfty.structure.n{config.arity}", lambda: check_cinfty(fx.structure, config.arity))
        yield Check(f"cinfty.morphism.n{config.arity}", lambda: check_cinfty_morphism(P, config.arity))
        if config.arity >= 3:
            left, right = enumerate_trees(3, binary_only=True)[:2]
            yield Check("bracketing_homotopy.n3", lambda: _constructed("bracketing", lambda: bracketing_homotopy(P, left, right), 3))
    elif config.fixture is FixtureName.BATTERY:
        for A in dgca_battery():
            yield Check(f"cinfty.{A.module.name}", lambda A=A: check_cinfty(A.as_ainfty(config.arity), config.arity))
    control = symmetric_p2_morphism()
    yield Check("control.symmetric_p2", lambda: check_cinfty_morphism(control, 2), control=True)


def _boundary(P, n: int) -> MultilinearMap:
    return hom_boundary(P.p(n), P.source.complex, P.target.complex)


def cumulant_checks(config: RunConfig) -> Iterator[Check]:
    if config.fixture is FixtureName.BATTERY:
        for A in dgca_battery():
            P = identity_morphism(A, max(config.arity, 3))
            yield Check(f"cumulants.strict.{A.module.name}", lambda P=P: _equality("k2 = ∂p2", morphism_cumulant(P, 2), _boundary(P, 2)))
            yield Check(f"nullhomotopy.strict.{A.module.name}", lambda P=P: _constructed("∂H3 = k3", lambda: nullhomotopy_from_graph(P, 3), 3))
        return
    if config.fixture not in CUMULANT_FIXTURES:
        raise UnsupportedFixture(f"{config.fixture.value} has no cumulant morphism")
    top = min(config.arity, NULLHOMOTOPY_CAP)
    if config.n > top:
        raise ResourceBoundError(f"cumulants need --n ≤ min(--arity, {NULLHOMOTOPY_CAP}) = {top}, got {config.n}")
    top = config.n
    fx = cumulant_fixture(config.fixture, config.arity)
    P = fx.morphism
    e, pa, pb = P.p(1), P.source.m(2), P.target.m(2)

    yield Check(f"cinfty.morphism.n{config.arity}", lambda: check_cinfty_morphism(P, config.arity))
    yield Check("boolean.k2", lambda: boolean_k2_crosscheck(e, pa, pb))
    for n in range(2, top + 1):
        yield Check(
            f"moments.n{n}",
            lambda n=n: _equality(
                f"moments n={n}",
                moments_from_cumulants({k: cumulant(e, pa, pb, k) for k in range(1, n + 1)}, pb, n),
                moment(e, pa, n),
            ),
        )
    yield Check("nullhomotopy.n2", lambda: _equality("∂p2 = k2", _boundary(P, 2), morphism_cumulant(P, 2)))
    for n in range(3, top + 1):
        yield Check(f"nullhomotopy.n{n}", lambda n=n: _constructed(f"∂H{n} = k{n}", lambda: nullhomotopy_from_graph(P, n), n))
    if top >= 3:
        yield Check("second_level.n3", lambda: _constructed("∂G = H3 − H3'", lambda: second_level_homotopy(P, 3).G, 3))


def complex_checks(config: RunConfig) -> Iterator[Check]:
    """G_n up to --n; c_n up to min(--n, COMPLEX_CAP); realizations up to min(--n, --arity, 3)."""
    if config.n > COMPLEX_CAP:
        logger.info("complexes: G_n runs to %d, c_n stops at %d", config.n, COMPLEX_CAP)
    for n in range(2, min(config.n, GRAPH_CAP) + 1):
        yield Check(f"graph.G{n}", lambda n=n: check_graph_claims(build_refinement_graph(n)))
    for n in range(2, min(config.n, COMPLEX_CAP) + 1):
        yield Check(f"complex.c{n}.contractible", lambda n=n: _contractible(n))
        yield Check(f"complex.c{n}.skeleton", lambda n=n: _skeleton(n))
    if config.fixture in CUMULANT_FIXTURES:
        P = cumulant_fixture(config.fixture, config.arity).morphism
        for n in range(2, min(config.n, config.arity, 3) + 1):
            c = build_cumulant_complex(n)
            yield Check(f"realization.c{n}.chain_map", lambda c=c: check_realization(c, P))
            yield Check(f"shuffle_cycles.c{n}", lambda c=c: shuffle_cycle_report(c, P))
    control = symmetric_p2_morphism()
    yield Check("control.shuffle_cycles.symmetric_p2", lambda: shuffle_cycle_report(build_cumulant_complex(2), control), control=True)


def _contractible(n: int) -> CheckReport:
    betti = cellular_homology(build_cumulant_complex(n))
    expected = [1] + [0] * (len(betti) - 1)
    found = [] if betti == expected else [Violation(inputs=["betti"], defect_vector=[{"name": str(b), "coeff": "1"} for b in betti])]
    return build_report(f"c{n} is acyclic", [n, n], found, [f"betti = {betti}"])


def _skeleton(n: int) -> CheckReport:
    same = nx.is_isomorphic(build_cumulant_complex(n).one_skeleton(), build_refinement_graph(n).graph)
    found = [] if same else [Violation(inputs=["one_skeleton"], defect_vector=[])]
    return build_report(f"1-skeleton of c{n} is G{n}", [n, n], found)


def tower_checks(config: RunConfig) -> Iterator[Check]:
    up_to = min(config.arity, 3)
    if config.fixture in (FixtureName.SUBDIVIDED, FixtureName.INTERVAL):
        tower = subdivided_tower()
        basis = monomial_forms(1, config.degree_bound)
        source = tower.model.dgca
        yield Check("tower.composite", lambda: check_contraction(compose_contractions(tower.outer, tower.inner, verify=False), basis))
        yield Check("tower.two_stage", lambda: two_stage_agreement(source, tower.outer, tower.inner, up_to))
        yield Check(
            "control.skewed_direct",
            lambda: two_stage_agreement(source, tower.outer, tower.inner, up_to, direct=tower.skewed),
            control=True,
        )
    elif config.fixture is FixtureName.CIRCLE:
        sub = subdivided_circle()
        yield Check("contraction.subdivided_circle", lambda: check_contraction(sub.refinement))
        yield Check("whitney.duality", lambda: check_whitney_duality(sub.fine))
    else:
        raise UnsupportedFixture(f"{config.fixture.value} has no subdivision tower")


SUITES: dict[Suite, Callable[[RunConfig], Iterator[Check]]] = {
    Suite.DGCA: dgca_checks,
    Suite.TRANSFER: transfer_checks,
    Suite.CINFTY: cinfty_checks,
    Suite.CUMULANTS: cumulant_checks,
    Suite.COMPLEXES: complex_checks,
    Suite.TOWER: tower_checks,
}


def run_suite(suite: Suite | str, config: RunConfig, echo: Callable[[str], None] | None = None) -> list[Certificate]:
    """Certificates of one suite (or all of them) in a deterministic order.

    A single suite the fixture does not support raises `UnsupportedFixture`; under `all` it is
    recorded as one skipped certificate instead.  No check is skipped once it has started.
    """
    suite = Suite(suite)
    echo = echo or (lambda line: None)
    names = [s for s in SUITES] if suite is Suite.ALL else [suite]
    certificates = []
    for name in names:
        echo(f"Running suite {name.value} on {config.fixture.value}")
        start = time.perf_counter()
        try:
            checks = list(SUITES[name](config))
        except UnsupportedFixture as e:
            if suite is not Suite.ALL:
                raise
            echo(f"- skipped {name.value}: {e}")
            certificates.append(Certificate(statement=name.value, fixture=config.fixture.value, status="skipped", message=str(e)))
            continue
        except ConstructionError as e:
            echo(f"! Error building {config.fixture.value}: {e}")
            certificates.append(
                Certificate(
                    statement=name.value,
                    fixture=config.fixture.value,
                    status="failed",
                    wall_time=round(time.perf_counter() - start, 3),
                    message=str(e),
                )
            )
            continue
        for check in checks:
            cert = certify(check, config.fixture.value)
            if cert.status == "verified":
                echo(f"✓ verified {cert.statement}")
            else:
                echo(f"! failed {cert.statement}: {cert.message or len(cert.defect)}")
            certificates.append(cert)
    return certificates
