from fractions import Fraction

import pytest

from cinfty import suites
from cinfty.config import FixtureName, RunConfig, Suite
from cinfty.core import (
    AlgebraError,
    ConstructionError,
    FiniteModule,
    MultilinearMap,
    ResourceBoundError,
    UnsupportedFixture,
    VerificationError,
)
from cinfty.report import build_report, zero_map_report
from cinfty.suites import SUITES, Check, certify, run_suite


def _passing():
    return build_report("ok", [1, 1], [])


def _failing():
    module = FiniteModule("M", [("a", 0)])
    f = MultilinearMap(module, module, 1, 0, table={("a",): {"a": 1}}, name="f")
    return zero_map_report("f = 0", f)


def test_every_suite_is_registered():
    assert set(SUITES) == set(Suite) - {Suite.ALL}


def test_certify_statuses():
    assert certify(Check("ok", _passing), "battery").status == "verified"
    assert certify(Check("bad", _failing), "battery").status == "failed"
    control = certify(Check("control", _failing, control=True), "battery")
    assert control.status == "verified" and control.message == "violation found"
    assert len(control.defect) == 1
    assert certify(Check("control", _passing, control=True), "battery").status == "failed"


def test_certify_turns_errors_into_failed_certificates(monkeypatch):
    module = FiniteModule("M", [("a", 0)])
    defect = MultilinearMap(module, module, 1, 0, table={("a",): {"a": 2}}, name="defect")

    def broken():
        raise VerificationError("∂H ≠ k", defect=defect, witness=(("a",), {"a": Fraction(2)}))

    def unbuildable():
        raise ConstructionError("no homotopy")

    def mismatched():
        raise AlgebraError("products do not match")

    cert = certify(Check("broken", broken), "interval")
    assert cert.status == "failed" and cert.defect[0].inputs == ["a"]
    failed = certify(Check("mismatched", mismatched), "interval")
    assert failed.status == "failed" and "match" in failed.message
    clock = iter([1.0, 3.5])
    monkeypatch.setattr(suites.time, "perf_counter", lambda: next(clock))
    unbuilt = certify(Check("unbuildable", unbuildable), "interval")
    assert unbuilt.status == "failed" and unbuilt.wall_time == 2.5


def test_dgca_suite_on_the_battery():
    lines = []
    certificates = run_suite(Suite.DGCA, RunConfig(fixture=FixtureName.BATTERY), echo=lines.append)
    assert lines[0] == "Running suite dgca on battery"
    assert all(c.status == "verified" for c in certificates)
    assert "control.nonassociative" in [c.statement for c in certificates]
    assert any(line.startswith("✓ verified dgca.") for line in lines)


def test_unsupported_suites_raise_alone_and_skip_under_all():
    with pytest.raises(UnsupportedFixture):
        run_suite("cumulants", RunConfig(fixture="circle"))
    with pytest.raises(UnsupportedFixture):
        run_suite(Suite.TOWER, RunConfig(fixture="battery"))
    lines = []
    certificates = run_suite(Suite.ALL, RunConfig(fixture="battery", arity=2, n=2), echo=lines.append)
    assert [(c.statement, c.status) for c in certificates if c.status != "verified"] == [("tower", "skipped")]
    assert "- skipped tower: battery has no subdivision tower" in lines


def test_cumulant_suite_validates_n():
    with pytest.raises(ResourceBoundError):
        run_suite(Suite.CUMULANTS, RunConfig(fixture="interval", arity=3, n=4))
    with pytest.raises(ResourceBoundError):
        run_suite(Suite.CUMULANTS, RunConfig(fixture="interval", arity=4, n=6))


def test_cumulant_suite_on_the_interval():
    certificates = run_suite(Suite.CUMULANTS, RunConfig(fixture="interval", arity=3, n=3))
    statements = [c.statement for c in certificates]
    assert statements[0] == "cinfty.morphism.n3"
    assert {"nullhomotopy.n2", "nullhomotopy.n3", "second_level.n3"} <= set(statements)
    assert all(c.status == "verified" for c in certificates)


def test_complex_suite_on_the_battery():
    certificates = run_suite(Suite.COMPLEXES, RunConfig(fixture="battery", n=3))
    statements = [c.statement for c in certificates]
    assert statements == [
        "graph.G2",
        "graph.G3",
        "complex.c2.contractible",
        "complex.c2.skeleton",
        "complex.c3.contractible",
        "complex.c3.skeleton",
        "control.shuffle_cycles.symmetric_p2",
    ]
    assert all(c.status == "verified" for c in certificates)


def test_circle_suites():
    config = RunConfig(fixture="circle", arity=3, degree_bound=3)
    certificates = run_suite(Suite.DGCA, config) + run_suite(Suite.TOWER, config) + run_suite(Suite.TRANSFER, config)
    assert all(c.status == "verified" for c in certificates)
    statements = [c.statement for c in certificates]
    assert {"control.cup_commutativity", "dgca.Ω(∂Δ2)", "transfer.morphism.n3"} <= set(statements)


def test_tower_suite_on_the_subdivided_interval():
    certificates = run_suite(Suite.TOWER, RunConfig(fixture="subdivided", arity=3, degree_bound=3))
    assert [c.statement for c in certificates] == ["tower.composite", "tower.two_stage", "control.skewed_direct"]
    assert all(c.status == "verified" for c in certificates)
