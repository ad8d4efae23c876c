import json
from fractions import Fraction

import pytest
from pydantic import ValidationError

from cinfty.config import FixtureName, LabSettings, RunConfig
from cinfty.core import FiniteModule, MultilinearMap, identity_map, map_scale
from cinfty.report import (
    Certificate,
    build_report,
    certificate_from_report,
    certificates_to_frame,
    certificates_to_json,
    certificates_to_text,
    map_hash,
    merge_reports,
    violation,
    zero_map_report,
)


@pytest.fixture
def settings():
    return LabSettings(_env_file=None)


@pytest.fixture
def module():
    return FiniteModule("M", [("a", 0), ("x", 1)])


def test_default_settings(settings):
    assert settings.MAX_ARITY == 4
    assert settings.SCHEMA_VERSION == "1"
    assert settings.REPORT_FORMAT == "json"
    assert set(LabSettings.model_fields) == {
        "OUTPUT_DIR",
        "MAX_ARITY",
        "MAX_CUMULANT_N",
        "DEGREE_BOUND",
        "SHUFFLE_BOUND",
        "PARTITION_BOUND",
        "TREE_BOUND",
        "REPORT_FORMAT",
        "SCHEMA_VERSION",
    }


def test_settings_read_the_environment(monkeypatch):
    monkeypatch.setenv("CINFTY_MAX_ARITY", "3")
    monkeypatch.setenv("CINFTY_REPORT_FORMAT", "text")
    settings = LabSettings(_env_file=None)
    assert settings.MAX_ARITY == 3
    assert settings.REPORT_FORMAT == "text"


@pytest.mark.parametrize("field, value", [("MAX_ARITY", 9), ("MAX_CUMULANT_N", 5), ("DEGREE_BOUND", 0)])
def test_settings_out_of_range(field, value):
    with pytest.raises(ValueError):
        LabSettings(_env_file=None, **{field: value})


def test_run_config_defaults_from_settings(settings):
    run = RunConfig.from_settings(settings, fixture="battery", arity=None, n=3)
    assert run.fixture is FixtureName.BATTERY
    assert run.arity == settings.MAX_ARITY
    assert run.n == 3
    assert run.out is None


@pytest.mark.parametrize(
    "overrides",
    [{"fixture": "bogus"}, {"arity": 5}, {"arity": 0}, {"n": 7}, {"degree_bound": 0}, {"format": "xml"}],
)
def test_run_config_rejects_bad_options(settings, overrides):
    with pytest.raises(ValidationError):
        RunConfig.from_settings(settings, **overrides)


def test_zero_map_report_lists_nonzero_words(module):
    f = MultilinearMap(module, module, 1, 0, table={("x",): {"x": Fraction(1, 2)}}, name="f")
    report = zero_map_report("f = 0", f)
    assert not report.passed and not report
    assert report.violations[0].inputs == ["x"]
    assert report.arity_range == [1, 1]
    assert zero_map_report("0 = 0", map_scale(0, f)).passed


def test_merge_reports_keeps_sub_statuses(module):
    good = build_report("good", [1, 1], [])
    bad = build_report("bad", [2, 3], [violation(module, module, ("a", "x"), {"x": Fraction(1)})])
    merged = merge_reports("both", [good, bad])
    assert merged.status == "fail"
    assert merged.arity_range == [1, 3]
    assert merged.notes == ["good: pass", "bad: fail"]
    assert merged.violations[0].inputs == ["a", "x"]


def test_map_hash_is_stable(module):
    ident = identity_map(module)
    assert map_hash(ident) == map_hash(identity_map(module))
    assert map_hash(ident) != map_hash(map_scale(2, ident))
    assert map_hash(None) == ""


def _certificates():
    passed = certificate_from_report("d∘d = 0", "interval", build_report("d∘d = 0", [1, 1], []), wall_time=0.12345)
    skipped = Certificate(statement="cumulants", fixture="circle", status="skipped", message="no cumulant morphism")
    return [passed, skipped]


def test_certificates_to_json_drops_wall_times():
    data = json.loads(certificates_to_json(_certificates(), schema="1"))
    assert data["schema"] == "1" and data["kind"] == "certificates"
    assert [row["status"] for row in data["data"]] == ["verified", "skipped"]
    assert "wall_time" not in data["data"][0]
    timed = json.loads(certificates_to_json(_certificates(), timings=True))
    assert timed["data"][0]["wall_time"] == 0.123


def test_certificates_to_text():
    frame = certificates_to_frame(_certificates())
    assert list(frame["status"]) == ["verified", "skipped"]
    text = certificates_to_text(_certificates())
    assert "d∘d = 0" in text and "no cumulant morphism" in text
    assert certificates_to_text([]) == "(no certificates)\n"
