import json

import pytest

from cinfty import cli
from cinfty.cli import build_parser, main
from cinfty.report import Certificate


def test_parser_knows_the_subcommands():
    args = build_parser().parse_args(["verify", "dgca", "--fixture", "battery", "--arity", "3"])
    assert (args.command, args.suite, args.fixture, args.arity) == ("verify", "dgca", "battery", 3)


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "all", "--fixture", "bogus"],
        ["verify", "nonsense"],
        ["verify", "dgca", "--arity", "9"],
        ["export", "Gn", "--n", "7"],
        ["export", "cn", "--n", "5"],
        ["verify", "cumulants", "--fixture", "circle"],
        ["verify", "cumulants", "--fixture", "interval", "--n", "5"],
        ["export", "transferred", "--fixture", "battery"],
        [],
    ],
)
def test_bad_usage_exits_with_two(argv):
    assert main(argv) == 2


def test_list_fixtures(capsys):
    assert main(["list-fixtures"]) == 0
    names = [line.split()[0] for line in capsys.readouterr().out.splitlines()]
    assert names == ["interval", "delta2", "circle", "subdivided", "battery"]


def test_export_cumulant_expansion(capsys):
    assert main(["export", "cumulant", "--n", "2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["kind"] == "cumulant"
    assert [t["term_signature"] for t in data["data"]] == ["e(ab)", "e(a)e(b)"]


def test_export_refinement_graph(capsys):
    assert main(["export", "Gn", "--n", "3"]) == 0
    dot = capsys.readouterr().out
    assert dot.startswith("graph G3 {")
    assert dot.count("[partition=") == 6
    assert dot.count(" -- ") == 7


def test_export_cube_complex_to_file(tmp_path):
    out = tmp_path / "c3.json"
    assert main(["export", "cn", "--n", "3", "--out", str(out)]) == 0
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["data"]["betti"] == [1, 0, 0]
    assert len(data["data"]["cells"]) == 6 + 7 + 2


def test_verify_writes_certificates(capsys):
    assert main(["verify", "complexes", "--fixture", "battery", "--n", "2"]) == 0
    captured = capsys.readouterr()
    data = json.loads(captured.out)
    assert data["kind"] == "certificates"
    assert {row["status"] for row in data["data"]} == {"verified"}
    assert "Running suite complexes on battery" in captured.err


def test_verify_as_text(capsys):
    assert main(["verify", "cinfty", "--fixture", "battery", "--arity", "3", "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert "control.symmetric_p2" in out
    assert "verified" in out


def test_failed_certificates_exit_with_one(monkeypatch, capsys):
    def failing(suite, config, echo=None):
        return [Certificate(statement="d∘d = 0", fixture=config.fixture.value, status="failed")]

    monkeypatch.setattr(cli, "run_suite", failing)
    assert main(["verify", "dgca", "--fixture", "battery"]) == 1
    assert "1 of 1 certificates failed" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "complexes", "--fixture", "battery", "--n", "3"],
        ["export", "cn", "--n", "3"],
        ["export", "transferred", "--fixture", "interval", "--arity", "3"],
    ],
)
def test_reruns_are_byte_identical(tmp_path, argv):
    first, second = tmp_path / "first.json", tmp_path / "second.json"
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
