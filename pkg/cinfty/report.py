"""
Check reports, certificates and their JSON / text renderings.
"""
from __future__ import annotations

import hashlib
import json
from typing import Any, Iterable, Literal, Sequence

import pandas as pd
from pydantic import BaseModel, Field

from cinfty.core import GradedModule, MultilinearMap, Vector, canonical_json

MAX_VIOLATIONS = 20


class Violation(BaseModel):
    inputs: list[str]
    defect_vector: list[dict[str, str]] = Field(default_factory=list)


class CheckReport(BaseModel):
    check: str
    arity_range: list[int] = Field(default_factory=list)
    status: Literal["pass", "fail"] = "pass"
    violations: list[Violation] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def __bool__(self) -> bool:
        return self.passed


class Certificate(BaseModel):
    statement: str
    fixture: str
    status: Literal["verified", "failed", "skipped"]
    defect: list[Violation] = Field(default_factory=list)
    wall_time: float = 0.0
    lhs_hash: str = ""
    rhs_hash: str = ""
    message: str = ""


def violation(module: GradedModule, source: GradedModule, word: Sequence, defect: dict) -> Violation:
    return Violation(
        inputs=[source.label_name(x) for x in word],
        defect_vector=Vector(module, defect).to_json(),
    )


def build_report(
    check: str,
    arity_range: Sequence[int],
    violations: Iterable[Violation],
    notes: Iterable[str] = (),
) -> CheckReport:
    found = sorted(violations, key=lambda v: (len(v.inputs), v.inputs))
    return CheckReport(
        check=check,
        arity_range=list(arity_range),
        status="fail" if found else "pass",
        violations=found[:MAX_VIOLATIONS],
        notes=list(notes),
    )


def zero_map_report(
    check: str,
    f: MultilinearMap,
    basis: Sequence | None = None,
    arity_range: Sequence[int] | None = None,
) -> CheckReport:
    """Report listing every basis word on which `f` is nonzero."""
    found = [violation(f.target, f.source, word, image) for word, image in f.entries(basis)]
    return build_report(check, arity_range or [f.arity, f.arity], found)


def merge_reports(check: str, reports: Sequence[CheckReport]) -> CheckReport:
    arities = [a for r in reports for a in r.arity_range]
    found = [v for r in reports for v in r.violations]
    notes = [f"{r.check}: {r.status}" for r in reports] + [n for r in reports for n in r.notes]
    rng = [min(arities), max(arities)] if arities else []
    return build_report(check, rng, found, notes)


def map_hash(f: MultilinearMap | None, basis: Sequence | None = None) -> str:
    if f is None:
        return ""
    return hashlib.sha256(canonical_json(f.to_json(basis)).encode()).hexdigest()


def certificate_from_report(
    statement: str,
    fixture: str,
    report: CheckReport,
    wall_time: float = 0.0,
    lhs_hash: str = "",
    rhs_hash: str = "",
) -> Certificate:
    return Certificate(
        statement=statement,
        fixture=fixture,
        status="verified" if report.passed else "failed",
        defect=report.violations,
        wall_time=round(wall_time, 3),
        lhs_hash=lhs_hash,
        rhs_hash=rhs_hash,
    )


def envelope(kind: str, payload: Any, schema: str = "1") -> dict:
    return {"schema": schema, "kind": kind, "data": payload}


def certificates_to_json(certificates: Sequence[Certificate], schema: str = "1", timings: bool = False) -> str:
    """Canonical JSON; wall times are dropped unless asked for so reruns are byte-identical."""
    rows = []
    for cert in certificates:
        row = cert.model_dump()
        if not timings:
            row.pop("wall_time")
        rows.append(row)
    return json.dumps(envelope("certificates", rows, schema), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def certificates_to_frame(certificates: Sequence[Certificate]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "statement": c.statement,
                "fixture": c.fixture,
                "status": c.status,
                "violations": len(c.defect),
                "message": c.message,
            }
            for c in certificates
        ],
        columns=["statement", "fixture", "status", "violations", "message"],
    )


def certificates_to_text(certificates: Sequence[Certificate]) -> str:
    df = certificates_to_frame(certificates)
    if df.empty:
        return "(no certificates)\n"
    return df.to_string(index=False) + "\n"
