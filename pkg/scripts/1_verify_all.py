#!/usr/bin/env python3
import sys
from pathlib import Path

# ---------- Paths / PYTHONPATH ----------
root_dir = Path().absolute()
if root_dir.parts[-1:] == ("scripts",):
    root_dir = Path(*root_dir.parts[:-1])
root_dir = root_dir.resolve()
if str(root_dir) not in sys.path:
    sys.path.append(str(root_dir))
print(f"Local environment — project root: {root_dir}")

# ---------- Settings ----------
from cinfty import config
settings = config.LabSettings(_env_file=str(root_dir / ".env"))

# ---------- Imports ----------
from cinfty.config import FixtureName, RunConfig, Suite
from cinfty.report import certificates_to_json, certificates_to_text
from cinfty.suites import run_suite

# Suites each fixture carries; under Suite.ALL the rest are recorded as skipped.
PLAN = {
    FixtureName.BATTERY: [Suite.DGCA, Suite.TRANSFER, Suite.CINFTY, Suite.CUMULANTS],
    FixtureName.INTERVAL: [Suite.ALL],
    FixtureName.DELTA2: [Suite.DGCA, Suite.TRANSFER, Suite.CINFTY, Suite.CUMULANTS],
    FixtureName.SUBDIVIDED: [Suite.TRANSFER, Suite.TOWER],
    FixtureName.CIRCLE: [Suite.DGCA, Suite.TRANSFER, Suite.CINFTY, Suite.TOWER],
}


def verify_fixture(fixture: FixtureName, suites: list[Suite], out_dir: Path) -> int:
    run = RunConfig.from_settings(settings, fixture=fixture)
    certificates = []
    for suite in suites:
        certificates += run_suite(suite, run, echo=print)

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{fixture.value}.json").write_text(certificates_to_json(certificates, settings.SCHEMA_VERSION), encoding="utf-8")
    (out_dir / f"{fixture.value}.txt").write_text(certificates_to_text(certificates), encoding="utf-8")
    failed = sum(1 for c in certificates if c.status == "failed")
    print(f"✓ Completed: {fixture.value} ({len(certificates)} certificates, {failed} failed)")
    return failed


# ---------- Main ----------
def main():
    out_dir = settings.OUTPUT_DIR if settings.OUTPUT_DIR.is_absolute() else root_dir / settings.OUTPUT_DIR
    print(f"Writing certificates to {out_dir}")

    failed = 0
    for fixture, suites in PLAN.items():
        try:
            failed += verify_fixture(fixture, suites, out_dir)
        except Exception as e:
            failed += 1
            print(f"! Error verifying {fixture.value}: {e}")

    print("\nAll fixtures processed.")
    sys.exit(1 if failed else 0)

if __name__ == "__main__":
    main()
