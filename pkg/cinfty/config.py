from enum import Enum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class FixtureName(Enum):
    INTERVAL = "interval"
    DELTA2 = "delta2"
    CIRCLE = "circle"
    SUBDIVIDED = "subdivided"
    BATTERY = "battery"


class Suite(Enum):
    DGCA = "dgca"
    TRANSFER = "transfer"
    CINFTY = "cinfty"
    CUMULANTS = "cumulants"
    COMPLEXES = "complexes"
    TOWER = "tower"
    ALL = "all"


class ExportObject(Enum):
    GN = "Gn"
    CN = "cn"
    TRANSFERRED = "transferred"
    CUMULANT = "cumulant"


# hard caps of the combinatorial constructions
ARITY_CAP = 4
CUMULANT_CAP = 6
NULLHOMOTOPY_CAP = 4
GRAPH_CAP = 6
COMPLEX_CAP = 4


class LabSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file='.env',
        env_file_encoding='utf-8',
        env_prefix='CINFTY_',
        extra='ignore'
    )

    OUTPUT_DIR: Path = Path("docs/certificates")

    # Default caps
    MAX_ARITY: int = 4
    MAX_CUMULANT_N: int = 4
    DEGREE_BOUND: int = 4

    # Enumeration bounds
    SHUFFLE_BOUND: int = 8
    PARTITION_BOUND: int = 8
    TREE_BOUND: int = 5

    REPORT_FORMAT: Literal["json", "text"] = "json"
    SCHEMA_VERSION: str = "1"

    def model_post_init(self, __context):
        """Runs after the model is initialized."""
        problems = []
        if not 1 <= self.MAX_ARITY <= ARITY_CAP:
            problems.append(f"MAX_ARITY must be in 1..{ARITY_CAP}, got {self.MAX_ARITY}")
        if not 1 <= self.MAX_CUMULANT_N <= NULLHOMOTOPY_CAP:
            problems.append(f"MAX_CUMULANT_N must be in 1..{NULLHOMOTOPY_CAP}, got {self.MAX_CUMULANT_N}")
        if self.DEGREE_BOUND < 1:
            problems.append(f"DEGREE_BOUND must be positive, got {self.DEGREE_BOUND}")
        if problems:
            raise ValueError(
                "The following settings are out of range:\n  " + "\n  ".join(problems)
            )


_settings: LabSettings | None = None


def get_settings() -> LabSettings:
    global _settings
    if _settings is None:
        _settings = LabSettings()
    return _settings


class RunConfig(BaseModel):
    """Options of one `cinfty-lab` invocation; defaults come from `LabSettings`."""

    fixture: FixtureName = FixtureName.INTERVAL
    arity: int = 4
    n: int = 4
    degree_bound: int = 4
    out: Path | None = None
    format: Literal["json", "text"] = "json"

    @field_validator("fixture", mode="before")
    @classmethod
    def known_fixture(cls, value):
        if isinstance(value, FixtureName):
            return value
        names = [f.value for f in FixtureName]
        if value not in names:
            raise ValueError(f"Unknown fixture {value!r}; choose one of {names}")
        return FixtureName(value)

    @model_validator(mode="after")
    def within_caps(self):
        if not 1 <= self.arity <= ARITY_CAP:
            raise ValueError(f"--arity must be in 1..{ARITY_CAP}, got {self.arity}")
        if not 1 <= self.n <= GRAPH_CAP:
            raise ValueError(f"--n must be in 1..{GRAPH_CAP}, got {self.n}")
        if self.degree_bound < 1:
            raise ValueError(f"--degree-bound must be positive, got {self.degree_bound}")
        return self

    @classmethod
    def from_settings(cls, settings: LabSettings | None = None, **overrides) -> "RunConfig":
        settings = settings or get_settings()
        values = {
            "arity": settings.MAX_ARITY,
            "n": settings.MAX_CUMULANT_N,
            "degree_bound": settings.DEGREE_BOUND,
            "format": settings.REPORT_FORMAT,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
