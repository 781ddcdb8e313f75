"""Experiment specification and report models."""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..config import DEFAULT_OUTPUT_DIR, DEFAULT_SEED
from ..exceptions import ValidationError


@dataclass(frozen=True)
class ExperimentSpec:
    """What to run and where to write it.

    Attributes:
        name: Registered experiment name
        params: Overrides of the experiment's default parameters
        output_dir: Directory receiving CSV and JSON reports
        seed: Base seed; sweep point i uses seed + i
        jobs: Worker count for sweep points
    """

    name: str
    params: dict[str, Any] = field(default_factory=dict)
    output_dir: Path = Path(DEFAULT_OUTPUT_DIR)
    seed: int = DEFAULT_SEED
    jobs: int = 1

    def __post_init__(self) -> None:
        """Normalize the output path and check jobs.

        Raises:
            ValidationError: If jobs < 1 or name is empty
        """
        if not self.name:
            raise ValidationError("Experiment name is required.")
        if self.jobs < 1:
            raise ValidationError("jobs must be at least 1.")
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "ExperimentSpec":
        """Build a spec from a JSON-like mapping.

        Raises:
            ValidationError: If required keys are missing or unknown keys appear
        """
        allowed = {"name", "params", "output_dir", "seed", "jobs"}
        unknown = set(payload) - allowed
        if unknown:
            raise ValidationError(f"Unknown spec keys: {', '.join(sorted(unknown))}")
        if "name" not in payload:
            raise ValidationError('Spec must contain "name".')
        params = payload.get("params", {})
        if not isinstance(params, dict):
            raise ValidationError('"params" must be an object.')
        return cls(
            name=str(payload["name"]),
            params=dict(params),
            output_dir=Path(payload.get("output_dir", DEFAULT_OUTPUT_DIR)),
            seed=int(payload.get("seed", DEFAULT_SEED)),
            jobs=int(payload.get("jobs", 1)),
        )

    @classmethod
    def from_file(cls, path: Path) -> "ExperimentSpec":
        """Load a spec from a JSON file.

        Raises:
            ValidationError: If the file is not valid JSON
        """
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ValidationError(f"Spec file {path} is not valid JSON: {e}") from e
        if not isinstance(payload, dict):
            raise ValidationError("Spec file must contain a JSON object.")
        return cls.from_dict(payload)

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-serializable echo of the spec."""
        return {
            "name": self.name,
            "params": dict(self.params),
            "output_dir": str(self.output_dir),
            "seed": self.seed,
            "jobs": self.jobs,
        }


@dataclass(frozen=True)
class CheckResult:
    """Pass/fail outcome of one acceptance check."""

    name: str
    passed: bool
    measured: Any
    threshold: Any
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-serializable form."""
        return {
            "name": self.name,
            "passed": self.passed,
            "measured": self.measured,
            "threshold": self.threshold,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ExperimentReport:
    """Files written by an experiment and its check outcomes.

    Attributes:
        spec: The spec that was run
        params: Resolved parameters (defaults merged with overrides)
        csv_paths: CSV files written, by table name
        summary_path: Summary JSON path
        checks: Acceptance check outcomes
    """

    spec: ExperimentSpec
    params: dict[str, Any]
    csv_paths: dict[str, Path]
    summary_path: Path
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        """True iff every check passed."""
        return all(check.passed for check in self.checks)
