"""Run a registered experiment from an ExperimentSpec and write its reports."""

import logging
from typing import Any

from ..exceptions import ValidationError
from ..messages import ErrorMessages, LogMessages
from ..models.experiment import ExperimentReport, ExperimentSpec
from .experiments import ExperimentContext, get_experiment
from .reporting import write_csv, write_summary

logger = logging.getLogger(__name__)

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce_scalar(raw: str, like: Any, key: str) -> Any:
    if isinstance(like, bool):
        lowered = raw.strip().lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ValidationError(f"Parameter '{key}' expects a boolean, got '{raw}'.")
    try:
        if isinstance(like, int):
            return int(raw)
        if isinstance(like, float):
            return float(raw)
    except ValueError as e:
        raise ValidationError(
            f"Parameter '{key}' expects {type(like).__name__}, got '{raw}'."
        ) from e
    return raw.strip()


def coerce_param(key: str, value: Any, default: Any) -> Any:
    """Convert an override to the type of the experiment's default.

    Strings from the command line are parsed; lists accept comma-separated
    strings. Values of other types pass through unless a numeric default
    needs int → float widening.

    Raises:
        ValidationError: If a string cannot be parsed as the expected type
    """
    if isinstance(default, list):
        if isinstance(value, str):
            value = [item for item in value.split(",") if item.strip()]
        if not isinstance(value, list | tuple):
            raise ValidationError(f"Parameter '{key}' expects a list.")
        like = default[0] if default else ""
        return [coerce_param(key, item, like) for item in value]
    if isinstance(value, str) and not isinstance(default, str):
        return _coerce_scalar(value, default, key)
    if isinstance(default, float) and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    return value


def resolve_params(name: str, defaults: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    """Merge overrides into an experiment's defaults.

    Raises:
        ValidationError: If an override names a parameter the experiment lacks
    """
    params = dict(defaults)
    for key, value in overrides.items():
        if key not in defaults:
            raise ValidationError(ErrorMessages.BAD_PARAM.format(key=key, name=name))
        params[key] = coerce_param(key, value, defaults[key])
    return params


def run(spec: ExperimentSpec) -> ExperimentReport:
    """Execute the experiment named by spec and write its CSV and JSON reports.

    Tables land in <output_dir>/<name>/<table>.csv and the summary in
    <output_dir>/<name>/summary.json.

    Args:
        spec: Experiment name, parameter overrides, output directory, seed, jobs

    Returns:
        ExperimentReport: Written files and check outcomes

    Raises:
        UnknownExperimentError: If the name is not registered
        ValidationError: If a parameter is unknown or malformed
    """
    experiment = get_experiment(spec.name)
    params = resolve_params(spec.name, experiment.defaults, spec.params)
    logger.info(LogMessages.EXPERIMENT_START, spec.name, spec.seed, spec.jobs)

    outcome = experiment.run(ExperimentContext(params=params, seed=spec.seed, jobs=spec.jobs))

    directory = spec.output_dir / spec.name
    csv_paths = {
        table: write_csv(directory / f"{table}.csv", rows)
        for table, rows in sorted(outcome.tables.items())
    }
    report = ExperimentReport(
        spec=spec,
        params=params,
        csv_paths=csv_paths,
        summary_path=directory / "summary.json",
        checks=list(outcome.checks),
    )
    write_summary(report)

    for check in report.checks:
        if not check.passed:
            logger.warning(LogMessages.CHECK_FAILED, check.name, check.measured, check.threshold)
    passed = sum(check.passed for check in report.checks)
    logger.info(LogMessages.EXPERIMENT_DONE, spec.name, passed, len(report.checks))
    return report
